#include "bohm/dirac.hpp"

#include <algorithm>
#include <cmath>

#include "bohm/stats.hpp"

namespace bohm::dirac {

Matrix2 operator*(Matrix2 const& x, Matrix2 const& y) {
  Matrix2 r;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) r.a[2 * i + j] = x(i, 0) * y(0, j) + x(i, 1) * y(1, j);
  }
  return r;
}

Matrix2 operator+(Matrix2 const& x, Matrix2 const& y) {
  Matrix2 r;
  for (int k = 0; k < 4; ++k) r.a[k] = x.a[k] + y.a[k];
  return r;
}

Matrix2 operator-(Matrix2 const& x, Matrix2 const& y) {
  Matrix2 r;
  for (int k = 0; k < 4; ++k) r.a[k] = x.a[k] - y.a[k];
  return r;
}

Matrix2 operator*(Complex s, Matrix2 const& x) {
  Matrix2 r;
  for (int k = 0; k < 4; ++k) r.a[k] = s * x.a[k];
  return r;
}

double max_abs(Matrix2 const& m) {
  double r = 0.0;
  for (auto const& v : m.a) r = std::max(r, std::abs(v));
  return r;
}

Matrix2 gamma0() { return {{Complex{1}, Complex{}, Complex{}, Complex{-1}}}; }
Matrix2 gamma1() { return {{Complex{}, Complex{1}, Complex{-1}, Complex{}}}; }

Matrix2 gamma_dot(Vec2 n) {
  if (!(n.t > 0.0)) throw ValidationError("gamma_dot: normal must be future-oriented");
  if (!(std::abs(minkowski_dot(n, n) - 1.0) <= 1e-9)) {
    throw ValidationError("gamma_dot: normal must be unit timelike");
  }
  return Complex{n.t} * gamma0() - Complex{n.x} * gamma1();
}

Spinor mode_spinor(double momentum, double mass, Branch branch) {
  double const e = energy(momentum, mass);
  double const norm = std::hypot(e + mass, momentum);
  if (branch == Branch::Positive) return {Complex{(e + mass) / norm}, Complex{momentum / norm}};
  return {Complex{-momentum / norm}, Complex{(e + mass) / norm}};
}

Matrix2 dirac_operator(double signed_energy, double momentum, double mass) {
  return Complex{signed_energy} * gamma0() - Complex{momentum} * gamma1() -
         Complex{mass} * Matrix2::identity();
}

namespace {

void check_packet(PacketSpec const& spec) {
  if (!(spec.width > 0.0)) throw ValidationError("packet: width must be > 0");
  if (spec.modes < 2) throw ValidationError("packet: need at least two modes");
  if (!(spec.cutoff > 0.0)) throw ValidationError("packet: cutoff must be > 0");
}

double packet_step(PacketSpec const& spec) {
  double const sigma_p = 0.5 / spec.width;
  return 2.0 * spec.cutoff * sigma_p / static_cast<double>(spec.modes - 1);
}

}  // namespace

double packet_period(PacketSpec const& spec) {
  check_packet(spec);
  return 2.0 * kPi / packet_step(spec);
}

std::vector<PlaneWaveMode> make_packet(PacketSpec const& spec) {
  check_packet(spec);
  double const sigma_p = 0.5 / spec.width;
  double const dp = packet_step(spec);
  std::vector<PlaneWaveMode> modes(spec.modes);
  double norm2 = 0.0;
  for (std::size_t k = 0; k < spec.modes; ++k) {
    double const p = spec.momentum - spec.cutoff * sigma_p + dp * static_cast<double>(k);
    double const dev = (p - spec.momentum) * spec.width;
    modes[k] = {p, spec.branch, std::polar(std::exp(-dev * dev), -p * spec.center)};
    norm2 += std::norm(modes[k].coefficient);
  }
  // One period of the mode sum then carries unit probability.
  double const scale = std::sqrt(dp / (2.0 * kPi) / norm2);
  for (auto& m : modes) m.coefficient *= scale;
  return modes;
}

MultiTimeWaveFunction::MultiTimeWaveFunction(std::vector<double> masses, std::vector<Term> terms)
    : masses_(std::move(masses)), terms_(std::move(terms)) {
  std::size_t const n = masses_.size();
  if (n == 0) throw ValidationError("Dirac wave function: need at least one particle");
  if (n > 12) throw ValidationError("Dirac wave function: too many particles");
  for (double m : masses_) {
    if (!(m > 0.0) || !std::isfinite(m)) throw ValidationError("Dirac wave function: masses must be > 0");
  }
  if (terms_.empty()) throw ValidationError("Dirac wave function: no terms");
  compiled_.reserve(terms_.size() * n);
  for (auto const& term : terms_) {
    if (term.factors.size() != n) {
      throw ValidationError("Dirac wave function: every term needs one factor per particle");
    }
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<CompiledMode> modes;
      modes.reserve(term.factors[i].size());
      for (auto const& mode : term.factors[i]) {
        if (!std::isfinite(mode.momentum)) throw ValidationError("Dirac wave function: bad momentum");
        Spinor const u = mode_spinor(mode.momentum, masses_[i], mode.branch);
        double const e = energy(mode.momentum, masses_[i]) * static_cast<int>(mode.branch);
        modes.push_back({mode.momentum, e, {mode.coefficient * u[0], mode.coefficient * u[1]}});
      }
      compiled_.push_back(std::move(modes));
    }
  }
}

Spinor MultiTimeWaveFunction::evaluate_factor(std::size_t term, std::size_t particle,
                                              SpacePoint p) const {
  Spinor out{};
  for (auto const& mode : compiled_[term * masses_.size() + particle]) {
    Complex const phase = std::polar(1.0, mode.momentum * p.x - mode.signed_energy * p.t);
    out[0] += mode.weighted[0] * phase;
    out[1] += mode.weighted[1] * phase;
  }
  return out;
}

void MultiTimeWaveFunction::evaluate_into(std::span<SpacePoint const> points,
                                          std::span<Complex> out) const {
  std::size_t const n = masses_.size();
  std::size_t const dim = components();
  if (points.size() != n || out.size() != dim) {
    throw ValidationError("Dirac wave function: wrong number of points or components");
  }
  std::fill(out.begin(), out.end(), Complex{});
  std::array<Spinor, 12> factors;
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    for (std::size_t i = 0; i < n; ++i) factors[i] = evaluate_factor(t, i, points[i]);
    for (std::size_t c = 0; c < dim; ++c) {
      Complex v = terms_[t].coefficient;
      for (std::size_t i = 0; i < n; ++i) v *= factors[i][(c >> (n - 1 - i)) & 1u];
      out[c] += v;
    }
  }
}

std::vector<Complex> MultiTimeWaveFunction::evaluate(std::span<SpacePoint const> points) const {
  std::vector<Complex> out(components());
  evaluate_into(points, out);
  return out;
}

MultiTimeWaveFunction MultiTimeWaveFunction::scaled(Complex factor) const {
  std::vector<Term> terms = terms_;
  for (auto& t : terms) t.coefficient *= factor;
  return MultiTimeWaveFunction(masses_, std::move(terms));
}

MultiTimeWaveFunction MultiTimeWaveFunction::normalized_on_rest_leaf(double lo, double hi,
                                                                     double step) const {
  if (!(hi > lo) || !(step > 0.0)) throw ValidationError("normalize: bad quadrature grid");
  std::size_t points = static_cast<std::size_t>(std::ceil((hi - lo) / step)) + 1;
  if (points % 2 == 0) ++points;
  double const h = (hi - lo) / static_cast<double>(points - 1);
  auto const w = simpson_weights(points, h);
  std::size_t const n = masses_.size();
  std::size_t const k = terms_.size();
  // Factor values on the grid: values[(term * n + i) * points + q]
  std::vector<Spinor> values(k * n * points);
  for (std::size_t t = 0; t < k; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t q = 0; q < points; ++q) {
        values[(t * n + i) * points + q] =
            evaluate_factor(t, i, {0.0, lo + h * static_cast<double>(q)});
      }
    }
  }
  Complex total{};
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      Complex prod = std::conj(terms_[a].coefficient) * terms_[b].coefficient;
      for (std::size_t i = 0; i < n; ++i) {
        Complex overlap{};
        for (std::size_t q = 0; q < points; ++q) {
          auto const& u = values[(a * n + i) * points + q];
          auto const& v = values[(b * n + i) * points + q];
          overlap += w[q] * (std::conj(u[0]) * v[0] + std::conj(u[1]) * v[1]);
        }
        prod *= overlap;
      }
      total += prod;
    }
  }
  if (!(total.real() > 0.0)) throw ValidationError("normalize: state has zero norm on the grid");
  return scaled(Complex{1.0 / std::sqrt(total.real())});
}

MultiTimeWaveFunction apply_poincare(PoincareTransform const& g, MultiTimeWaveFunction const& wf) {
  if (g.is_identity()) return wf;
  double const c = std::cosh(g.rapidity);
  double const s = std::sinh(g.rapidity);
  auto const sm = g.spinor_matrix();
  std::vector<Term> terms = wf.terms();
  auto const masses = wf.masses();
  for (auto& term : terms) {
    for (std::size_t i = 0; i < term.factors.size(); ++i) {
      double const m = masses[i];
      for (auto& mode : term.factors[i]) {
        double const e = energy(mode.momentum, m) * static_cast<int>(mode.branch);
        double const e_new = c * e + s * mode.momentum;
        double const p_new = s * e + c * mode.momentum;
        Spinor const u = mode_spinor(mode.momentum, m, mode.branch);
        Spinor const su{sm[0] * u[0] + sm[1] * u[1], sm[2] * u[0] + sm[3] * u[1]};
        Spinor const u_new = mode_spinor(p_new, m, mode.branch);
        Complex const ratio = std::conj(u_new[0]) * su[0] + std::conj(u_new[1]) * su[1];
        double const phase = e_new * g.translation.t - p_new * g.translation.x;
        mode.coefficient *= ratio * std::polar(1.0, phase);
        mode.momentum = p_new;
      }
    }
  }
  return MultiTimeWaveFunction(std::vector<double>(masses.begin(), masses.end()), std::move(terms));
}

namespace {

/// v <- (a I + b sigma_x) v on the factor of `particle`.
void apply_on_axis(std::vector<Complex>& v, std::size_t n, std::size_t particle, double a, double b) {
  std::size_t const bit = std::size_t{1} << (n - 1 - particle);
  for (std::size_t c = 0; c < v.size(); ++c) {
    if (c & bit) continue;
    Complex const v0 = v[c];
    Complex const v1 = v[c | bit];
    v[c] = a * v0 + b * v1;
    v[c | bit] = b * v0 + a * v1;
  }
}

Complex inner(std::span<Complex const> a, std::vector<Complex> const& b) {
  Complex s{};
  for (std::size_t c = 0; c < b.size(); ++c) s += std::conj(a[c]) * b[c];
  return s;
}

}  // namespace

Bilinears hypersurface_bilinears(std::span<Complex const> psi, std::span<Vec2 const> normals,
                                 bool with_currents) {
  std::size_t const n = normals.size();
  if (psi.size() != (std::size_t{1} << n)) throw ValidationError("bilinears: size mismatch");
  // gamma0 (gamma.n) = n^0 I - n^1 sigma_x; gamma0 gamma^0 = I; gamma0 gamma^1 = sigma_x.
  Bilinears out;
  std::vector<Complex> chi(psi.begin(), psi.end());
  for (std::size_t j = 0; j < n; ++j) apply_on_axis(chi, n, j, normals[j].t, -normals[j].x);
  Complex const rho = inner(psi, chi);
  out.rho = rho.real();
  out.rho_imag = rho.imag();
  if (!with_currents) return out;
  out.currents.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(chi.begin(), chi.end(), Complex{});
    std::copy(psi.begin(), psi.end(), chi.begin());
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) apply_on_axis(chi, n, j, normals[j].t, -normals[j].x);
    }
    Complex const j0 = inner(psi, chi);
    apply_on_axis(chi, n, i, 0.0, 1.0);
    Complex const j1 = inner(psi, chi);
    out.currents[i] = {j0.real(), j1.real()};
    out.max_current_imag = std::max({out.max_current_imag, std::abs(j0.imag()), std::abs(j1.imag())});
  }
  return out;
}

StructureResiduals structure_residuals() {
  StructureResiduals r;
  Matrix2 const g0 = gamma0();
  Matrix2 const g1 = gamma1();
  Matrix2 const id = Matrix2::identity();
  r.clifford = std::max({max_abs(g0 * g0 - id), max_abs(g1 * g1 + id), max_abs(g0 * g1 + g1 * g0)});
  for (double m : {0.5, 1.0, 2.0}) {
    for (int k = -20; k <= 20; ++k) {
      double const p = 0.25 * k;
      for (Branch b : {Branch::Positive, Branch::Negative}) {
        Spinor const u = mode_spinor(p, m, b);
        Matrix2 const d = dirac_operator(energy(p, m) * static_cast<int>(b), p, m);
        r.mode_equation = std::max({r.mode_equation, std::abs(d(0, 0) * u[0] + d(0, 1) * u[1]),
                                    std::abs(d(1, 0) * u[0] + d(1, 1) * u[1])});
      }
    }
  }
  auto const as_matrix = [](std::array<Complex, 4> const& a) { return Matrix2{{a[0], a[1], a[2], a[3]}}; };
  for (double eta : {-1.5, -0.4, 0.3, 1.1}) {
    Matrix2 const s = as_matrix(PoincareTransform{eta, {}}.spinor_matrix());
    Matrix2 const sinv = as_matrix(PoincareTransform{-eta, {}}.spinor_matrix());
    Complex const c{std::cosh(eta)};
    Complex const sh{std::sinh(eta)};
    r.intertwining = std::max({r.intertwining, max_abs(s * sinv - id), max_abs(sinv * g0 * s - (c * g0 + sh * g1)),
                               max_abs(sinv * g1 * s - (sh * g0 + c * g1))});
  }
  return r;
}

}  // namespace bohm::dirac
