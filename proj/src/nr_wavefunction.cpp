#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "bohm/nr_bohm.hpp"
#include "bohm/stats.hpp"

namespace bohm::nr {

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::size_t particle_count() const = 0;
  virtual std::span<double const> masses() const = 0;
  virtual bool is_grid() const = 0;
  /// order 0: psi only, 1: and the gradient, 2: and the Hessian diagonal.
  virtual LocalValue local(double t, std::span<double const> x, int order) const = 0;
  /// Im(conj(psi) grad_i psi) / m_i into `current`; returns |psi|^2.
  virtual double current_into(double t, std::span<double const> x, std::span<double> current) const {
    LocalValue const v = local(t, x, 1);
    auto const m = masses();
    for (std::size_t i = 0; i < m.size(); ++i) current[i] = (std::conj(v.psi) * v.gradient[i]).imag() / m[i];
    return std::norm(v.psi);
  }
  virtual double norm(double t) const = 0;
  virtual std::vector<Interval> support(double t) const = 0;
  virtual double peak_density(double t) const = 0;
  virtual std::vector<double> marginal_bin_probabilities(std::size_t axis, double t, double lo,
                                                         double hi, std::size_t bins) const = 0;
};

namespace {

void check_masses(std::vector<double> const& masses) {
  if (masses.empty()) throw ValidationError("wave function: need at least one particle");
  for (double m : masses) {
    if (!(m > 0.0) || !std::isfinite(m)) throw ValidationError("wave function: masses must be > 0");
  }
}

void check_terms(std::vector<ProductTerm> const& terms, std::size_t n) {
  if (terms.empty()) throw ValidationError("wave function: no terms");
  for (auto const& term : terms) {
    if (term.packets.size() != n) {
      throw ValidationError("wave function: every term needs one packet per particle");
    }
    for (auto const& p : term.packets) {
      if (!(p.width > 0.0)) throw ValidationError("wave function: packet width must be > 0");
    }
  }
}

/// Value and log-derivatives of a freely evolving Gaussian packet.
struct PacketValue {
  Complex value;
  Complex dlog;  // phi'/phi
  Complex d2;    // phi''
};

PacketValue evaluate_packet(GaussianPacket const& p, double mass, double t, double x, int order) {
  double const s2 = p.width * p.width;
  double const tau = t / (2.0 * mass * s2);
  double const r = 1.0 + tau * tau;
  Complex const inv_a{1.0 / r, -tau / r};
  double const shift = x - p.center - p.momentum * t / mass;
  double const q = -shift * shift / (4.0 * s2);
  // norm / sqrt(a) folded into the exponent: sqrt(a) = r^(1/4) e^(i atan(tau) / 2).
  Complex const exponent{q * inv_a.real() - 0.25 * std::log(2.0 * kPi * s2) - 0.25 * std::log(r),
                         q * inv_a.imag() + p.momentum * (x - p.center) - p.momentum * p.momentum * t / (2.0 * mass) -
                             0.5 * std::atan(tau)};
  PacketValue out;
  out.value = std::exp(exponent);
  if (order >= 1) out.dlog = -shift / (2.0 * s2) * inv_a + Complex{0.0, p.momentum};
  if (order >= 2) out.d2 = (out.dlog * out.dlog - inv_a / (2.0 * s2)) * out.value;
  return out;
}

/// <a|b> for two packets of the same particle; conserved by free evolution.
Complex packet_overlap(GaussianPacket const& a, GaussianPacket const& b) {
  double const sa2 = a.width * a.width;
  double const sb2 = b.width * b.width;
  double const A = 1.0 / (4.0 * sa2) + 1.0 / (4.0 * sb2);
  Complex const B{a.center / (2.0 * sa2) + b.center / (2.0 * sb2), b.momentum - a.momentum};
  Complex const C{-a.center * a.center / (4.0 * sa2) - b.center * b.center / (4.0 * sb2),
                  a.momentum * a.center - b.momentum * b.center};
  double const na = std::pow(2.0 * kPi * sa2, -0.25);
  double const nb = std::pow(2.0 * kPi * sb2, -0.25);
  return na * nb * std::sqrt(kPi / A) * std::exp(B * B / (4.0 * A) + C);
}

class AnalyticBackend final : public Backend {
 public:
  AnalyticBackend(std::vector<double> masses, std::vector<ProductTerm> terms)
      : masses_(std::move(masses)), terms_(std::move(terms)) {
    check_masses(masses_);
    check_terms(terms_, masses_.size());
    double const n = raw_norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw ValidationError("wave function: zero norm");
    double const scale = 1.0 / std::sqrt(n);
    for (auto& term : terms_) term.coefficient *= scale;
  }

  std::size_t particle_count() const override { return masses_.size(); }
  std::span<double const> masses() const override { return masses_; }
  bool is_grid() const override { return false; }

  LocalValue local(double t, std::span<double const> x, int order) const override {
    std::size_t const n = masses_.size();
    LocalValue out{Complex{}, std::vector<Complex>(order >= 1 ? n : 0), std::vector<Complex>(order >= 2 ? n : 0)};
    thread_local std::vector<PacketValue> factors;
    factors.resize(n);
    for (auto const& term : terms_) {
      Complex product = term.coefficient;
      for (std::size_t i = 0; i < n; ++i) {
        factors[i] = evaluate_packet(term.packets[i], masses_[i], t, x[i], order);
        product *= factors[i].value;
      }
      out.psi += product;
      if (order == 0) continue;
      for (std::size_t i = 0; i < n; ++i) out.gradient[i] += product * factors[i].dlog;
      if (order == 1) continue;
      for (std::size_t i = 0; i < n; ++i) {
        // product / value_i * d2_i, written without dividing by a possibly tiny value.
        Complex others = term.coefficient;
        for (std::size_t j = 0; j < n; ++j) {
          if (j != i) others *= factors[j].value;
        }
        out.second[i] += others * factors[i].d2;
      }
    }
    return out;
  }

  double current_into(double t, std::span<double const> x, std::span<double> current) const override {
    std::size_t const n = masses_.size();
    thread_local std::vector<PacketValue> factors;
    thread_local std::vector<Complex> gradient;
    factors.resize(n);
    gradient.assign(n, Complex{});
    Complex psi{};
    for (auto const& term : terms_) {
      Complex product = term.coefficient;
      for (std::size_t i = 0; i < n; ++i) {
        factors[i] = evaluate_packet(term.packets[i], masses_[i], t, x[i], 1);
        product *= factors[i].value;
      }
      psi += product;
      for (std::size_t i = 0; i < n; ++i) gradient[i] += product * factors[i].dlog;
    }
    for (std::size_t i = 0; i < n; ++i) current[i] = (std::conj(psi) * gradient[i]).imag() / masses_[i];
    return std::norm(psi);
  }

  double norm(double) const override { return raw_norm(); }

  std::vector<Interval> support(double t) const override {
    std::size_t const n = masses_.size();
    std::vector<Interval> box(n, Interval{1e300, -1e300});
    for (auto const& term : terms_) {
      for (std::size_t i = 0; i < n; ++i) {
        auto const& p = term.packets[i];
        double const m = masses_[i];
        double const centre = p.center + p.momentum * t / m;
        double const spread = p.width * std::hypot(1.0, t / (2.0 * m * p.width * p.width));
        box[i].lo = std::min(box[i].lo, centre - 8.0 * spread);
        box[i].hi = std::max(box[i].hi, centre + 8.0 * spread);
      }
    }
    return box;
  }

  double peak_density(double t) const override {
    std::vector<Interval> const box = support(t);
    std::size_t const n = box.size();
    std::size_t const per_axis = n == 1 ? 4001 : n == 2 ? 241 : n == 3 ? 41 : 15;
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= per_axis;
    std::vector<double> point(n);
    double peak = 0.0;
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t rest = flat;
      for (std::size_t i = n; i-- > 0;) {
        std::size_t const j = rest % per_axis;
        rest /= per_axis;
        point[i] = box[i].lo + (box[i].hi - box[i].lo) * static_cast<double>(j) /
                                   static_cast<double>(per_axis - 1);
      }
      peak = std::max(peak, std::norm(local(t, point, 0).psi));
    }
    return peak;
  }

  std::vector<double> marginal_bin_probabilities(std::size_t axis, double t, double lo, double hi,
                                                 std::size_t bins) const override {
    std::size_t const n = masses_.size();
    std::size_t const k = terms_.size();
    // weights[a][b] = conj(c_a) c_b prod_{j != axis} <a_j|b_j>
    std::vector<Complex> weights(k * k);
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) {
        Complex w = std::conj(terms_[a].coefficient) * terms_[b].coefficient;
        for (std::size_t j = 0; j < n; ++j) {
          if (j != axis) w *= packet_overlap(terms_[a].packets[j], terms_[b].packets[j]);
        }
        weights[a * k + b] = w;
      }
    }
    std::vector<Complex> values(k);
    auto marginal = [&](double x) {
      for (std::size_t a = 0; a < k; ++a) {
        values[a] = evaluate_packet(terms_[a].packets[axis], masses_[axis], t, x, false).value;
      }
      Complex sum{};
      for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) sum += weights[a * k + b] * std::conj(values[a]) * values[b];
      }
      return sum.real();
    };
    std::vector<double> probs(bins);
    double const width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t b = 0; b < bins; ++b) {
      double const a0 = lo + width * static_cast<double>(b);
      probs[b] = simpson(marginal, a0, a0 + width, 32);
    }
    return probs;
  }

 private:
  double raw_norm() const {
    Complex sum{};
    for (auto const& ta : terms_) {
      for (auto const& tb : terms_) {
        Complex w = std::conj(ta.coefficient) * tb.coefficient;
        for (std::size_t j = 0; j < masses_.size(); ++j) {
          w *= packet_overlap(ta.packets[j], tb.packets[j]);
        }
        sum += w;
      }
    }
    return sum.real();
  }

  std::vector<double> masses_;
  std::vector<ProductTerm> terms_;
};

// FFTW planning is not thread-safe; execution with the new-array interface is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

class GridBackend final : public Backend {
 public:
  GridBackend(std::vector<double> masses, std::vector<ProductTerm> const& initial, GridSpec spec)
      : masses_(std::move(masses)), spec_(spec) {
    check_masses(masses_);
    check_terms(initial, masses_.size());
    if (spec_.points < 4 || spec_.points % 2 != 0) {
      throw ValidationError("grid: points per axis must be even and >= 4");
    }
    if (!(spec_.length > 0.0) || !(spec_.dt > 0.0) || !(spec_.t_max >= 0.0)) {
      throw ValidationError("grid: length, dt must be > 0 and t_max >= 0");
    }
    std::size_t const n = masses_.size();
    size_ = 1;
    for (std::size_t i = 0; i < n; ++i) size_ *= spec_.points;
    if (size_ > (std::size_t{1} << 24)) throw ValidationError("grid: too many grid points");
    dx_ = spec_.length / static_cast<double>(spec_.points);
    lo_ = -0.5 * spec_.length;

    wavenumbers_.resize(spec_.points);
    for (std::size_t j = 0; j < spec_.points; ++j) {
      auto const signed_j = static_cast<double>(j < spec_.points / 2 ? static_cast<long>(j)
                                                                     : static_cast<long>(j) -
                                                                           static_cast<long>(spec_.points));
      wavenumbers_[j] = 2.0 * kPi / spec_.length * signed_j;
    }

    kinetic_.resize(size_);
    potential_.resize(size_);
    std::vector<std::size_t> index(n);
    for (std::size_t flat = 0; flat < size_; ++flat) {
      unflatten(flat, index);
      double kin = 0.0, pot = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double const k = wavenumbers_[index[i]];
        kin += k * k / (2.0 * masses_[i]);
        pot += spec_.potential.value(node(index[i]), masses_[i]);
      }
      kinetic_[flat] = kin;
      potential_[flat] = pot;
    }

    std::vector<int> dims(n, static_cast<int>(spec_.points));
    std::vector<Complex> scratch(size_);
    {
      std::lock_guard lock(fftw_planner_mutex());
      auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
      forward_ = fftw_plan_dft(static_cast<int>(n), dims.data(), buf, buf, FFTW_FORWARD,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
      backward_ = fftw_plan_dft(static_cast<int>(n), dims.data(), buf, buf, FFTW_BACKWARD,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    }

    // Sample the initial superposition on the grid and normalize discretely.
    std::vector<Complex> state(size_);
    for (std::size_t flat = 0; flat < size_; ++flat) {
      unflatten(flat, index);
      Complex value{};
      for (auto const& term : initial) {
        Complex product = term.coefficient;
        for (std::size_t i = 0; i < n; ++i) {
          product *= evaluate_packet(term.packets[i], masses_[i], 0.0, node(index[i]), false).value;
        }
        value += product;
      }
      state[flat] = value;
    }
    double const nrm = discrete_norm(state);
    if (!(nrm > 0.0)) throw ValidationError("grid: initial state has zero norm");
    for (auto& v : state) v /= std::sqrt(nrm);

    total_steps_ = static_cast<std::size_t>(std::ceil(spec_.t_max / spec_.dt - 1e-9));
    // Keep snapshot memory bounded (~64 MiB).
    std::size_t const budget = (std::size_t{64} << 20) / (sizeof(Complex) * size_);
    stride_ = std::max<std::size_t>(1, (total_steps_ + 1 + budget - 1) / std::max<std::size_t>(budget, 1));
    snapshots_.push_back(state);
    for (std::size_t step = 1; step <= total_steps_; ++step) {
      strang_step(state, spec_.dt);
      if (step % stride_ == 0) snapshots_.push_back(state);
    }
  }

  ~GridBackend() override {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }

  GridBackend(GridBackend const&) = delete;
  GridBackend& operator=(GridBackend const&) = delete;

  std::size_t particle_count() const override { return masses_.size(); }
  std::span<double const> masses() const override { return masses_; }
  bool is_grid() const override { return true; }

  /// Position-space state at time t: nearest earlier snapshot, whole
  /// steps, then one partial Strang step.
  std::vector<Complex> state_at(double t) const {
    if (!(t >= 0.0)) throw DomainError("grid: negative time");
    auto whole = static_cast<std::size_t>(std::floor(t / spec_.dt + 1e-9));
    double const remainder = t - static_cast<double>(whole) * spec_.dt;
    std::size_t const snap = std::min(whole / stride_, snapshots_.size() - 1);
    std::vector<Complex> state = snapshots_[snap];
    for (std::size_t step = snap * stride_; step < whole; ++step) strang_step(state, spec_.dt);
    if (std::abs(remainder) > 1e-15) strang_step(state, remainder);
    return state;
  }

  LocalValue local(double t, std::span<double const> x, int order) const override {
    std::size_t const n = masses_.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (!(x[i] >= lo_ && x[i] < lo_ + spec_.length)) {
        throw DomainError("grid: configuration outside the periodic box");
      }
    }
    std::vector<Complex> coef = state_at(t);
    fftw_execute_dft(forward_, reinterpret_cast<fftw_complex*>(coef.data()),
                     reinterpret_cast<fftw_complex*>(coef.data()));
    // Per-axis Fourier factors e^{i k (x - x_lo)}.
    std::vector<std::vector<Complex>> phase(n, std::vector<Complex>(spec_.points));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < spec_.points; ++j) {
        phase[i][j] = std::polar(1.0, wavenumbers_[j] * (x[i] - lo_));
      }
    }
    LocalValue out{Complex{}, std::vector<Complex>(order >= 1 ? n : 0), std::vector<Complex>(order >= 2 ? n : 0)};
    std::vector<std::size_t> index(n);
    double const scale = 1.0 / static_cast<double>(size_);
    for (std::size_t flat = 0; flat < size_; ++flat) {
      unflatten(flat, index);
      Complex term = coef[flat] * scale;
      for (std::size_t i = 0; i < n; ++i) term *= phase[i][index[i]];
      out.psi += term;
      if (order == 0) continue;
      for (std::size_t i = 0; i < n; ++i) {
        double const k = wavenumbers_[index[i]];
        out.gradient[i] += Complex{0.0, k} * term;
        if (order >= 2) out.second[i] += -k * k * term;
      }
    }
    return out;
  }

  double norm(double t) const override { return discrete_norm(state_at(t)); }

  /// Largest nodal density; the band-limited interpolant exceeds it only
  /// marginally for resolved states.
  double peak_density(double t) const override {
    double peak = 0.0;
    for (auto const& v : state_at(t)) peak = std::max(peak, std::norm(v));
    return peak;
  }

  std::vector<Interval> support(double) const override {
    return std::vector<Interval>(masses_.size(),
                                 Interval{lo_, lo_ + spec_.length * (1.0 - 1e-12)});
  }

  std::vector<double> marginal_bin_probabilities(std::size_t axis, double t, double lo, double hi,
                                                 std::size_t bins) const override {
    std::size_t const n = masses_.size();
    std::size_t const p = spec_.points;
    std::vector<Complex> state = state_at(t);
    // Fourier-transform along `axis` only: one 1D coefficient line per
    // node of the remaining axes.
    std::size_t stride = 1;
    for (std::size_t i = axis + 1; i < n; ++i) stride *= p;
    std::size_t const lines = size_ / p;
    std::vector<Complex> line_coef(size_);
    for (std::size_t line = 0; line < lines; ++line) {
      std::size_t const outer = line / stride;
      std::size_t const inner = line % stride;
      std::size_t const base = outer * stride * p + inner;
      for (std::size_t k = 0; k < p; ++k) {
        Complex sum{};
        for (std::size_t j = 0; j < p; ++j) {
          sum += state[base + j * stride] *
                 std::polar(1.0, -wavenumbers_[k] * dx_ * static_cast<double>(j));
        }
        line_coef[line * p + k] = sum / static_cast<double>(p);
      }
    }
    double const cell = std::pow(dx_, static_cast<double>(n - 1));
    std::vector<Complex> phase(p);
    auto marginal = [&](double x) {
      for (std::size_t k = 0; k < p; ++k) phase[k] = std::polar(1.0, wavenumbers_[k] * (x - lo_));
      double sum = 0.0;
      for (std::size_t line = 0; line < lines; ++line) {
        Complex v{};
        for (std::size_t k = 0; k < p; ++k) v += line_coef[line * p + k] * phase[k];
        sum += std::norm(v);
      }
      return sum * cell;
    };
    std::vector<double> probs(bins);
    double const width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t b = 0; b < bins; ++b) {
      double const a0 = lo + width * static_cast<double>(b);
      probs[b] = simpson(marginal, a0, a0 + width, 16);
    }
    return probs;
  }

 private:
  double node(std::size_t j) const { return lo_ + dx_ * static_cast<double>(j); }

  void unflatten(std::size_t flat, std::vector<std::size_t>& index) const {
    for (std::size_t i = index.size(); i-- > 0;) {
      index[i] = flat % spec_.points;
      flat /= spec_.points;
    }
  }

  double discrete_norm(std::vector<Complex> const& state) const {
    double sum = 0.0;
    for (auto const& v : state) sum += std::norm(v);
    return sum * std::pow(dx_, static_cast<double>(masses_.size()));
  }

  void strang_step(std::vector<Complex>& state, double tau) const {
    for (std::size_t f = 0; f < size_; ++f) state[f] *= std::polar(1.0, -0.5 * tau * potential_[f]);
    auto* buf = reinterpret_cast<fftw_complex*>(state.data());
    fftw_execute_dft(forward_, buf, buf);
    double const scale = 1.0 / static_cast<double>(size_);
    for (std::size_t f = 0; f < size_; ++f) state[f] *= std::polar(scale, -tau * kinetic_[f]);
    fftw_execute_dft(backward_, buf, buf);
    for (std::size_t f = 0; f < size_; ++f) state[f] *= std::polar(1.0, -0.5 * tau * potential_[f]);
  }

  std::vector<double> masses_;
  GridSpec spec_;
  std::size_t size_ = 0;
  double dx_ = 0.0;
  double lo_ = 0.0;
  std::vector<double> wavenumbers_;
  std::vector<double> kinetic_;
  std::vector<double> potential_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
  std::size_t total_steps_ = 0;
  std::size_t stride_ = 1;
  std::vector<std::vector<Complex>> snapshots_;
};

}  // namespace

WaveFunction::WaveFunction(std::shared_ptr<Backend const> backend) : backend_(std::move(backend)) {}

WaveFunction WaveFunction::analytic(std::vector<double> masses, std::vector<ProductTerm> terms) {
  return WaveFunction(std::make_shared<AnalyticBackend>(std::move(masses), std::move(terms)));
}

WaveFunction WaveFunction::grid(std::vector<double> masses, std::vector<ProductTerm> initial_terms,
                                GridSpec spec) {
  return WaveFunction(std::make_shared<GridBackend>(std::move(masses), initial_terms, spec));
}

std::size_t WaveFunction::particle_count() const { return backend_->particle_count(); }
std::span<double const> WaveFunction::masses() const { return backend_->masses(); }
bool WaveFunction::is_grid() const { return backend_->is_grid(); }

Complex WaveFunction::amplitude(double t, std::span<double const> x) const {
  if (x.size() != particle_count()) throw ValidationError("amplitude: wrong configuration size");
  return backend_->local(t, x, 0).psi;
}

double WaveFunction::current_into(double t, std::span<double const> x, std::span<double> current) const {
  if (x.size() != particle_count() || current.size() != particle_count()) {
    throw ValidationError("current: wrong configuration size");
  }
  return backend_->current_into(t, x, current);
}

LocalValue WaveFunction::local(double t, std::span<double const> x, bool with_second) const {
  if (x.size() != particle_count()) throw ValidationError("local: wrong configuration size");
  return backend_->local(t, x, with_second ? 2 : 1);
}

double WaveFunction::norm(double t) const { return backend_->norm(t); }

double WaveFunction::peak_density(double t) const { return backend_->peak_density(t); }

std::vector<Interval> WaveFunction::support(double t) const { return backend_->support(t); }

std::vector<double> WaveFunction::marginal_bin_probabilities(std::size_t axis, double t, double lo,
                                                             double hi, std::size_t bins) const {
  if (axis >= particle_count()) throw ValidationError("marginal: axis out of range");
  if (bins == 0 || !(hi > lo)) throw ValidationError("marginal: bad binning");
  return backend_->marginal_bin_probabilities(axis, t, lo, hi, bins);
}

}  // namespace bohm::nr
