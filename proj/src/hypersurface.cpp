#include "bohm/hypersurface.hpp"

#include <algorithm>
#include <cmath>

#include "bohm/stats.hpp"

namespace bohm {

namespace {

LeafBilinears finish(dirac::Bilinears&& b) {
  LeafBilinears out;
  out.rho = (b.rho < 0.0 && b.rho >= -1e-12) ? 0.0 : b.rho;
  out.currents = std::move(b.currents);
  return out;
}

}  // namespace

LeafBilinears leaf_bilinears(dirac::MultiTimeWaveFunction const& wf, Leaf const& leaf,
                             std::span<SpacePoint const> config, bool with_currents) {
  if (config.size() != wf.particle_count()) throw ValidationError("leaf_bilinears: wrong particle count");
  std::vector<Vec2> normals(config.size());
  for (std::size_t i = 0; i < config.size(); ++i) {
    if (!leaf.contains(config[i])) throw ValidationError("leaf_bilinears: point is not on the leaf");
    normals[i] = leaf.normal(config[i].x);
  }
  return finish(dirac::hypersurface_bilinears(wf.evaluate(config), normals, with_currents));
}

double rho_sigma(dirac::MultiTimeWaveFunction const& wf, Leaf const& leaf,
                 std::span<SpacePoint const> config) {
  return leaf_bilinears(wf, leaf, config, false).rho;
}

Vec2 current_i_sigma(dirac::MultiTimeWaveFunction const& wf, Leaf const& leaf,
                     std::span<SpacePoint const> config, std::size_t i) {
  if (i >= wf.particle_count()) throw ValidationError("current_i_sigma: particle index out of range");
  return leaf_bilinears(wf, leaf, config, true).currents[i];
}

LeafBilinears foliation_bilinears(dirac::MultiTimeWaveFunction const& wf, Foliation const& f,
                                  std::span<SpacePoint const> config, bool with_currents) {
  std::vector<Vec2> normals(config.size());
  for (std::size_t i = 0; i < config.size(); ++i) normals[i] = f.normal_at(config[i]);
  return finish(dirac::hypersurface_bilinears(wf.evaluate(config), normals, with_currents));
}

LeafFactorTable::LeafFactorTable(dirac::MultiTimeWaveFunction const& wf, Leaf const& leaf,
                                 std::vector<double> xs)
    : xs_(std::move(xs)), terms_(wf.terms().size()), particles_(wf.particle_count()) {
  for (auto const& t : wf.terms()) coefficients_.push_back(t.coefficient);
  table_.resize(particles_ * xs_.size() * terms_ * terms_);
  std::vector<dirac::Spinor> phi(terms_);
  std::vector<dirac::Spinor> bphi(terms_);
  for (std::size_t i = 0; i < particles_; ++i) {
    for (std::size_t q = 0; q < xs_.size(); ++q) {
      double const x = xs_[q];
      SpacePoint const p = leaf.point(x);
      Vec2 const n = leaf.normal(x);
      double const dl = leaf.foliation->length_element(leaf.s, x);
      for (std::size_t a = 0; a < terms_; ++a) {
        phi[a] = wf.evaluate_factor(a, i, p);
        bphi[a] = {n.t * phi[a][0] - n.x * phi[a][1], -n.x * phi[a][0] + n.t * phi[a][1]};
      }
      for (std::size_t a = 0; a < terms_; ++a) {
        for (std::size_t b = 0; b < terms_; ++b) {
          table_[((i * xs_.size() + q) * terms_ + a) * terms_ + b] =
              dl * (std::conj(phi[a][0]) * bphi[b][0] + std::conj(phi[a][1]) * bphi[b][1]);
        }
      }
    }
  }
}

double LeafFactorTable::density(std::span<std::size_t const> q) const {
  Complex total{};
  for (std::size_t a = 0; a < terms_; ++a) {
    for (std::size_t b = 0; b < terms_; ++b) {
      Complex v = std::conj(coefficients_[a]) * coefficients_[b];
      for (std::size_t i = 0; i < particles_; ++i) v *= entry(i, q[i], a, b);
      total += v;
    }
  }
  return total.real();
}

std::vector<Complex> LeafFactorTable::integrals(std::span<double const> w) const {
  if (w.size() != xs_.size()) throw ValidationError("LeafFactorTable: weight count mismatch");
  std::size_t const k = terms_;
  std::vector<Complex> out(particles_ * k * k);
  for (std::size_t i = 0; i < particles_; ++i) {
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) {
        Complex s{};
        for (std::size_t q = 0; q < w.size(); ++q) s += w[q] * entry(i, q, a, b);
        out[(i * k + a) * k + b] = s;
      }
    }
  }
  return out;
}

std::vector<double> LeafFactorTable::marginals(std::size_t i, std::span<double const> weights) const {
  auto const ints = integrals(weights);
  std::vector<Complex> others(terms_ * terms_);
  for (std::size_t a = 0; a < terms_; ++a) {
    for (std::size_t b = 0; b < terms_; ++b) {
      Complex v = std::conj(coefficients_[a]) * coefficients_[b];
      for (std::size_t j = 0; j < particles_; ++j) {
        if (j != i) v *= ints[(j * terms_ + a) * terms_ + b];
      }
      others[a * terms_ + b] = v;
    }
  }
  std::vector<double> out(xs_.size());
  for (std::size_t q = 0; q < xs_.size(); ++q) {
    Complex total{};
    for (std::size_t a = 0; a < terms_; ++a) {
      for (std::size_t b = 0; b < terms_; ++b) total += others[a * terms_ + b] * entry(i, q, a, b);
    }
    out[q] = total.real();
  }
  return out;
}

double LeafFactorTable::integrate(std::span<double const> weights) const {
  auto const ints = integrals(weights);
  Complex total{};
  for (std::size_t a = 0; a < terms_; ++a) {
    for (std::size_t b = 0; b < terms_; ++b) {
      Complex v = std::conj(coefficients_[a]) * coefficients_[b];
      for (std::size_t i = 0; i < particles_; ++i) v *= ints[(i * terms_ + a) * terms_ + b];
      total += v;
    }
  }
  return total.real();
}

double LeafFactorTable::marginal(std::size_t i, std::size_t q, std::span<double const> weights) const {
  auto const ints = integrals(weights);
  Complex total{};
  for (std::size_t a = 0; a < terms_; ++a) {
    for (std::size_t b = 0; b < terms_; ++b) {
      Complex v = std::conj(coefficients_[a]) * coefficients_[b] * entry(i, q, a, b);
      for (std::size_t j = 0; j < particles_; ++j) {
        if (j != i) v *= ints[(j * terms_ + a) * terms_ + b];
      }
      total += v;
    }
  }
  return total.real();
}

NormalizationReport normalization(dirac::MultiTimeWaveFunction const& wf, Leaf const& leaf,
                                  Interval range, double step, double edge_threshold) {
  if (!(range.hi > range.lo) || !(step > 0.0)) throw ValidationError("normalization: bad quadrature grid");
  std::size_t points = static_cast<std::size_t>(std::ceil(range.length() / step)) + 1;
  if (points % 2 == 0) ++points;
  double const h = range.length() / static_cast<double>(points - 1);
  std::vector<double> xs(points);
  for (std::size_t q = 0; q < points; ++q) xs[q] = range.lo + h * static_cast<double>(q);
  auto const w = simpson_weights(points, h);
  LeafFactorTable const table(wf, leaf, std::move(xs));
  NormalizationReport r;
  r.value = table.integrate(w);
  for (std::size_t i = 0; i < wf.particle_count(); ++i) {
    r.edge_density = std::max({r.edge_density, table.marginal(i, 0, w), table.marginal(i, points - 1, w)});
  }
  r.covered = r.edge_density <= edge_threshold;
  return r;
}

}  // namespace bohm
