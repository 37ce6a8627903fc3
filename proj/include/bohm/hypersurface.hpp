#pragma once

// Densities and currents of a multi-time Dirac wave function on a leaf.

#include <span>
#include <vector>

#include "bohm/dirac.hpp"
#include "bohm/foliation.hpp"

namespace bohm {

struct LeafBilinears {
  double rho = 0.0;
  std::vector<Vec2> currents;
};

/// rho_Sigma and the currents j_iSigma at a configuration on `leaf`. Throws
/// ValidationError for a point off the leaf (|T(x) - t| > 1e-9). Negative
/// round-off in rho down to -1e-12 is clamped to zero.
LeafBilinears leaf_bilinears(dirac::MultiTimeWaveFunction const& wf, Leaf const& leaf,
                             std::span<SpacePoint const> config, bool with_currents = true);

double rho_sigma(dirac::MultiTimeWaveFunction const& wf, Leaf const& leaf,
                 std::span<SpacePoint const> config);

Vec2 current_i_sigma(dirac::MultiTimeWaveFunction const& wf, Leaf const& leaf,
                     std::span<SpacePoint const> config, std::size_t i);

/// Same quantities with the normal taken from the foliation at each point,
/// without the on-leaf check. Used by the integrator.
LeafBilinears foliation_bilinears(dirac::MultiTimeWaveFunction const& wf, Foliation const& f,
                                  std::span<SpacePoint const> config, bool with_currents = true);

/// Single-particle bilinear tables along a leaf:
///   entry(i, q, a, b) = phi_ai(x_q)^dagger gamma0 (gamma.n(x_q)) phi_bi(x_q) * dl/dx(x_q)
/// with phi_ai the factor of particle i in term a. rho_Sigma on the leaf is
/// Re sum_ab conj(c_a) c_b prod_i entry(i, q_i, a, b) / prod_i dl/dx, so
/// quadratures over the leaf factorize exactly.
class LeafFactorTable {
 public:
  LeafFactorTable(dirac::MultiTimeWaveFunction const& wf, Leaf const& leaf, std::vector<double> xs);

  std::vector<double> const& xs() const { return xs_; }
  std::size_t terms() const { return terms_; }
  std::size_t particles() const { return particles_; }

  Complex entry(std::size_t i, std::size_t q, std::size_t a, std::size_t b) const {
    return table_[((i * xs_.size() + q) * terms_ + a) * terms_ + b];
  }

  Complex coefficient(std::size_t a) const { return coefficients_[a]; }

  /// Weighted sums over the nodes of every entry, laid out [i][a][b].
  std::vector<Complex> integrals(std::span<double const> weights) const;

  /// Density (including the length elements) at grid configuration q.
  double density(std::span<std::size_t const> q) const;

  /// Integral over the grid with per-node weights: the factorized sum.
  double integrate(std::span<double const> weights) const;

  /// Marginal density of particle i at node q, integrating the others with
  /// `weights`.
  double marginal(std::size_t i, std::size_t q, std::span<double const> weights) const;

  /// marginal(i, q, weights) for every node q.
  std::vector<double> marginals(std::size_t i, std::span<double const> weights) const;

 private:
  std::vector<double> xs_;
  std::size_t terms_;
  std::size_t particles_;
  std::vector<Complex> coefficients_;
  std::vector<Complex> table_;
};

struct NormalizationReport {
  double value = 0.0;
  double edge_density = 0.0;  ///< largest single-particle marginal at the grid ends
  bool covered = true;        ///< edge_density below the threshold
};

/// Integral of rho_Sigma over [range]^N on `leaf` with the proper-length
/// measure, by composite Simpson quadrature with the given step.
NormalizationReport normalization(dirac::MultiTimeWaveFunction const& wf, Leaf const& leaf,
                                  Interval range = {-20.0, 20.0}, double step = 0.01,
                                  double edge_threshold = 1e-6);

}  // namespace bohm
