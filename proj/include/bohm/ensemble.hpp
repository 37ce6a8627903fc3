#pragma once

// Monte Carlo ensembles of relativistic trajectories: sampling from
// rho_Sigma, propagation along a foliation, distribution checks on leaves
// and event probabilities.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bohm/dirac.hpp"
#include "bohm/events.hpp"
#include "bohm/foliation.hpp"
#include "bohm/hbd.hpp"
#include "bohm/stats.hpp"

namespace bohm {

struct SamplerOptions {
  Interval window{-30.0, 30.0};  ///< per-particle search region on the leaf
  double scan_step = 0.0;        ///< envelope scan spacing; 0 picks one from N
  double safety = 1.5;           ///< envelope = safety * scanned maximum
};

/// Rejection sampler for rho_Sigma with the proper-length measure on one
/// leaf. Proposals are uniform over a box trimmed to where the single-particle
/// marginals are non-negligible; the envelope comes from a grid scan.
class LeafSampler {
 public:
  LeafSampler(dirac::MultiTimeWaveFunction wf, Leaf leaf, SamplerOptions const& options = {});

  /// Configuration number `index` of the stream `seed`. Throws EnvelopeError
  /// if the density exceeds the envelope at a proposal.
  std::vector<SpacePoint> draw(std::uint64_t seed, std::uint64_t index) const;

  /// rho_Sigma times the length elements at leaf coordinates xs.
  double density(std::span<double const> xs) const;

  std::vector<Interval> const& box() const { return box_; }
  double envelope() const { return envelope_; }
  Leaf const& leaf() const { return leaf_; }

 private:
  dirac::MultiTimeWaveFunction wf_;
  Leaf leaf_;
  std::vector<Interval> box_;
  double envelope_ = 0.0;
};

std::vector<std::vector<SpacePoint>> sample_on_leaf(dirac::MultiTimeWaveFunction const& wf, Leaf const& leaf,
                                                    std::size_t count, std::uint64_t seed,
                                                    SamplerOptions const& options = {}, unsigned threads = 0);

struct EnsembleOptions {
  double ds = 0.02;
  HbdOptions hbd;
  SamplerOptions sampler;
  double failure_budget = 0.01;  ///< fraction of failed trajectories tolerated
  unsigned threads = 0;          ///< 0: default_thread_count()
};

struct EnsembleRun {
  std::string foliation_label;
  double s0 = 0.0;
  double s1 = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<WorldLines> trajectories;
  std::size_t failures = 0;
};

/// Samples `count` configurations on leaf s0 of F and integrates each to s1.
/// `visit(index, lines)` runs concurrently for distinct indices; it must only
/// write to per-index storage. Returns the number of failed trajectories and
/// throws NumericalBudgetError when it exceeds the failure budget.
std::size_t propagate_ensemble(dirac::MultiTimeWaveFunction const& wf, FoliationPtr const& foliation,
                               double s0, double s1, std::size_t count, std::uint64_t seed,
                               EnsembleOptions const& options,
                               std::function<void(std::size_t, WorldLines const&)> const& visit);

EnsembleRun run_ensemble(dirac::MultiTimeWaveFunction const& wf, FoliationPtr const& foliation, double s0,
                         double s1, std::size_t count, std::uint64_t seed, EnsembleOptions const& options = {});

/// Exact single-particle marginal bin probabilities of rho_Sigma on a leaf;
/// the other particles are integrated over `window`.
std::vector<double> leaf_marginal_bins(dirac::MultiTimeWaveFunction const& wf, Leaf const& leaf,
                                       std::size_t particle, Interval range, std::size_t bins,
                                       Interval window = {-30.0, 30.0});

/// Exact joint bin probabilities of a two-particle rho_Sigma, row-major
/// [bin of particle 0][bin of particle 1].
std::vector<double> leaf_joint_bins(dirac::MultiTimeWaveFunction const& wf, Leaf const& leaf,
                                    Interval range0, Interval range1, std::size_t bins);

/// Region holding all but `tail` of each marginal's mass on the leaf.
std::vector<Interval> leaf_support(dirac::MultiTimeWaveFunction const& wf, Leaf const& leaf,
                                   Interval window = {-30.0, 30.0}, double tail = 1e-4);

struct DistanceReport {
  std::vector<double> l1;  ///< per particle, or a single joint entry
  std::size_t bins = 0;
  std::size_t cells = 0;
  std::size_t samples = 0;
  std::size_t failures = 0;
  double noise_floor = 0.0;
  std::vector<Interval> ranges;
  std::vector<std::vector<std::size_t>> counts;
  std::vector<std::vector<double>> expected;

  double max_l1() const;
};

/// Samples on leaf s0, integrates to leaf s1 and compares the empirical
/// marginals on leaf s1 with the exact ones. Failed trajectories count as
/// out-of-range mass.
DistanceReport equivariance_rel(dirac::MultiTimeWaveFunction const& wf, FoliationPtr const& foliation,
                                double s0, double s1, std::size_t count, std::size_t bins, std::uint64_t seed,
                                EnsembleOptions const& options = {});

struct CrossFoliationReport {
  DistanceReport baseline;  ///< crossings with leaf s_baseline of F against its rho
  DistanceReport cross;     ///< crossings with leaf s_prime of F' against its rho
  double ratio = 0.0;       ///< cross / baseline (joint L1)
};

/// Equilibrium ensemble prepared on leaf s0 of F and propagated under F to
/// s1; its crossings with leaf s_prime of F' are compared with rho on that
/// leaf, using the joint distribution for two particles and the marginal for
/// one. The baseline uses leaf s_baseline of F itself.
CrossFoliationReport cross_foliation_test(dirac::MultiTimeWaveFunction const& wf, FoliationPtr const& f,
                                          FoliationPtr const& f_prime, double s0, double s1, double s_baseline,
                                          double s_prime, std::size_t count, std::size_t bins,
                                          std::uint64_t seed, EnsembleOptions const& options = {});

/// Fraction of trajectories (failures included in the denominator, judged on
/// their partial world lines) satisfying the event, with a Wilson 95% interval.
ProportionInterval estimate_event_prob(Event const& event, EnsembleRun const& run);

}  // namespace bohm
