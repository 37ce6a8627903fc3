#pragma once

// The no-law model: lower probabilities over a finite family of foliations.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bohm/ensemble.hpp"
#include "bohm/events.hpp"
#include "bohm/foliation.hpp"
#include "bohm/poincare.hpp"
#include "bohm/stats.hpp"

namespace bohm {

/// A finite list of foliations sharing one leaf-parameter range. No weights
/// are ever attached to it.
class FoliationFamily {
 public:
  FoliationFamily(std::vector<FoliationPtr> members, Interval params);

  std::vector<FoliationPtr> const& members() const { return members_; }
  Interval params() const { return params_; }
  std::size_t size() const { return members_.size(); }
  std::vector<std::string> labels() const;

  FoliationFamily with(FoliationPtr extra) const;
  FoliationFamily without_last() const;
  FoliationFamily transformed(PoincareTransform const& g) const;

 private:
  std::vector<FoliationPtr> members_;
  Interval params_;
};

/// Flat(0), Flat(+-0.3), Flat(+-0.6), two tanh-curved and one sine-curved
/// foliation over `params`.
FoliationFamily default_family(Interval params = {-5.0, 5.0});

/// Predicate on (foliation label, trajectory) pairs.
using PairPredicate = std::function<bool(std::string const& label, WorldLines const& lines)>;

PairPredicate label_blind(Event event);

/// Hit counts of several predicates on one shared ensemble per foliation.
struct FamilyTally {
  std::vector<std::string> labels;
  std::vector<std::uint64_t> seeds;              ///< per-foliation stream seeds
  std::size_t samples = 0;
  std::vector<std::size_t> failures;             ///< [foliation]
  std::vector<std::vector<std::size_t>> hits;    ///< [foliation][predicate]

  std::size_t predicates() const { return hits.empty() ? 0 : hits.front().size(); }
};

/// Seed of the ensemble belonging to `label`.
std::uint64_t foliation_seed(std::uint64_t seed, std::string const& label);

/// Runs one equilibrium ensemble per member (sampled on the first leaf,
/// integrated to the last) and evaluates every predicate on it. Failed
/// trajectories stay in the denominator.
FamilyTally tally_family(std::vector<PairPredicate> const& predicates, FoliationFamily const& family,
                         dirac::MultiTimeWaveFunction const& wf, std::size_t samples, std::uint64_t seed,
                         EnsembleOptions const& options = {});

struct FoliationEstimate {
  std::string label;
  std::size_t hits = 0;
  std::size_t samples = 0;
  std::size_t failures = 0;
  ProportionInterval interval;
};

struct LowerProbEstimate {
  std::vector<FoliationEstimate> per_foliation;
  double value = 0.0;       ///< min over the family
  std::string argmin;
  double lower_bound = 0.0; ///< min of the per-foliation Wilson lower bounds
  double upper_bound = 0.0; ///< Wilson upper bound of the arg-min foliation
};

/// Minimum over the family of predicate `index`. Ties keep the first member.
LowerProbEstimate lower_probability(FamilyTally const& tally, std::size_t index);

LowerProbEstimate p_star(Event const& event, FoliationFamily const& family, dirac::MultiTimeWaveFunction const& wf,
                         std::size_t samples, std::uint64_t seed, EnsembleOptions const& options = {});

LowerProbEstimate p_star_prime(PairPredicate const& predicate, FoliationFamily const& family,
                               dirac::MultiTimeWaveFunction const& wf, std::size_t samples, std::uint64_t seed,
                               EnsembleOptions const& options = {});

/// Weighted average of the per-foliation estimates of predicate `index`.
/// Throws ValidationError unless the weights are non-negative and sum to 1.
double p_mu(FamilyTally const& tally, std::size_t index, std::vector<double> const& weights);

double p_mu(Event const& event, FoliationFamily const& family, std::vector<double> const& weights,
            dirac::MultiTimeWaveFunction const& wf, std::size_t samples, std::uint64_t seed,
            EnsembleOptions const& options = {});

struct TypicalityVerdict {
  bool typical = false;
  double epsilon = 0.0;
  double lower_bound = 0.0;
  std::string text;
};

TypicalityVerdict is_typical(LowerProbEstimate const& estimate, double epsilon = 0.02);

struct CapacityEvents {
  Event a;  ///< a and b must be structurally disjoint
  Event b;
  Event c;  ///< c must imply d
  Event d;
};

/// Left/right half-lines of particle 0 at time t, and a tight rectangle inside
/// an enclosing one.
CapacityEvents default_capacity_events(double t = 1.0);

struct PropertyCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct CapacityReport {
  FamilyTally tally;  ///< predicates: empty, whole, a, b, a|b, a&b, c, d
  std::vector<PropertyCheck> checks;

  bool all_pass() const;
};

/// Checks, exactly on shared samples, P*(empty)=0, P*(whole)=1, monotonicity,
/// superadditivity on a/b, P* <= P_mu for point-mass, uniform and skewed
/// weights, and that dropping the last family member never lowers P*.
CapacityReport check_capacity_properties(FoliationFamily const& family, dirac::MultiTimeWaveFunction const& wf,
                                         std::size_t samples, std::uint64_t seed, CapacityEvents const& events,
                                         EnsembleOptions const& options = {});

struct CovarianceComparison {
  LowerProbEstimate original;     ///< event, psi, family
  LowerProbEstimate transformed;  ///< g event, U_g psi, g family
  bool overlap = false;           ///< Wilson intervals of the two minima overlap
};

CovarianceComparison covariance_p_star(Event const& event, FoliationFamily const& family,
                                       dirac::MultiTimeWaveFunction const& wf, PoincareTransform const& g,
                                       std::size_t samples, std::uint64_t seed,
                                       EnsembleOptions const& options = {});

}  // namespace bohm
