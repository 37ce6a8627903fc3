#include "bohm/nolaw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "bohm/rng.hpp"

namespace bohm {

FoliationFamily::FoliationFamily(std::vector<FoliationPtr> members, Interval params)
    : members_(std::move(members)), params_(params) {
  if (members_.empty()) throw ValidationError("foliation family: empty");
  if (!(params_.hi >= params_.lo)) throw ValidationError("foliation family: bad parameter range");
  std::set<std::string> seen;
  for (auto const& f : members_) {
    if (!f) throw ValidationError("foliation family: null member");
    if (!seen.insert(f->label()).second) throw ValidationError("foliation family: duplicate label " + f->label());
  }
}

std::vector<std::string> FoliationFamily::labels() const {
  std::vector<std::string> out;
  for (auto const& f : members_) out.push_back(f->label());
  return out;
}

FoliationFamily FoliationFamily::with(FoliationPtr extra) const {
  auto m = members_;
  m.push_back(std::move(extra));
  return FoliationFamily(std::move(m), params_);
}

FoliationFamily FoliationFamily::without_last() const {
  if (members_.size() < 2) throw ValidationError("foliation family: cannot drop the only member");
  return FoliationFamily({members_.begin(), members_.end() - 1}, params_);
}

FoliationFamily FoliationFamily::transformed(PoincareTransform const& g) const {
  std::vector<FoliationPtr> m;
  for (auto const& f : members_) m.push_back(transform_foliation(g, f));
  return FoliationFamily(std::move(m), params_);
}

FoliationFamily default_family(Interval params) {
  std::vector<FoliationPtr> m;
  for (double v : {0.0, 0.3, -0.3, 0.6, -0.6}) m.push_back(make_flat(v, {}, params));
  CurveShape a;
  a.amplitude = 0.3;
  a.width = 1.0;
  CurveShape b;
  b.amplitude = -0.4;
  b.center = 1.0;
  b.width = 1.5;
  CurveShape c;
  c.type = CurveShape::Type::Sine;
  c.amplitude = 0.2;
  c.frequency = 1.0;
  for (auto const& shape : {a, b, c}) m.push_back(make_curved(shape, {}, params));
  return FoliationFamily(std::move(m), params);
}

PairPredicate label_blind(Event event) {
  return [event = std::move(event)](std::string const&, WorldLines const& lines) { return event.evaluate(lines); };
}

std::uint64_t foliation_seed(std::uint64_t seed, std::string const& label) {
  return mix_seed(seed, fnv1a64(label));
}

FamilyTally tally_family(std::vector<PairPredicate> const& predicates, FoliationFamily const& family,
                         dirac::MultiTimeWaveFunction const& wf, std::size_t samples, std::uint64_t seed,
                         EnsembleOptions const& options) {
  if (samples < 100) throw ValidationError("p_star: need at least 100 samples per foliation");
  if (predicates.empty()) throw ValidationError("p_star: no events");
  FamilyTally tally;
  tally.samples = samples;
  Interval const s = family.params();
  for (auto const& f : family.members()) {
    std::string const label = f->label();
    std::uint64_t const fseed = foliation_seed(seed, label);
    std::vector<std::vector<char>> bits(samples, std::vector<char>(predicates.size(), 0));
    std::vector<char> failed(samples, 0);
    propagate_ensemble(wf, f, s.lo, s.hi, samples, fseed, options, [&](std::size_t j, WorldLines const& w) {
      failed[j] = w.valid ? 0 : 1;
      for (std::size_t e = 0; e < predicates.size(); ++e) bits[j][e] = predicates[e](label, w) ? 1 : 0;
    });
    std::size_t const failures = static_cast<std::size_t>(std::count(failed.begin(), failed.end(), 1));
    if (failures == samples) throw NumericalBudgetError("p_star: every trajectory failed on " + label);
    std::vector<std::size_t> hits(predicates.size(), 0);
    for (auto const& row : bits) {
      for (std::size_t e = 0; e < row.size(); ++e) hits[e] += static_cast<std::size_t>(row[e]);
    }
    tally.labels.push_back(label);
    tally.seeds.push_back(fseed);
    tally.failures.push_back(failures);
    tally.hits.push_back(std::move(hits));
  }
  return tally;
}

LowerProbEstimate lower_probability(FamilyTally const& tally, std::size_t index) {
  if (tally.hits.empty() || index >= tally.predicates()) throw ValidationError("lower_probability: bad index");
  LowerProbEstimate r;
  r.value = std::numeric_limits<double>::infinity();
  r.lower_bound = 1.0;
  for (std::size_t k = 0; k < tally.labels.size(); ++k) {
    FoliationEstimate e;
    e.label = tally.labels[k];
    e.hits = tally.hits[k][index];
    e.samples = tally.samples;
    e.failures = tally.failures[k];
    e.interval = wilson_interval(e.hits, e.samples);
    r.lower_bound = std::min(r.lower_bound, e.interval.lower);
    if (e.interval.estimate < r.value) {
      r.value = e.interval.estimate;
      r.argmin = e.label;
      r.upper_bound = e.interval.upper;
    }
    r.per_foliation.push_back(std::move(e));
  }
  return r;
}

LowerProbEstimate p_star(Event const& event, FoliationFamily const& family, dirac::MultiTimeWaveFunction const& wf,
                         std::size_t samples, std::uint64_t seed, EnsembleOptions const& options) {
  return lower_probability(tally_family({label_blind(event)}, family, wf, samples, seed, options), 0);
}

LowerProbEstimate p_star_prime(PairPredicate const& predicate, FoliationFamily const& family,
                               dirac::MultiTimeWaveFunction const& wf, std::size_t samples, std::uint64_t seed,
                               EnsembleOptions const& options) {
  return lower_probability(tally_family({predicate}, family, wf, samples, seed, options), 0);
}

double p_mu(FamilyTally const& tally, std::size_t index, std::vector<double> const& weights) {
  if (weights.size() != tally.labels.size()) throw ValidationError("p_mu: one weight per foliation required");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ValidationError("p_mu: weights must be non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("p_mu: weights must sum to 1");
  if (index >= tally.predicates()) throw ValidationError("p_mu: bad index");
  double p = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    p += weights[k] * static_cast<double>(tally.hits[k][index]) / static_cast<double>(tally.samples);
  }
  return p / sum;
}

double p_mu(Event const& event, FoliationFamily const& family, std::vector<double> const& weights,
            dirac::MultiTimeWaveFunction const& wf, std::size_t samples, std::uint64_t seed,
            EnsembleOptions const& options) {
  if (weights.size() != family.size()) throw ValidationError("p_mu: one weight per foliation required");
  return p_mu(tally_family({label_blind(event)}, family, wf, samples, seed, options), 0, weights);
}

TypicalityVerdict is_typical(LowerProbEstimate const& estimate, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ValidationError("is_typical: epsilon must lie in (0, 1)");
  TypicalityVerdict v;
  v.epsilon = epsilon;
  v.lower_bound = estimate.lower_bound;
  v.typical = estimate.lower_bound >= 1.0 - epsilon;
  std::ostringstream os;
  os << "lower bound " << estimate.lower_bound << (v.typical ? " >= " : " < ") << 1.0 - epsilon
     << " over " << estimate.per_foliation.size() << " foliations (weakest: " << estimate.argmin << "); ";
  if (v.typical) {
    os << "the set is typical, so according to Cournot's principle the realized trajectory can be expected "
          "to lie in it";
  } else {
    os << "the set is not typical, so Cournot's principle licenses no prediction from it";
  }
  v.text = os.str();
  return v;
}

CapacityEvents default_capacity_events(double t) {
  double const inf = std::numeric_limits<double>::infinity();
  return CapacityEvents{
      Event::crosses(0, {{t, t}, {-inf, 0.0}}),
      Event::crosses(0, {{t, t}, {0.0, inf}}),
      Event::crosses(0, {{t - 0.1, t + 0.1}, {-0.5, 0.5}}),
      Event::crosses(0, {{t - 0.2, t + 0.2}, {-1.0, 1.0}}),
  };
}

bool CapacityReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](PropertyCheck const& c) { return c.pass; });
}

namespace {

enum CapacityIndex : std::size_t { kEmpty, kWhole, kA, kB, kAorB, kAandB, kC, kD, kCapacityPredicates };

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

CapacityReport check_capacity_properties(FoliationFamily const& family, dirac::MultiTimeWaveFunction const& wf,
                                         std::size_t samples, std::uint64_t seed, CapacityEvents const& events,
                                         EnsembleOptions const& options) {
  std::vector<PairPredicate> preds(kCapacityPredicates);
  preds[kEmpty] = label_blind(Event::never());
  preds[kWhole] = label_blind(Event::always());
  preds[kA] = label_blind(events.a);
  preds[kB] = label_blind(events.b);
  preds[kAorB] = label_blind(events.a || events.b);
  preds[kAandB] = label_blind(events.a && events.b);
  preds[kC] = label_blind(events.c);
  preds[kD] = label_blind(events.d);

  CapacityReport r;
  r.tally = tally_family(preds, family, wf, samples, seed, options);
  auto const star = [&](std::size_t i) { return lower_probability(r.tally, i).value; };
  auto const add = [&](std::string name, bool pass, std::string detail) {
    r.checks.push_back({std::move(name), pass, std::move(detail)});
  };

  add("empty_is_zero", star(kEmpty) == 0.0, "P*(empty)=" + num(star(kEmpty)));
  add("whole_is_one", star(kWhole) == 1.0, "P*(whole)=" + num(star(kWhole)));

  bool disjoint = true;
  bool nested = true;
  for (auto const& h : r.tally.hits) {
    disjoint = disjoint && h[kAandB] == 0 && h[kAorB] == h[kA] + h[kB];
    nested = nested && h[kC] <= h[kD];
  }
  add("monotone", nested && star(kC) <= star(kD),
      "P*(C)=" + num(star(kC)) + " <= P*(D)=" + num(star(kD)));
  add("disjoint_events", disjoint, "A and B share no trajectory on any foliation");
  add("superadditive", star(kAorB) >= star(kA) + star(kB),
      "P*(A|B)=" + num(star(kAorB)) + " >= P*(A)+P*(B)=" + num(star(kA) + star(kB)));

  std::size_t const n = r.tally.labels.size();
  std::vector<std::vector<double>> weights;
  std::vector<double> point(n, 0.0);
  point.back() = 1.0;
  weights.push_back(point);
  weights.emplace_back(n, 1.0 / static_cast<double>(n));
  std::vector<double> skew(n);
  std::iota(skew.begin(), skew.end(), 1.0);
  double const total = std::accumulate(skew.begin(), skew.end(), 0.0);
  for (double& w : skew) w /= total;
  weights.push_back(skew);
  char const* names[] = {"point_mass", "uniform", "skewed"};
  for (std::size_t w = 0; w < weights.size(); ++w) {
    bool ok = true;
    for (std::size_t i = 0; i < kCapacityPredicates; ++i) ok = ok && star(i) <= p_mu(r.tally, i, weights[w]) + 1e-12;
    add(std::string("below_p_mu_") + names[w], ok, "P* <= P_mu for every event");
  }

  if (n > 1) {
    FamilyTally smaller = r.tally;
    smaller.labels.pop_back();
    smaller.seeds.pop_back();
    smaller.failures.pop_back();
    smaller.hits.pop_back();
    bool ok = true;
    for (std::size_t i = 0; i < kCapacityPredicates; ++i) {
      ok = ok && lower_probability(smaller, i).value >= star(i);
    }
    add("family_growth", ok, "adding " + r.tally.labels.back() + " never raises P*");
  }
  return r;
}

CovarianceComparison covariance_p_star(Event const& event, FoliationFamily const& family,
                                       dirac::MultiTimeWaveFunction const& wf, PoincareTransform const& g,
                                       std::size_t samples, std::uint64_t seed, EnsembleOptions const& options) {
  CovarianceComparison c;
  c.original = p_star(event, family, wf, samples, seed, options);
  if (g.is_identity()) {
    c.transformed = c.original;
  } else {
    auto const moved = family.transformed(g);
    auto const image = dirac::apply_poincare(g, wf);
    c.transformed = p_star(event.transformed(g), moved, image, samples, seed, options);
  }
  auto const weakest = [](LowerProbEstimate const& e) {
    for (auto const& f : e.per_foliation) {
      if (f.label == e.argmin) return f.interval;
    }
    return ProportionInterval{};
  };
  auto const a = weakest(c.original);
  auto const b = weakest(c.transformed);
  c.overlap = std::max(a.lower, b.lower) <= std::min(a.upper, b.upper);
  return c;
}

}  // namespace bohm
