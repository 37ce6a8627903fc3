#include <gtest/gtest.h>

#include <algorithm>
#include <limits>

#include "bohm/nolaw.hpp"
#include "fixtures.hpp"

using namespace bohm;
using namespace bohm::testing;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kSamples = 300;

FoliationFamily small_family() {
  Interval const params{-2.0, 3.0};
  return FoliationFamily({make_flat(0.0, {}, params), make_flat(0.5, {}, params), tanh_foliation(0.3, 1.0, params)},
                         params);
}

dirac::MultiTimeWaveFunction lopsided_pair() {
  auto const l = packet(-2.0, 1.0);
  auto const lm = packet(-2.0, -1.0);
  auto const r = packet(2.0, -1.0);
  auto const rp = packet(2.0, 1.0);
  dirac::MultiTimeWaveFunction const wf(
      {1.0, 1.0}, {dirac::Term{{1.0, 0.0}, {l, r}}, dirac::Term{{-0.5, 0.0}, {lm, rp}}});
  return wf.normalized_on_rest_leaf(-30.0, 30.0);
}

Event right_of_origin(std::size_t particle) { return Event::crosses(particle, {{0.9, 1.1}, {0.0, kInf}}); }

LowerProbEstimate synthetic(std::size_t hits, std::size_t samples) {
  FamilyTally t;
  t.labels = {"a", "b"};
  t.seeds = {1, 2};
  t.samples = samples;
  t.failures = {0, 0};
  t.hits = {{samples}, {hits}};
  return lower_probability(t, 0);
}

}  // namespace

TEST(Family, Validation) {
  EXPECT_THROW(FoliationFamily({}, {0.0, 1.0}), ValidationError);
  EXPECT_THROW(FoliationFamily({make_flat(0.1), make_flat(0.1)}, {0.0, 1.0}), ValidationError);
  auto const f = default_family();
  EXPECT_EQ(f.size(), 8u);
  auto labels = f.labels();
  std::sort(labels.begin(), labels.end());
  EXPECT_EQ(std::unique(labels.begin(), labels.end()), labels.end());
  for (auto const& m : f.members()) EXPECT_LE(validate_foliation(*m, 0.95, 0.05, 5), 0.8);
  EXPECT_EQ(f.without_last().size(), 7u);
}

TEST(PStar, BoundaryEventsAreExact) {
  auto const wf = single_packet(0.0, 0.0);
  EXPECT_EQ(p_star(Event::always(), small_family(), wf, kSamples, 1).value, 1.0);
  EXPECT_EQ(p_star(Event::never(), small_family(), wf, kSamples, 1).value, 0.0);
}

TEST(PStar, MatchesExhaustivePerFoliationRuns) {
  auto const wf = lopsided_pair();
  auto const family = small_family();
  auto const event = right_of_origin(1);
  auto const est = p_star(event, family, wf, kSamples, 77);
  double smallest = 2.0;
  std::string arg;
  for (auto const& f : family.members()) {
    auto const run = run_ensemble(wf, f, family.params().lo, family.params().hi, kSamples,
                                  foliation_seed(77, f->label()));
    double const p = estimate_event_prob(event, run).estimate;
    if (p < smallest) {
      smallest = p;
      arg = f->label();
    }
  }
  EXPECT_EQ(est.value, smallest);
  EXPECT_EQ(est.argmin, arg);
  for (auto const& e : est.per_foliation) EXPECT_LE(est.value, e.interval.estimate);
  EXPECT_GT(est.value, 0.0);
  EXPECT_LT(est.value, 1.0);
}

TEST(PStarPrime, LabelBlindAndLabelAwarePredicates) {
  auto const wf = single_packet(0.0, 0.0);
  auto const family = small_family();
  auto const event = right_of_origin(0);
  EXPECT_EQ(p_star_prime(label_blind(event), family, wf, kSamples, 3).value,
            p_star(event, family, wf, kSamples, 3).value);
  std::string const rest = family.members().front()->label();
  auto const only_rest = [rest](std::string const& label, WorldLines const&) { return label == rest; };
  auto const not_rest = [rest](std::string const& label, WorldLines const&) { return label != rest; };
  auto const a = p_star_prime(only_rest, family, wf, kSamples, 3);
  auto const b = p_star_prime(not_rest, family, wf, kSamples, 3);
  EXPECT_EQ(a.value, 0.0);
  EXPECT_EQ(b.value, 0.0);
  EXPECT_EQ(b.argmin, rest);
}

TEST(Typicality, ThresholdsAndWording) {
  auto const strong = synthetic(100000, 100000);
  auto const v = is_typical(strong, 0.01);
  EXPECT_TRUE(v.typical);
  EXPECT_NE(v.text.find("Cournot's principle"), std::string::npos);
  auto const weak = synthetic(960, 1000);
  EXPECT_LT(weak.lower_bound, 0.96);
  EXPECT_FALSE(is_typical(weak, 0.01).typical);
  EXPECT_THROW(is_typical(strong, 0.0), ValidationError);
  EXPECT_THROW(is_typical(strong, 1.0), ValidationError);
}

TEST(PMu, WeightsAndOrdering) {
  auto const wf = lopsided_pair();
  auto const family = small_family();
  auto const tally = tally_family({label_blind(right_of_origin(1))}, family, wf, kSamples, 5);
  auto const star = lower_probability(tally, 0);
  for (std::size_t k = 0; k < family.size(); ++k) {
    std::vector<double> w(family.size(), 0.0);
    w[k] = 1.0;
    EXPECT_DOUBLE_EQ(p_mu(tally, 0, w), star.per_foliation[k].interval.estimate);
    EXPECT_LE(star.value, p_mu(tally, 0, w));
  }
  std::vector<double> const uniform(family.size(), 1.0 / static_cast<double>(family.size()));
  double mean = 0.0;
  for (auto const& e : star.per_foliation) mean += e.interval.estimate / static_cast<double>(family.size());
  EXPECT_NEAR(p_mu(tally, 0, uniform), mean, 1e-15);
  EXPECT_THROW(p_mu(tally, 0, {0.5, 0.6, -0.1}), ValidationError);
  EXPECT_THROW(p_mu(tally, 0, {0.5, 0.4, 0.0}), ValidationError);
  EXPECT_THROW(p_mu(tally, 0, {1.0}), ValidationError);
}

TEST(Capacity, PropertiesHoldExactly) {
  auto const wf = single_packet(0.0, 0.0);
  auto const r = check_capacity_properties(small_family(), wf, kSamples, 9, default_capacity_events());
  for (auto const& c : r.checks) EXPECT_TRUE(c.pass) << c.name << ": " << c.detail;
  EXPECT_TRUE(r.all_pass());
  EXPECT_GE(r.checks.size(), 9u);
}

TEST(Capacity, GrowingTheFamilyNeverRaisesPStar) {
  auto const wf = lopsided_pair();
  auto const base = small_family();
  auto const bigger = base.with(make_flat(-0.5, {}, base.params()));
  auto const event = right_of_origin(1);
  EXPECT_LE(p_star(event, bigger, wf, kSamples, 4).value, p_star(event, base, wf, kSamples, 4).value);
}

TEST(Covariance, IdentityAndTranslation) {
  auto const wf = single_packet(0.0, 0.0);
  Interval const params{-2.0, 3.0};
  FoliationFamily const family({make_flat(0.0, {}, params), make_flat(0.3, {}, params)}, params);
  auto const event = right_of_origin(0);
  auto const same = covariance_p_star(event, family, wf, PoincareTransform::identity(), kSamples, 8);
  EXPECT_EQ(same.original.value, same.transformed.value);
  EXPECT_TRUE(same.overlap);
  auto const moved = covariance_p_star(event, family, wf, PoincareTransform::translate(0.5, 1.0), kSamples, 8);
  EXPECT_TRUE(moved.overlap);
}
