#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "bohm/ensemble.hpp"
#include "bohm/events.hpp"
#include "bohm/rng.hpp"
#include "fixtures.hpp"

using namespace bohm;
using namespace bohm::testing;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

WorldLines straight_line(SpacePoint a, SpacePoint b) {
  WorldLines w;
  w.params = {0.0, 1.0};
  w.crossings = {{a}, {b}};
  return w;
}

}  // namespace

TEST(Events, SegmentClipping) {
  Rectangle const r{{0.0, 1.0}, {0.0, 1.0}};
  EXPECT_TRUE(segment_meets({-1.0, 0.5}, {2.0, 0.5}, r));
  EXPECT_FALSE(segment_meets({-1.0, 2.0}, {2.0, 2.0}, r));
  // Closed in t.
  EXPECT_TRUE(segment_meets({1.0, 0.5}, {2.0, 0.5}, r));
  // Half-open in x: x = 1 excluded, x = 0 included.
  EXPECT_FALSE(segment_meets({0.0, 1.0}, {1.0, 1.0}, r));
  EXPECT_TRUE(segment_meets({0.0, 0.0}, {1.0, 0.0}, r));
  // Diagonal that passes by the corner.
  EXPECT_FALSE(segment_meets({1.5, 0.0}, {3.0, 1.5}, r));
  EXPECT_TRUE(segment_meets({-0.5, -0.5}, {0.5, 0.5}, r));
  // Unbounded in x.
  Rectangle const half{{0.0, 0.0}, {-kInf, 0.0}};
  EXPECT_TRUE(segment_meets({-1.0, -3.0}, {1.0, -3.0}, half));
  EXPECT_FALSE(segment_meets({-1.0, 0.0}, {1.0, 0.0}, half));
}

TEST(Events, BooleanAlgebra) {
  auto const w = straight_line({0.0, 0.0}, {2.0, 1.0});
  auto const a = Event::crosses(0, {{1.0, 1.0}, {0.0, 1.0}});
  auto const b = Event::crosses(0, {{1.0, 1.0}, {1.0, 2.0}});
  EXPECT_TRUE(a.evaluate(w));
  EXPECT_FALSE(b.evaluate(w));
  EXPECT_TRUE((a || b).evaluate(w));
  EXPECT_FALSE((a && b).evaluate(w));
  EXPECT_TRUE((!b).evaluate(w));
  EXPECT_TRUE(Event::always().evaluate(w));
  EXPECT_FALSE(Event::never().evaluate(w));
  EXPECT_THROW(Event::crosses(1, {{0.0, 1.0}, {0.0, 1.0}}).evaluate(w), ValidationError);
  EXPECT_THROW(Event::crosses(0, {{1.0, 0.0}, {0.0, 1.0}}), ValidationError);
}

TEST(Events, TransformedEventMatchesTransformedLines) {
  auto const w = straight_line({0.0, 0.0}, {2.0, 1.0});
  auto const a = Event::crosses(0, {{0.9, 1.1}, {0.4, 0.6}});
  auto const g = PoincareTransform::translate(0.5, 3.0);
  auto const moved = transform_worldlines(g, w);
  EXPECT_TRUE(a.transformed(g).evaluate(moved));
  EXPECT_FALSE(a.evaluate(moved));
  auto const boost = PoincareTransform::frame_boost(0.4);
  EXPECT_EQ(a.transformed(boost).evaluate(transform_worldlines(boost, w)), a.evaluate(w));
}

TEST(Rng, PhiloxKnownAnswers) {
  using Block = std::array<std::uint32_t, 4>;
  EXPECT_EQ(philox4x32({0, 0, 0, 0}, {0, 0}), (Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}),
            (Block{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Rng, StreamsAreIndependentOfEachOther) {
  CounterRng a(7, 0), b(7, 1), a2(7, 0);
  int same = 0;
  for (int i = 0; i < 64; ++i) {
    auto const x = a();
    same += x == b();
    EXPECT_EQ(x, a2());
  }
  EXPECT_EQ(same, 0);
}

TEST(Sampler, RestPacketMomentsAndHistogram) {
  auto const wf = single_packet(0.0, 0.0);
  Leaf const leaf{make_flat(0.0), 0.0};
  std::size_t const m = 4000;
  auto const xs = sample_on_leaf(wf, leaf, m, 11);
  double mean = 0.0;
  double sq = 0.0;
  for (auto const& c : xs) {
    EXPECT_DOUBLE_EQ(c[0].t, 0.0);
    mean += c[0].x;
    sq += c[0].x * c[0].x;
  }
  mean /= static_cast<double>(m);
  double const sd = std::sqrt(sq / static_cast<double>(m) - mean * mean);
  EXPECT_LT(std::abs(mean), 4.0 * sd / std::sqrt(static_cast<double>(m)));

  std::size_t const bins = 20;
  auto const range = leaf_support(wf, leaf)[0];
  Histogram h(range.lo, range.hi, bins);
  for (auto const& c : xs) h.add(c[0].x);
  auto const expected = leaf_marginal_bins(wf, leaf, 0, range, bins);
  EXPECT_NEAR(std::accumulate(expected.begin(), expected.end(), 0.0), 1.0, 1e-3);
  EXPECT_LE(h.l1_distance(expected), l1_noise_floor(bins, m));
}

TEST(Sampler, ReproducibleAndThreadIndependent) {
  auto const wf = entangled_pair(3.0, 1.0);
  Leaf const leaf{tanh_foliation(), 0.0};
  auto const a = sample_on_leaf(wf, leaf, 200, 5, {}, 1);
  auto const b = sample_on_leaf(wf, leaf, 200, 5, {}, 3);
  auto const c = sample_on_leaf(wf, leaf, 200, 6, {}, 1);
  ASSERT_EQ(a.size(), b.size());
  bool differs = false;
  for (std::size_t j = 0; j < a.size(); ++j) {
    for (std::size_t i = 0; i < 2; ++i) {
      EXPECT_EQ(a[j][i].x, b[j][i].x);
      EXPECT_EQ(a[j][i].t, b[j][i].t);
      differs = differs || a[j][i].x != c[j][i].x;
      EXPECT_TRUE(leaf.contains(a[j][i]));
    }
  }
  EXPECT_TRUE(differs);
}

TEST(Sampler, JointBinsAgreeWithMarginals) {
  auto const wf = entangled_pair(3.0, 1.0);
  Leaf const leaf{make_flat(0.3), 0.2};
  auto const ranges = leaf_support(wf, leaf, {-30.0, 30.0}, 1e-3);
  std::size_t const bins = 8;
  auto const joint = leaf_joint_bins(wf, leaf, ranges[0], ranges[1], bins);
  double const total = std::accumulate(joint.begin(), joint.end(), 0.0);
  EXPECT_GT(total, 0.99);
  EXPECT_LE(total, 1.0 + 1e-3);
  for (double p : joint) EXPECT_GE(p, -1e-9);
  auto const marginal = leaf_marginal_bins(wf, leaf, 0, ranges[0], bins);
  for (std::size_t u = 0; u < bins; ++u) {
    double row = 0.0;
    for (std::size_t v = 0; v < bins; ++v) row += joint[u * bins + v];
    EXPECT_LE(row, marginal[u] + 1e-6);
    EXPECT_NEAR(row, marginal[u], 1e-2);
  }
}

TEST(Ensemble, ZeroSpanIsTheSampler) {
  auto const wf = single_packet(0.0, 0.5);
  auto const f = make_flat(0.0);
  auto const r = equivariance_rel(wf, f, 0.0, 0.0, 2000, 20, 3);
  EXPECT_EQ(r.failures, 0u);
  EXPECT_LE(r.max_l1(), r.noise_floor);
}

TEST(Ensemble, EquivarianceOnCurvedFoliation) {
  auto const wf = entangled_pair(3.0, 1.0);
  auto const f = tanh_foliation(0.3, 1.0, {-1.0, 1.0});
  auto const r = equivariance_rel(wf, f, -1.0, 1.0, 2000, 15, 21);
  EXPECT_EQ(r.failures, 0u);
  EXPECT_LE(r.max_l1(), r.noise_floor);
}

TEST(Ensemble, CorruptedCurrentIsDetected) {
  auto const wf = single_packet(0.0, 1.0);
  auto const f = make_flat(0.0, "rest", {0.0, 3.0});
  EnsembleOptions o;
  o.hbd.current_scale = 0.5;
  auto const bad = equivariance_rel(wf, f, 0.0, 3.0, 2000, 20, 4, o);
  auto const good = equivariance_rel(wf, f, 0.0, 3.0, 2000, 20, 4);
  EXPECT_LE(good.max_l1(), good.noise_floor);
  EXPECT_GT(bad.max_l1(), bad.noise_floor);
}

TEST(Ensemble, RunIsReproducible) {
  auto const wf = single_packet(0.0, 1.0);
  auto const f = make_flat(0.0, "rest", {0.0, 1.0});
  EnsembleOptions one;
  one.threads = 1;
  EnsembleOptions many;
  many.threads = 4;
  auto const a = run_ensemble(wf, f, 0.0, 1.0, 100, 9, one);
  auto const b = run_ensemble(wf, f, 0.0, 1.0, 100, 9, many);
  for (std::size_t j = 0; j < 100; ++j) {
    EXPECT_EQ(a.trajectories[j].crossings.back()[0].x, b.trajectories[j].crossings.back()[0].x);
  }
}

TEST(CrossFoliation, SameFoliationReproducesBaseline) {
  auto const wf = entangled_pair(3.0, 1.0);
  auto const f = make_flat(0.0, "rest", {-1.0, 1.0});
  auto const r = cross_foliation_test(wf, f, f, -1.0, 1.0, 0.5, 0.5, 500, 6, 2);
  EXPECT_EQ(r.baseline.l1, r.cross.l1);
  EXPECT_DOUBLE_EQ(r.ratio, 1.0);
}

TEST(EventProbability, SymmetricPacketSplitsEvenly) {
  auto const wf = single_packet(0.0, 0.0);
  auto const f = make_flat(0.0, "rest", {0.0, 2.0});
  auto const run = run_ensemble(wf, f, 0.0, 2.0, 2000, 13);
  auto const left = Event::crosses(0, {{1.0, 1.0}, {-kInf, 0.0}});
  auto const right = Event::crosses(0, {{1.0, 1.0}, {0.0, kInf}});
  auto const pl = estimate_event_prob(left, run);
  auto const pr = estimate_event_prob(right, run);
  EXPECT_LE(pl.lower, 0.5);
  EXPECT_GE(pl.upper, 0.5);
  EXPECT_NEAR(pl.estimate + pr.estimate, 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(estimate_event_prob(Event::always(), run).estimate, 1.0);
  EXPECT_DOUBLE_EQ(estimate_event_prob(Event::never(), run).estimate, 0.0);
  auto const wide = left || Event::crosses(0, {{0.5, 1.5}, {0.0, 0.5}});
  EXPECT_GE(estimate_event_prob(wide, run).estimate, pl.estimate);
  EXPECT_LE(estimate_event_prob(left && right, run).estimate, 0.0);
}
