#include <gtest/gtest.h>

#include <cmath>

#include "bohm/hbd.hpp"
#include "fixtures.hpp"

using namespace bohm;
using namespace bohm::testing;
using dirac::MultiTimeWaveFunction;
using dirac::PlaneWaveMode;
using dirac::Term;

namespace {

std::vector<SpacePoint> on_leaf(Foliation const& f, double s, std::vector<double> const& xs) {
  std::vector<SpacePoint> out;
  for (double x : xs) out.push_back(f.leaf_point(s, x));
  return out;
}

void expect_causal_and_on_leaves(WorldLines const& w, Foliation const& f) {
  for (std::size_t k = 0; k < w.leaves(); ++k) {
    for (std::size_t i = 0; i < w.particles(); ++i) {
      SpacePoint const p = w.crossings[k][i];
      EXPECT_NEAR(p.t, f.leaf_time(w.params[k], p.x), 1e-9);
      if (k > 0) {
        SpacePoint const q = w.crossings[k - 1][i];
        EXPECT_GT(p.t, q.t);
        EXPECT_LE(std::abs(p.x - q.x), p.t - q.t + 1e-9);
      }
    }
  }
}

}  // namespace

TEST(Hbd, SymmetricPacketStaysAtOrigin) {
  auto const wf = single_packet(0.0, 0.0);
  auto const f = make_flat(0.0);
  SpacePoint const start{0.0, 0.0};
  auto const w = integrate_hbd(wf, f, std::span(&start, 1), 0.0, 2.0, 1e-3);
  ASSERT_TRUE(w.valid);
  for (auto const& row : w.crossings) EXPECT_NEAR(row[0].x, 0.0, 1e-6);
}

TEST(Hbd, SingleModeMovesAtGroupVelocity) {
  MultiTimeWaveFunction const wf({1.0}, {Term{{1.0, 0.0}, {{PlaneWaveMode{0.75}}}}});
  auto const f = tanh_foliation();
  SpacePoint const start = f->leaf_point(0.0, -1.0);
  auto const w = integrate_hbd(wf, f, std::span(&start, 1), 0.0, 2.0, 1e-2);
  ASSERT_TRUE(w.valid);
  for (std::size_t k = 1; k < w.leaves(); ++k) {
    SpacePoint const a = w.crossings[k - 1][0];
    SpacePoint const b = w.crossings[k][0];
    EXPECT_NEAR((b.x - a.x) / (b.t - a.t), 0.6, 1e-12);
  }
}

TEST(Hbd, ProductStateFactorizes) {
  auto const wf = product_pair();
  auto const left = single_packet(-3.0, 1.0);
  auto const right = single_packet(3.0, -1.0);
  auto const f = tanh_foliation();
  auto const start = on_leaf(*f, 0.0, {-2.6, 3.3});
  auto const both = integrate_hbd(wf, f, start, 0.0, 2.0, 1e-3);
  auto const a = integrate_hbd(left, f, std::span(&start[0], 1), 0.0, 2.0, 1e-3);
  auto const b = integrate_hbd(right, f, std::span(&start[1], 1), 0.0, 2.0, 1e-3);
  ASSERT_TRUE(both.valid && a.valid && b.valid);
  for (std::size_t k = 0; k < both.leaves(); ++k) {
    EXPECT_LE(euclidean_distance(both.crossings[k][0], a.crossings[k][0]), 1e-8);
    EXPECT_LE(euclidean_distance(both.crossings[k][1], b.crossings[k][0]), 1e-8);
  }
}

TEST(Hbd, CausalAndOnLeaves) {
  auto const wf = entangled_pair();
  for (auto const& f : {make_flat(0.4, {}, {-5.0, 5.0}), tanh_foliation()}) {
    auto const start = on_leaf(*f, 0.0, {-3.2, 2.5});
    auto const w = integrate_hbd(wf, f, start, 0.0, 2.0, 1e-2);
    ASSERT_TRUE(w.valid);
    expect_causal_and_on_leaves(w, *f);
  }
}

TEST(Hbd, OffLeafStartRejected) {
  auto const wf = single_packet(0.0, 0.0);
  SpacePoint const start{0.1, 0.0};
  EXPECT_THROW(integrate_hbd(wf, make_flat(0.0), std::span(&start, 1), 0.0, 1.0, 1e-2), ValidationError);
}

TEST(Hbd, FlatFrameCrossOracle) {
  auto const wf = entangled_pair();
  for (double v : {0.0, 0.3, -0.5}) {
    auto const f = make_flat(v, {}, {-5.0, 5.0});
    auto const start = on_leaf(*f, 0.0, {-3.4, 2.8});
    auto const heun = integrate_hbd(wf, f, start, 0.0, 2.0, 1e-3);
    auto const rk4 = integrate_flat_frame(wf, v, start, 0.0, 2.0, 1e-3);
    ASSERT_TRUE(heun.valid && rk4.valid);
    ASSERT_EQ(heun.leaves(), rk4.leaves());
    EXPECT_LE(sup_distance(heun, rk4), 1e-6) << "v=" << v;
  }
}

TEST(Hbd, BoostedSingleModeVelocityAddition) {
  MultiTimeWaveFunction const wf({1.0}, {Term{{1.0, 0.0}, {{PlaneWaveMode{0.75}}}}});
  SpacePoint const start{0.0, 0.0};
  auto const w = integrate_flat_frame(wf, 0.3, std::span(&start, 1), 0.0, 1.0, 1e-2);
  ASSERT_TRUE(w.valid);
  PoincareTransform const g = PoincareTransform::frame_boost(0.3);
  SpacePoint const a = g.apply(w.crossings.front()[0]);
  SpacePoint const b = g.apply(w.crossings.back()[0]);
  EXPECT_NEAR((b.x - a.x) / (b.t - a.t), relative_velocity(0.6, 0.3), 1e-12);
  // Back in the original frame the world line is the same straight line.
  SpacePoint const c = w.crossings.back()[0];
  EXPECT_NEAR(c.x / c.t, 0.6, 1e-12);
}

TEST(Hbd, SecondOrderConvergence) {
  auto const wf = entangled_pair();
  auto const f = tanh_foliation();
  auto const start = on_leaf(*f, 0.0, {-3.4, 2.8});
  auto const reference = integrate_hbd(wf, f, start, 0.0, 2.0, 1.25e-3);
  auto const coarse = integrate_hbd(wf, f, start, 0.0, 2.0, 2e-2);
  auto const fine = integrate_hbd(wf, f, start, 0.0, 2.0, 1e-2);
  auto const end_error = [&](WorldLines const& w) {
    double e = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
      e = std::max(e, euclidean_distance(w.crossings.back()[i], reference.crossings.back()[i]));
    }
    return e;
  };
  double const ratio = end_error(coarse) / end_error(fine);
  EXPECT_GT(ratio, 2.0);
  EXPECT_LT(ratio, 8.0);
}

TEST(Hbd, NodeEndsTrajectory) {
  // Two counter-propagating modes: standing wave with nodes of rho.
  MultiTimeWaveFunction const wf({1.0}, {Term{{1.0, 0.0}, {{PlaneWaveMode{1.0}, PlaneWaveMode{-1.0}}}}});
  SpacePoint const start{0.0, 0.0};
  HbdOptions opts;
  opts.node_floor = 10.0;
  auto const w = integrate_hbd(wf, make_flat(0.0), std::span(&start, 1), 0.0, 1.0, 1e-2, opts);
  EXPECT_FALSE(w.valid);
  EXPECT_EQ(w.leaves(), 1u);
  EXPECT_NE(w.failure.find("node"), std::string::npos);
}

TEST(Covariance, IdentityAndTranslation) {
  auto const wf = entangled_pair();
  auto const f = tanh_foliation();
  auto const start = on_leaf(*f, 0.0, {-3.2, 2.9});
  auto const id = covariance_check(wf, f, start, 0.0, 1.0, PoincareTransform::identity(), 1e-2);
  EXPECT_EQ(id.distance, 0.0);
  auto const tr = covariance_check(wf, f, start, 0.0, 1.0, PoincareTransform::translate(0.7, -1.3), 1e-2);
  EXPECT_LE(tr.distance, 1e-10);
}

TEST(Covariance, BoostedEntangledState) {
  auto const wf = entangled_pair();
  for (auto const& f : {make_flat(0.0, {}, {-5.0, 5.0}), tanh_foliation()}) {
    auto const start = on_leaf(*f, 0.0, {-3.2, 2.9});
    auto const r = covariance_check(wf, f, start, 0.0, 2.0, PoincareTransform::frame_boost(0.3), 1e-3);
    EXPECT_LE(r.distance, 1e-4) << f->describe();
    EXPECT_TRUE(r.decreasing) << r.distance << " " << r.refined_distance;
  }
}

TEST(Overlap, DeformationAwayFromTrajectory) {
  auto const wf = entangled_pair(3.0, 1.0, 0.5);
  auto const f = make_flat(0.0, {}, {0.0, 2.0});
  auto const start = on_leaf(*f, 0.0, {-3.1, 2.8});
  auto const base = integrate_hbd(wf, f, start, 0.0, 2.0, 1e-3);
  ASSERT_TRUE(base.valid);

  auto const same = overlap_check(wf, f, base, {1.5, 0.0}, 1e-3);
  EXPECT_EQ(same.distance, 0.0);
  EXPECT_TRUE(same.success);

  auto const away = overlap_check(wf, f, base, {1.5, 0.2}, 1e-3);
  EXPECT_LE(away.distance, 1e-3);
  EXPECT_TRUE(away.success);

  auto const on = overlap_check(wf, f, base, {0.0, 0.2}, 1e-3);
  EXPECT_GT(on.distance, on.tolerance);
  EXPECT_FALSE(on.success);
}
