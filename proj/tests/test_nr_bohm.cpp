#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "bohm/nr_bohm.hpp"

namespace bohm::nr {
namespace {

WaveFunction single_gaussian(double center = 0.0, double momentum = 0.0, double width = 1.0,
                             double mass = 1.0) {
  return WaveFunction::analytic({mass}, {ProductTerm{{1.0, 0.0}, {{center, momentum, width}}}});
}

// Independent closed form for a free packet centred at 0 with p0 = 0:
// rho(x,t) = exp(-x^2 / (2 s(t)^2)) / sqrt(2 pi s(t)^2), s(t) = sigma sqrt(1 + (t / 2 m sigma^2)^2).
double free_density_oracle(double x, double t, double sigma, double m) {
  double const s = sigma * std::sqrt(1.0 + std::pow(t / (2.0 * m * sigma * sigma), 2));
  return std::exp(-x * x / (2.0 * s * s)) / std::sqrt(2.0 * M_PI * s * s);
}

TEST(NrDensity, GaussianAtOriginMatchesClosedForm) {
  auto const wf = single_gaussian();
  double const x[] = {0.0};
  EXPECT_NEAR(density(wf, 0.0, x), 1.0 / std::sqrt(2.0 * M_PI), 1e-15);
  EXPECT_NEAR(density(wf, 0.0, x), 0.398942, 1e-6);
  for (double t : {0.5, 1.0, 2.0}) {
    for (double xv : {-2.0, 0.3, 1.7}) {
      double const p[] = {xv};
      EXPECT_NEAR(density(wf, t, p), free_density_oracle(xv, t, 1.0, 1.0), 1e-14);
    }
  }
}

TEST(NrDensity, VanishesAtNode) {
  // Odd superposition of two packets has a node at x = 0 for all t.
  auto const wf = WaveFunction::analytic(
      {1.0}, {ProductTerm{{1.0, 0.0}, {{-1.5, 0.0, 1.0}}}, ProductTerm{{-1.0, 0.0}, {{1.5, 0.0, 1.0}}}});
  double const x[] = {0.0};
  for (double t : {0.0, 0.7, 2.0}) EXPECT_LT(density(wf, t, x), 1e-30);
}

TEST(NrWaveFunction, AnalyticNormIsOne) {
  auto const wf = WaveFunction::analytic(
      {1.0, 2.0}, {ProductTerm{{0.3, 0.1}, {{-1.0, 0.5, 0.8}, {2.0, -0.3, 1.2}}},
                   ProductTerm{{0.0, -0.7}, {{1.0, -0.5, 1.0}, {0.0, 0.4, 0.6}}}});
  EXPECT_NEAR(wf.norm(0.0), 1.0, 1e-12);
  // Independent check: brute-force 2D quadrature at t = 1.3.
  double sum = 0.0;
  double const h = 0.05;
  for (double x1 = -12.0; x1 <= 12.0; x1 += h) {
    for (double x2 = -12.0; x2 <= 12.0; x2 += h) {
      double const p[] = {x1, x2};
      sum += density(wf, 1.3, p);
    }
  }
  EXPECT_NEAR(sum * h * h, 1.0, 1e-9);
}

TEST(NrDensity, GridAgreesWithAnalyticBackend) {
  std::vector<ProductTerm> terms{ProductTerm{{1.0, 0.0}, {{0.0, 0.0, 1.0}}}};
  auto const exact = WaveFunction::analytic({1.0}, terms);
  GridSpec spec;
  spec.length = 40.0;
  spec.points = 64;
  spec.dt = 1e-3;
  spec.t_max = 2.0;
  auto const grid = WaveFunction::grid({1.0}, terms, spec);
  double worst = 0.0;
  for (double t : {0.0, 0.5, 1.0, 1.5, 2.0}) {
    for (double x = -8.0; x <= 8.0; x += 0.37) {
      double const p[] = {x};
      worst = std::max(worst, std::abs(density(grid, t, p) - density(exact, t, p)));
    }
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(NrDensity, OutsideGridIsDomainError) {
  GridSpec spec;
  auto const grid = WaveFunction::grid({1.0}, {ProductTerm{{1.0, 0.0}, {{0.0, 0.0, 1.0}}}}, spec);
  double const p[] = {25.0};
  EXPECT_THROW(density(grid, 0.0, p), DomainError);
}

TEST(NrWaveFunction, GridEvolutionIsUnitary) {
  GridSpec spec;
  spec.points = 128;
  spec.t_max = 1.0;  // 1000 steps of dt = 1e-3
  spec.potential.kind = Potential::Kind::Harmonic;
  auto const grid = WaveFunction::grid({1.0}, {ProductTerm{{1.0, 0.0}, {{1.0, 0.5, 1.0}}}}, spec);
  EXPECT_NEAR(grid.norm(0.0), 1.0, 1e-12);
  EXPECT_LE(std::abs(grid.norm(1.0) - grid.norm(0.0)), 1e-8);
}

TEST(NrCurrent, NearPlaneWaveCarriesMomentum) {
  auto const wf = single_gaussian(0.0, 0.7, 100.0);
  double const x[] = {0.0};
  double const rho = density(wf, 0.0, x);
  auto const j = current(wf, 0.0, x);
  EXPECT_NEAR(j[0] / (0.7 * rho), 1.0, 1e-4);
}

TEST(NrCurrent, RealWaveFunctionHasNoCurrent) {
  auto const wf = single_gaussian(0.4, 0.0, 1.3);
  for (double xv : {-1.0, 0.0, 2.5}) {
    double const x[] = {xv};
    EXPECT_EQ(current(wf, 0.0, x)[0], 0.0);
  }
}

TEST(NrCurrent, ProductStateFactorizes) {
  GaussianPacket const a{-0.5, 0.8, 0.9};
  GaussianPacket const b{1.0, -0.4, 1.4};
  auto const pair = WaveFunction::analytic({1.0, 1.5}, {ProductTerm{{1.0, 0.0}, {a, b}}});
  auto const one = WaveFunction::analytic({1.0}, {ProductTerm{{1.0, 0.0}, {a}}});
  auto const two = WaveFunction::analytic({1.5}, {ProductTerm{{1.0, 0.0}, {b}}});
  for (double t : {0.0, 0.8}) {
    double const x[] = {0.3, 0.9};
    double const x1[] = {0.3};
    double const x2[] = {0.9};
    auto const j = current(pair, t, x);
    EXPECT_NEAR(j[0], current(one, t, x1)[0] * density(two, t, x2), 1e-10);
    EXPECT_NEAR(j[1], current(two, t, x2)[0] * density(one, t, x1), 1e-10);
  }
}

TEST(NrVelocity, FreeGaussianGuidingLaw) {
  auto const wf = single_gaussian();
  // v = x t / (4 m^2 sigma^4 + t^2)
  double const x[] = {2.0};
  EXPECT_NEAR(velocity(wf, 2.0, x)[0], 2.0 * 2.0 / (4.0 + 4.0), 1e-13);
  EXPECT_NEAR(velocity(wf, 2.0, x)[0], 0.5, 1e-13);
  EXPECT_EQ(velocity(wf, 0.0, x)[0], 0.0);
  auto const plane = single_gaussian(0.0, 0.7, 100.0);
  double const o[] = {0.0};
  EXPECT_NEAR(velocity(plane, 0.0, o)[0], 0.7, 1e-4 * 0.7);
}

TEST(NrVelocity, NodeGuard) {
  auto const wf = WaveFunction::analytic(
      {1.0}, {ProductTerm{{1.0, 0.0}, {{-1.5, 0.0, 1.0}}}, ProductTerm{{-1.0, 0.0}, {{1.5, 0.0, 1.0}}}});
  double const x[] = {0.0};
  EXPECT_THROW(velocity(wf, 0.5, x, 1e-14), NodeProximityError);
}

TEST(NrContinuity, FreeGaussianResidualIsSmall) {
  auto const wf = WaveFunction::analytic(
      {1.0, 1.0}, {ProductTerm{{1.0, 0.0}, {{-1.0, 0.6, 1.0}, {1.0, -0.2, 0.7}}},
                   ProductTerm{{0.5, 0.5}, {{1.0, -0.6, 1.0}, {-1.0, 0.3, 0.9}}}});
  double worst = 0.0;
  for (double t : {0.2, 0.9, 1.7}) {
    for (double x1 : {-1.5, 0.0, 0.8}) {
      for (double x2 : {-0.7, 0.4, 1.9}) {
        double const p[] = {x1, x2};
        worst = std::max(worst, continuity_residual(wf, t, p, 1e-4));
      }
    }
  }
  EXPECT_LE(worst, 1e-7);
  auto const single = single_gaussian();
  double const tail[] = {60.0};
  EXPECT_EQ(continuity_residual(single, 1.0, tail, 1e-4), 0.0);
}

TEST(NrContinuity, HarmonicGroundStateOnGrid) {
  GridSpec spec;
  spec.length = 40.0;
  spec.points = 256;
  spec.t_max = 1.0;
  spec.potential.kind = Potential::Kind::Harmonic;
  spec.potential.omega = 1.0;
  // Ground state of m = omega = 1: Gaussian with width sqrt(1/2).
  auto const grid =
      WaveFunction::grid({1.0}, {ProductTerm{{1.0, 0.0}, {{0.0, 0.0, std::sqrt(0.5)}}}}, spec);
  double worst = 0.0;
  for (double t : {0.2004, 0.5002}) {
    for (double x : {-1.0, 0.0, 0.6, 1.4}) {
      double const p[] = {x};
      worst = std::max(worst, continuity_residual(grid, t, p, 1e-4));
    }
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(NrIntegrate, FreeGaussianTrajectoryMatchesAnalyticSolution) {
  auto const wf = single_gaussian();
  double const x0[] = {1.0};
  auto const traj = integrate(wf, x0, 0.0, 2.0, 1e-3);
  ASSERT_TRUE(traj.valid);
  EXPECT_EQ(traj.times.size(), 2001u);
  EXPECT_DOUBLE_EQ(traj.times.back(), 2.0);
  // x(t) = x0 sqrt(1 + t^2 / 4)
  EXPECT_NEAR(traj.configurations.back(), std::sqrt(2.0), 1e-8);
  for (std::size_t k = 0; k < traj.times.size(); k += 250) {
    double const t = traj.times[k];
    EXPECT_NEAR(traj.configurations[k], std::sqrt(1.0 + t * t / 4.0), 1e-8);
  }
}

TEST(NrIntegrate, SymmetryAxisIsInvariant) {
  auto const wf = single_gaussian();
  double const x0[] = {0.0};
  auto const traj = integrate(wf, x0, 0.0, 2.0, 1e-3);
  for (double x : traj.configurations) EXPECT_EQ(x, 0.0);
}

TEST(NrIntegrate, ProductStateFactorizes) {
  GaussianPacket const a{-0.5, 0.8, 0.9};
  GaussianPacket const b{1.0, -0.4, 1.4};
  auto const pair = WaveFunction::analytic({1.0, 1.0}, {ProductTerm{{1.0, 0.0}, {a, b}}});
  auto const one = WaveFunction::analytic({1.0}, {ProductTerm{{1.0, 0.0}, {a}}});
  auto const two = WaveFunction::analytic({1.0}, {ProductTerm{{1.0, 0.0}, {b}}});
  double const x0[] = {0.1, 1.3};
  auto const joint = integrate(pair, x0, 0.0, 1.5, 1e-3);
  auto const first = integrate(one, std::span<double const>(x0, 1), 0.0, 1.5, 1e-3);
  auto const second = integrate(two, std::span<double const>(x0 + 1, 1), 0.0, 1.5, 1e-3);
  for (std::size_t k = 0; k < joint.times.size(); ++k) {
    EXPECT_NEAR(joint.at(k)[0], first.configurations[k], 1e-10);
    EXPECT_NEAR(joint.at(k)[1], second.configurations[k], 1e-10);
  }
}

TEST(NrIntegrate, FourthOrderConvergence) {
  auto const wf = single_gaussian();
  double const x0[] = {1.0};
  auto error = [&](double h) {
    auto const traj = integrate(wf, x0, 0.0, 2.0, h);
    return std::abs(traj.configurations.back() - std::sqrt(2.0));
  };
  double const ratio = error(0.2) / error(0.1);
  EXPECT_GT(ratio, 8.0);
  EXPECT_LT(ratio, 32.0);
}

TEST(NrIntegrate, InitialNodeIsRejected) {
  auto const wf = WaveFunction::analytic(
      {1.0}, {ProductTerm{{1.0, 0.0}, {{-1.5, 0.0, 1.0}}}, ProductTerm{{-1.0, 0.0}, {{1.5, 0.0, 1.0}}}});
  double const x0[] = {0.0};
  EXPECT_THROW(integrate(wf, x0, 0.0, 1.0, 1e-3), NodeProximityError);
}

TEST(NrSample, MomentsAndDeterminism) {
  auto const wf = single_gaussian();
  std::size_t const m = 100000;
  auto const xs = sample(wf, 0.0, m, 42, 1);
  double mean = 0.0;
  for (auto const& x : xs) mean += x[0];
  mean /= static_cast<double>(m);
  double var = 0.0;
  for (auto const& x : xs) var += (x[0] - mean) * (x[0] - mean);
  var /= static_cast<double>(m - 1);
  EXPECT_LE(std::abs(mean), 0.02);
  EXPECT_NEAR(var, 1.0, 0.03);

  auto const again = sample(wf, 0.0, 1000, 42, 1);
  auto const threaded = sample(wf, 0.0, 1000, 42, 3);
  for (std::size_t i = 0; i < 1000; ++i) {
    EXPECT_EQ(again[i][0], xs[i][0]);
    EXPECT_EQ(threaded[i][0], xs[i][0]);
  }
}

TEST(NrEquivariance, NoEvolutionIsPureSamplingNoise) {
  auto const wf = single_gaussian();
  auto const report = equivariance(wf, 0.0, 0.0, 10000, 30, 7);
  EXPECT_LE(report.l1[0], report.noise_floor);
}

TEST(NrEquivariance, FreeGaussianStaysInEquilibrium) {
  auto const wf = single_gaussian();
  EquivarianceOptions opt;
  opt.h = 1e-2;
  auto const report = equivariance(wf, 0.0, 2.0, 10000, 30, 11, opt);
  EXPECT_EQ(report.failures, 0u);
  EXPECT_LE(report.l1[0], 0.1);
  EXPECT_LE(report.l1[0], 3.0 * report.noise_floor);
}

TEST(NrEquivariance, CorruptedVelocityIsDetected) {
  auto const wf = single_gaussian(0.0, 1.0, 1.0);
  EquivarianceOptions opt;
  opt.h = 1e-2;
  opt.velocity_scale = 0.5;
  auto const report = equivariance(wf, 0.0, 2.0, 10000, 30, 11, opt);
  EXPECT_GT(report.l1[0], 3.0 * report.noise_floor);
}

}  // namespace
}  // namespace bohm::nr
