#pragma once

// Guiding law along a foliation: each particle moves along its own current
// j_iSigma from leaf to leaf.

#include <span>

#include "bohm/dirac.hpp"
#include "bohm/foliation.hpp"

namespace bohm {

struct HbdOptions {
  double node_floor = 1e-12;  ///< rho_Sigma below this ends the trajectory as invalid
  /// Multiplies the spatial current component before stepping. Anything but 1
  /// breaks equivariance; used only as a negative control.
  double current_scale = 1.0;
};

/// Tolerance the integrator is expected to meet at its default step.
inline constexpr double kIntegratorTolerance = 1e-4;

/// Heun predictor-corrector in the leaf parameter from leaf s0 to leaf s1.
/// The step is (s1 - s0) / ceil((s1 - s0) / ds). `initial` must lie on leaf
/// s0 (ValidationError otherwise). Node proximity yields valid = false with
/// the leaves computed so far; DegenerateStepError propagates.
WorldLines integrate_hbd(dirac::MultiTimeWaveFunction const& wf, FoliationPtr const& foliation,
                         std::span<SpacePoint const> initial, double s0, double s1, double ds,
                         HbdOptions const& options = {});

/// Equal-time guiding law in the rest frame of an observer with velocity v:
/// boost the state and initial data, integrate dx'/dt' = j^1/j^0 with RK4
/// from t0' to t1', map the crossings back. The parameters of the result are
/// the frame times t', i.e. the leaf parameters of make_flat(v).
WorldLines integrate_flat_frame(dirac::MultiTimeWaveFunction const& wf, double velocity,
                                std::span<SpacePoint const> initial, double t0, double t1, double h,
                                HbdOptions const& options = {});

/// Largest Euclidean distance between corresponding crossing points over the
/// leaves both runs reached.
double sup_distance(WorldLines const& a, WorldLines const& b);

struct CovarianceReport {
  double distance = 0.0;          ///< at ds
  double refined_distance = 0.0;  ///< at ds / 2
  /// log2(distance / refined_distance); meaningless when both sit at round-off.
  double refinement_slope = 0.0;
  bool decreasing = false;        ///< refined <= coarse, or both below 1e-9
};

/// Compares g(trajectory(psi, F)) with trajectory(U_g psi, g F) started from
/// g(initial).
CovarianceReport covariance_check(dirac::MultiTimeWaveFunction const& wf, FoliationPtr const& foliation,
                                  std::span<SpacePoint const> initial, double s0, double s1,
                                  PoincareTransform const& g, double ds);

struct OverlapReport {
  double distance = 0.0;
  double tolerance = 10.0 * kIntegratorTolerance;
  bool success = false;
  WorldLines deformed_run;
};

/// Builds F' = deform_foliation_away(F, trajectory, options), re-integrates
/// from the trajectory's initial crossing points and reports the
/// sup-distance. The trajectory must be valid.
OverlapReport overlap_check(dirac::MultiTimeWaveFunction const& wf, FoliationPtr const& foliation,
                            WorldLines const& trajectory, DeformOptions const& options, double ds);

}  // namespace bohm
