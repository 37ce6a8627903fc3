#include "bohm/hbd.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "bohm/hypersurface.hpp"

namespace bohm {

namespace {

std::size_t step_count(double span, double ds) {
  if (!(ds > 0.0)) throw ValidationError("integrator: step must be > 0");
  if (!(span >= 0.0)) throw ValidationError("integrator: end leaf precedes start leaf");
  if (span == 0.0) return 0;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span / ds - 1e-9)));
}

/// Current with the negative-control scaling and the null clamp applied.
Vec2 guided_direction(Vec2 j, double scale) {
  j.x *= scale;
  if (j.t - std::abs(j.x) < 1e-12 * j.t) j.x = std::copysign(j.t, j.x);
  return j;
}

struct StepFailure {
  std::string reason;
};

/// Directions j_i / (grad Phi . j_i), so that each advances the leaf parameter at unit rate.
std::vector<Vec2> leaf_directions(dirac::MultiTimeWaveFunction const& wf, Foliation const& f,
                                  std::vector<SpacePoint> const& config, HbdOptions const& options,
                                  std::optional<StepFailure>& failure) {
  auto const b = foliation_bilinears(wf, f, config);
  if (!(b.rho >= options.node_floor)) {
    failure = StepFailure{"node proximity: rho_Sigma=" + std::to_string(b.rho)};
    return {};
  }
  std::vector<Vec2> out(config.size());
  for (std::size_t i = 0; i < config.size(); ++i) {
    Vec2 const j = guided_direction(b.currents[i], options.current_scale);
    if (!(j.t > 0.0)) {
      failure = StepFailure{"node proximity: vanishing current of particle " + std::to_string(i)};
      return {};
    }
    double const rate = f.rate_along(config[i], j);
    if (!(rate > 0.0)) throw DegenerateStepError("integrator: current tangent to the leaves");
    out[i] = (1.0 / rate) * j;
  }
  return out;
}

void check_causal(SpacePoint a, SpacePoint b) {
  double const dt = b.t - a.t;
  if (!(dt > 0.0) || std::abs(b.x - a.x) > dt + 1e-9) {
    throw Error("integrator: spacelike or past-directed step");
  }
}

}  // namespace

WorldLines integrate_hbd(dirac::MultiTimeWaveFunction const& wf, FoliationPtr const& foliation,
                         std::span<SpacePoint const> initial, double s0, double s1, double ds,
                         HbdOptions const& options) {
  if (!foliation) throw ValidationError("integrate_hbd: null foliation");
  if (initial.size() != wf.particle_count()) throw ValidationError("integrate_hbd: wrong particle count");
  Foliation const& f = *foliation;
  Leaf const start{foliation, s0};
  for (auto const& p : initial) {
    if (!start.contains(p)) throw ValidationError("integrate_hbd: initial point not on the start leaf");
  }
  std::size_t const steps = step_count(s1 - s0, ds);
  double const h = steps == 0 ? 0.0 : (s1 - s0) / static_cast<double>(steps);

  WorldLines out;
  out.foliation_label = f.label();
  out.params.reserve(steps + 1);
  out.crossings.reserve(steps + 1);
  out.params.push_back(s0);
  out.crossings.emplace_back(initial.begin(), initial.end());

  std::size_t const n = initial.size();
  std::vector<SpacePoint> config(initial.begin(), initial.end());
  std::vector<SpacePoint> predicted(n);
  std::vector<SpacePoint> next(n);
  std::optional<StepFailure> failure;
  for (std::size_t k = 0; k < steps; ++k) {
    double const s_next = k + 1 == steps ? s1 : s0 + h * static_cast<double>(k + 1);
    auto const v0 = leaf_directions(wf, f, config, options, failure);
    if (failure) break;
    for (std::size_t i = 0; i < n; ++i) predicted[i] = f.advance_to_leaf(s_next, config[i], v0[i]);
    auto const v1 = leaf_directions(wf, f, predicted, options, failure);
    if (failure) break;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = f.advance_to_leaf(s_next, config[i], 0.5 * (v0[i] + v1[i]));
      check_causal(config[i], next[i]);
    }
    config.swap(next);
    out.params.push_back(s_next);
    out.crossings.push_back(config);
  }
  if (failure) {
    out.valid = false;
    out.failure = failure->reason;
  }
  return out;
}

WorldLines integrate_flat_frame(dirac::MultiTimeWaveFunction const& wf, double velocity,
                                std::span<SpacePoint const> initial, double t0, double t1, double h,
                                HbdOptions const& options) {
  if (initial.size() != wf.particle_count()) throw ValidationError("integrate_flat_frame: wrong particle count");
  PoincareTransform const g = PoincareTransform::frame_boost(velocity);
  PoincareTransform const back = g.inverse();
  auto const boosted = apply_poincare(g, wf);
  std::size_t const n = initial.size();
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    SpacePoint const p = g.apply(initial[i]);
    if (std::abs(p.t - t0) > 1e-9) throw ValidationError("integrate_flat_frame: initial point not at frame time t0");
    x[i] = p.x;
  }
  std::size_t const steps = step_count(t1 - t0, h);
  double const dt = steps == 0 ? 0.0 : (t1 - t0) / static_cast<double>(steps);

  std::vector<Vec2> const rest(n, Vec2{1.0, 0.0});
  std::vector<SpacePoint> pts(n);
  std::optional<StepFailure> failure;
  auto velocity_at = [&](double t, std::vector<double> const& xs, std::vector<double>& out) {
    for (std::size_t i = 0; i < n; ++i) pts[i] = {t, xs[i]};
    auto const b = dirac::hypersurface_bilinears(boosted.evaluate(pts), rest);
    if (!(b.rho >= options.node_floor)) {
      failure = StepFailure{"node proximity: rho_Sigma=" + std::to_string(b.rho)};
      return;
    }
    for (std::size_t i = 0; i < n; ++i) {
      Vec2 const j = guided_direction(b.currents[i], options.current_scale);
      if (!(j.t > 0.0)) {
        failure = StepFailure{"node proximity: vanishing current"};
        return;
      }
      out[i] = j.x / j.t;
    }
  };

  WorldLines run;
  run.foliation_label = "frame(v=" + std::to_string(velocity) + ")";
  auto record = [&](double t) {
    std::vector<SpacePoint> row(n);
    for (std::size_t i = 0; i < n; ++i) row[i] = back.apply({t, x[i]});
    run.params.push_back(t);
    run.crossings.push_back(std::move(row));
  };
  record(t0);
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  for (std::size_t k = 0; k < steps && !failure; ++k) {
    double const t = t0 + dt * static_cast<double>(k);
    velocity_at(t, x, k1);
    if (failure) break;
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
    velocity_at(t + 0.5 * dt, tmp, k2);
    if (failure) break;
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
    velocity_at(t + 0.5 * dt, tmp, k3);
    if (failure) break;
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + dt * k3[i];
    velocity_at(t + dt, tmp, k4);
    if (failure) break;
    for (std::size_t i = 0; i < n; ++i) x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    record(k + 1 == steps ? t1 : t0 + dt * static_cast<double>(k + 1));
  }
  if (failure) {
    run.valid = false;
    run.failure = failure->reason;
  }
  return run;
}

double sup_distance(WorldLines const& a, WorldLines const& b) {
  std::size_t const leaves = std::min(a.leaves(), b.leaves());
  if (a.particles() != b.particles()) throw ValidationError("sup_distance: particle counts differ");
  double d = 0.0;
  for (std::size_t k = 0; k < leaves; ++k) {
    for (std::size_t i = 0; i < a.particles(); ++i) {
      d = std::max(d, euclidean_distance(a.crossings[k][i], b.crossings[k][i]));
    }
  }
  return d;
}

CovarianceReport covariance_check(dirac::MultiTimeWaveFunction const& wf, FoliationPtr const& foliation,
                                  std::span<SpacePoint const> initial, double s0, double s1,
                                  PoincareTransform const& g, double ds) {
  auto const image_wf = apply_poincare(g, wf);
  auto const image_foliation = transform_foliation(g, foliation);
  std::vector<SpacePoint> image_initial;
  for (auto const& p : initial) image_initial.push_back(g.apply(p));
  auto distance_at = [&](double step) {
    auto const original = integrate_hbd(wf, foliation, initial, s0, s1, step);
    auto const moved = integrate_hbd(image_wf, image_foliation, image_initial, s0, s1, step);
    if (!original.valid || !moved.valid) throw NodeProximityError("covariance_check: trajectory hit a node");
    return sup_distance(transform_worldlines(g, original), moved);
  };
  CovarianceReport r;
  r.distance = distance_at(ds);
  r.refined_distance = distance_at(0.5 * ds);
  r.refinement_slope = (r.distance > 0.0 && r.refined_distance > 0.0)
                           ? std::log2(r.distance / r.refined_distance)
                           : 0.0;
  r.decreasing = r.refined_distance <= r.distance || std::max(r.distance, r.refined_distance) <= 1e-9;
  return r;
}

OverlapReport overlap_check(dirac::MultiTimeWaveFunction const& wf, FoliationPtr const& foliation,
                            WorldLines const& trajectory, DeformOptions const& options, double ds) {
  if (!trajectory.valid || trajectory.leaves() < 2) throw ValidationError("overlap_check: trajectory must be valid");
  auto const deformed = deform_foliation_away(foliation, trajectory, options);
  OverlapReport r;
  r.deformed_run = integrate_hbd(wf, deformed, trajectory.crossings.front(), trajectory.params.front(),
                                 trajectory.params.back(), ds);
  r.distance = sup_distance(trajectory, r.deformed_run);
  r.success = r.deformed_run.valid && r.distance <= r.tolerance;
  return r;
}

}  // namespace bohm
