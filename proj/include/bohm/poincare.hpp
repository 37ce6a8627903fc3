#pragma once

#include <array>

#include "bohm/common.hpp"

namespace bohm {

/// Proper orthochronous Poincare transformation of 1+1 Minkowski space,
/// x -> L(rapidity) x + translation, with
///   L(eta) = [[cosh eta, sinh eta], [sinh eta, cosh eta]].
///
/// Frame convention: `frame_boost(v)` is the map to the coordinates of an
/// observer moving with velocity v, i.e. t' = g(t - v x), x' = g(x - v t).
/// It has rapidity -atanh(v); a particle at rest acquires velocity -v.
struct PoincareTransform {
  double rapidity = 0.0;
  SpacePoint translation{};

  static PoincareTransform identity() { return {}; }
  static PoincareTransform frame_boost(double velocity);
  static PoincareTransform translate(double a0, double a1) { return {0.0, {a0, a1}}; }

  /// Velocity of the image of a particle at rest: tanh(rapidity).
  double velocity() const { return std::tanh(rapidity); }
  bool is_identity() const { return rapidity == 0.0 && translation.t == 0.0 && translation.x == 0.0; }

  SpacePoint apply(SpacePoint p) const;
  /// Linear part only, for directions, normals and currents.
  Vec2 apply_vector(Vec2 v) const;

  PoincareTransform inverse() const;
  /// (this after first)(x) = this(first(x)).
  PoincareTransform after(PoincareTransform const& first) const;

  /// S(eta) = exp(eta gamma0 gamma1 / 2), row-major; satisfies
  /// S^{-1} gamma^mu S = L^mu_nu gamma^nu.
  std::array<Complex, 4> spinor_matrix() const;
};

/// Relativistic velocity of a body with velocity u seen from a frame moving
/// with velocity v: (u - v) / (1 - u v).
inline double relative_velocity(double u, double v) { return (u - v) / (1.0 - u * v); }

}  // namespace bohm
