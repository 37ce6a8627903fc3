#include "bohm/poincare.hpp"

namespace bohm {

PoincareTransform PoincareTransform::frame_boost(double velocity) {
  if (!(std::abs(velocity) < 1.0)) throw ValidationError("frame_boost: |v| must be < 1");
  return {-std::atanh(velocity), {}};
}

SpacePoint PoincareTransform::apply(SpacePoint p) const {
  return apply_vector(p) + translation;
}

Vec2 PoincareTransform::apply_vector(Vec2 v) const {
  double const c = std::cosh(rapidity);
  double const s = std::sinh(rapidity);
  return {c * v.t + s * v.x, s * v.t + c * v.x};
}

PoincareTransform PoincareTransform::inverse() const {
  PoincareTransform inv{-rapidity, {}};
  Vec2 const back = inv.apply_vector(translation);
  inv.translation = {-back.t, -back.x};
  return inv;
}

PoincareTransform PoincareTransform::after(PoincareTransform const& first) const {
  return {rapidity + first.rapidity, apply_vector(first.translation) + translation};
}

std::array<Complex, 4> PoincareTransform::spinor_matrix() const {
  double const c = std::cosh(0.5 * rapidity);
  double const s = std::sinh(0.5 * rapidity);
  return {Complex{c}, Complex{s}, Complex{s}, Complex{c}};
}

}  // namespace bohm
