#pragma once

#include "bohm/dirac.hpp"
#include "bohm/foliation.hpp"

namespace bohm::testing {

inline std::vector<dirac::PlaneWaveMode> packet(double center, double momentum, double width = 1.0) {
  return dirac::make_packet(dirac::PacketSpec{center, momentum, width});
}

inline dirac::MultiTimeWaveFunction single_packet(double center, double momentum, double width = 1.0) {
  dirac::MultiTimeWaveFunction const wf({1.0}, {dirac::Term{{1.0, 0.0}, {packet(center, momentum, width)}}});
  return wf.normalized_on_rest_leaf(-30.0, 30.0);
}

/// phi_L(+p) (x) phi_R(-p) - phi_L(-p) (x) phi_R(+p).
inline dirac::MultiTimeWaveFunction entangled_pair(double separation = 3.0, double momentum = 1.0,
                                                   double width = 1.0) {
  auto const lp = packet(-separation, momentum, width);
  auto const lm = packet(-separation, -momentum, width);
  auto const rp = packet(separation, momentum, width);
  auto const rm = packet(separation, -momentum, width);
  dirac::MultiTimeWaveFunction const wf(
      {1.0, 1.0}, {dirac::Term{{1.0, 0.0}, {lp, rm}}, dirac::Term{{-1.0, 0.0}, {lm, rp}}});
  return wf.normalized_on_rest_leaf(-30.0, 30.0);
}

inline dirac::MultiTimeWaveFunction product_pair(double separation = 3.0, double momentum = 1.0,
                                                 double width = 1.0) {
  auto l = packet(-separation, momentum, width);
  auto r = packet(separation, -momentum, width);
  dirac::MultiTimeWaveFunction const wf({1.0, 1.0}, {dirac::Term{{1.0, 0.0}, {l, r}}});
  return wf.normalized_on_rest_leaf(-30.0, 30.0);
}

inline FoliationPtr tanh_foliation(double a = 0.3, double w = 1.0, Interval params = {-5.0, 5.0}) {
  CurveShape shape;
  shape.amplitude = a;
  shape.width = w;
  return make_curved(shape, {}, params);
}

}  // namespace bohm::testing
