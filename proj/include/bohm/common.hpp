#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace bohm {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// A point of 1+1 dimensional Minkowski spacetime, metric signature (+,-).
struct SpacePoint {
  double t = 0.0;
  double x = 0.0;

  friend SpacePoint operator+(SpacePoint a, SpacePoint b) { return {a.t + b.t, a.x + b.x}; }
  friend SpacePoint operator-(SpacePoint a, SpacePoint b) { return {a.t - b.t, a.x - b.x}; }
  friend SpacePoint operator*(double s, SpacePoint a) { return {s * a.t, s * a.x}; }
  friend bool operator==(SpacePoint, SpacePoint) = default;
};

/// Contravariant 2-vector (v^0, v^1). Same layout as SpacePoint but used for
/// directions, normals and currents.
using Vec2 = SpacePoint;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double v) const { return v >= lo && v <= hi; }
};

inline double minkowski_dot(Vec2 a, Vec2 b) { return a.t * b.t - a.x * b.x; }

inline double euclidean_distance(SpacePoint a, SpacePoint b) {
  return std::hypot(a.t - b.t, a.x - b.x);
}

// Error taxonomy. The CLI maps ValidationError to exit code 2 and
// NumericalBudgetError to exit code 3.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: physical preconditions, schema violations, out-of-range parameters.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Query outside the region where a quantity is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Density fell below the node guard while following a trajectory.
class NodeProximityError : public Error {
 public:
  using Error::Error;
};

/// Rejection-sampling envelope could not be built or was exceeded.
class EnvelopeError : public Error {
 public:
  using Error::Error;
};

/// A leaf-advance step along a direction nearly tangent to the leaf family.
class DegenerateStepError : public Error {
 public:
  using Error::Error;
};

/// Too many failed trajectories in an ensemble.
class NumericalBudgetError : public Error {
 public:
  using Error::Error;
};

}  // namespace bohm
