#pragma once

// Spacelike foliations of 1+1 Minkowski spacetime.
//
// Every leaf is a graph t = T_s(x) over the spatial axis. A foliation is
// described by its time functions T_s and by the leaf-parameter function
// Phi, with Phi(p) = s exactly when p lies on leaf s.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bohm/common.hpp"
#include "bohm/poincare.hpp"

namespace bohm {

enum class FoliationKind { Flat, Curved, Deformed, Transformed };

class Foliation {
 public:
  virtual ~Foliation() = default;

  virtual FoliationKind kind() const = 0;
  /// Human-readable descriptor, e.g. "flat(v=0.3)".
  virtual std::string describe() const = 0;

  /// Stable identifier; preserved by Poincare transformations.
  std::string const& label() const { return label_; }
  /// Configured leaf-parameter range.
  Interval params() const { return params_; }
  /// Spatial region the foliation was validated on.
  Interval domain() const { return domain_; }

  virtual double leaf_time(double s, double x) const = 0;
  virtual double leaf_slope(double s, double x) const = 0;
  /// dT_s(x)/ds, strictly positive.
  virtual double leaf_rate(double s, double x) const = 0;

  virtual double parameter_at(SpacePoint p) const = 0;
  /// Covariant gradient (d Phi/dt, d Phi/dx).
  virtual Vec2 parameter_gradient(SpacePoint p) const = 0;

  /// point + lambda * direction with lambda > 0 on leaf s_next.
  /// Throws DegenerateStepError if the direction is not future-pointing or is
  /// nearly tangent to the leaves (d Phi along it below 1e-9).
  virtual SpacePoint advance_to_leaf(double s_next, SpacePoint point, Vec2 direction) const;

  SpacePoint leaf_point(double s, double x) const { return {leaf_time(s, x), x}; }

  /// (1, T')/sqrt(1 - T'^2). Throws ValidationError for |T'| >= 1.
  Vec2 unit_normal(double s, double x) const;

  /// Unit normal of the leaf through p, from the parameter gradient.
  Vec2 normal_at(SpacePoint p) const;

  /// Proper length per unit x along the leaf, sqrt(1 - T'^2).
  double length_element(double s, double x) const;

  /// d Phi along a vector: gradient . v.
  double rate_along(SpacePoint p, Vec2 v) const;

 protected:
  Foliation(std::string label, Interval params, Interval domain);

  std::string label_;
  Interval params_;
  Interval domain_;
};

using FoliationPtr = std::shared_ptr<Foliation const>;

struct Leaf {
  FoliationPtr foliation;
  double s = 0.0;

  SpacePoint point(double x) const { return foliation->leaf_point(s, x); }
  Vec2 normal(double x) const { return foliation->unit_normal(s, x); }
  bool contains(SpacePoint p, double tol = 1e-9) const {
    return std::abs(foliation->leaf_time(s, p.x) - p.t) <= tol;
  }
};

/// gamma (t - v x) = s + offset.
FoliationPtr make_flat(double velocity, std::string label = {}, Interval params = {0.0, 2.0},
                       double offset = 0.0, Interval domain = {-20.0, 20.0});

struct CurveShape {
  enum class Type { Tanh, Sine };
  Type type = Type::Tanh;
  double amplitude = 0.3;
  double center = 0.0;     ///< Tanh: x0
  double width = 1.0;      ///< Tanh: w
  double frequency = 1.0;  ///< Sine: omega

  /// Largest |f'|: |a|/w or |a| omega.
  double max_slope() const;
  double value(double x) const;
  double slope(double x) const;
};

/// t = s + f(x) with f frozen outside the domain. Throws ValidationError if
/// the slope bound exceeds 0.8.
FoliationPtr make_curved(CurveShape shape, std::string label = {}, Interval params = {0.0, 2.0},
                         Interval domain = {-20.0, 20.0});

/// Crossing points of N world lines with the leaves of one foliation: the
/// synchronization produced by the guiding law.
struct WorldLines {
  std::string foliation_label;
  std::vector<double> params;                       ///< s_0 .. s_K
  std::vector<std::vector<SpacePoint>> crossings;   ///< crossings[k][i]
  bool valid = true;
  std::string failure;

  std::size_t particles() const { return crossings.empty() ? 0 : crossings.front().size(); }
  std::size_t leaves() const { return params.size(); }
  /// Polyline of particle i.
  std::vector<SpacePoint> path(std::size_t i) const;
};

struct DeformOptions {
  double margin = 1.0;       ///< protected distance around each crossing point; 0 disables protection
  double bump = 0.2;         ///< deformation amplitude in time
  double width = 1.0;        ///< spatial scale of the bump profile
  double ramp_length = 0.5;  ///< leaf-parameter length over which the bump switches on
};

/// F' agreeing with F within `margin` of every crossing point of `lines` and
/// shifted by up to `bump` elsewhere. Throws ValidationError if the result
/// violates the slope bound 0.95 or leaf ordering.
FoliationPtr deform_foliation_away(FoliationPtr const& base, WorldLines const& lines,
                                   DeformOptions const& options);

FoliationPtr transform_foliation(PoincareTransform const& g, FoliationPtr const& f);
Leaf transform_leaf(PoincareTransform const& g, Leaf const& leaf);
WorldLines transform_worldlines(PoincareTransform const& g, WorldLines const& lines,
                                FoliationPtr const& image_foliation = nullptr);

/// Velocity of a flat foliation, if it is one.
std::optional<double> flat_velocity(Foliation const& f);

/// Point where a polyline crosses leaf s, if it does.
std::optional<SpacePoint> leaf_crossing(Foliation const& f, double s,
                                        std::span<SpacePoint const> polyline);

/// Checks leaf ordering and the slope bound on a grid of leaves and x values.
/// Returns the largest |T'| found; throws ValidationError on violation.
double validate_foliation(Foliation const& f, double slope_bound = 0.95, double x_step = 0.01,
                          std::size_t leaf_samples = 21);

}  // namespace bohm
