#pragma once

// Foliation-independent trajectory events: Boolean trees over atoms
// "world line of particle i meets the spacetime rectangle [t1,t2] x [x1,x2)".

#include <memory>
#include <string>

#include "bohm/foliation.hpp"
#include "bohm/poincare.hpp"

namespace bohm {

struct Rectangle {
  Interval t;  ///< closed
  Interval x;  ///< [lo, hi), either end may be infinite
};

/// Whether the closed segment a-b meets the rectangle.
bool segment_meets(SpacePoint a, SpacePoint b, Rectangle const& r);

class Event {
 public:
  static Event always();
  static Event never();
  static Event crosses(std::size_t particle, Rectangle rect);

  friend Event operator&&(Event const& a, Event const& b);
  friend Event operator||(Event const& a, Event const& b);
  friend Event operator!(Event const& a);

  /// The image g B: lines k belong to it iff g^{-1} k belongs to B.
  Event transformed(PoincareTransform const& g) const;

  /// Evaluated on the world lines as point sets (linear interpolation between
  /// crossings); the foliation that produced them plays no role.
  bool evaluate(WorldLines const& lines) const;

  std::string describe() const;

  struct Node;

 private:
  explicit Event(std::shared_ptr<Node const> node) : node_(std::move(node)) {}
  std::shared_ptr<Node const> node_;
};

}  // namespace bohm
