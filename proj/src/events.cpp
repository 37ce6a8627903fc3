#include "bohm/events.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <variant>
#include <vector>

namespace bohm {

bool segment_meets(SpacePoint a, SpacePoint b, Rectangle const& r) {
  double lo = 0.0;
  double hi = 1.0;
  // Closed constraint c0 + u * c1 >= 0 restricts [lo, hi].
  auto const clip = [&](double c0, double c1) {
    if (c1 == 0.0) {
      if (c0 < 0.0) hi = -1.0;
      return;
    }
    double const u = -c0 / c1;
    if (c1 > 0.0) lo = std::max(lo, u);
    else hi = std::min(hi, u);
  };
  double const dt = b.t - a.t;
  double const dx = b.x - a.x;
  clip(a.t - r.t.lo, dt);
  clip(r.t.hi - a.t, -dt);
  if (std::isfinite(r.x.lo)) clip(a.x - r.x.lo, dx);
  if (lo > hi) return false;
  if (!std::isfinite(r.x.hi)) return true;
  // Strict constraint x(u) < x_hi.
  if (dx == 0.0) return a.x < r.x.hi;
  double const u = (r.x.hi - a.x) / dx;
  return dx > 0.0 ? lo < u : hi > u;
}

struct Event::Node {
  struct Constant {
    bool value;
  };
  struct Atom {
    std::size_t particle;
    Rectangle rect;
  };
  struct Not {
    std::shared_ptr<Node const> a;
  };
  struct And {
    std::shared_ptr<Node const> a, b;
  };
  struct Or {
    std::shared_ptr<Node const> a, b;
  };
  struct Moved {
    PoincareTransform inverse;
    std::shared_ptr<Node const> a;
  };
  std::variant<Constant, Atom, Not, And, Or, Moved> v;
};

namespace {

using Node = Event::Node;

bool eval(Node const& n, WorldLines const& w) {
  return std::visit(
      [&](auto const& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Node::Constant>) {
          return x.value;
        } else if constexpr (std::is_same_v<T, Node::Atom>) {
          if (x.particle >= w.particles()) throw ValidationError("event refers to a missing particle");
          if (w.leaves() == 1) return segment_meets(w.crossings[0][x.particle], w.crossings[0][x.particle], x.rect);
          for (std::size_t k = 1; k < w.leaves(); ++k) {
            if (segment_meets(w.crossings[k - 1][x.particle], w.crossings[k][x.particle], x.rect)) return true;
          }
          return false;
        } else if constexpr (std::is_same_v<T, Node::Not>) {
          return !eval(*x.a, w);
        } else if constexpr (std::is_same_v<T, Node::And>) {
          return eval(*x.a, w) && eval(*x.b, w);
        } else if constexpr (std::is_same_v<T, Node::Or>) {
          return eval(*x.a, w) || eval(*x.b, w);
        } else {
          return eval(*x.a, transform_worldlines(x.inverse, w));
        }
      },
      n.v);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string desc(Node const& n) {
  return std::visit(
      [&](auto const& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Node::Constant>) {
          return x.value ? "true" : "false";
        } else if constexpr (std::is_same_v<T, Node::Atom>) {
          return "hit(" + std::to_string(x.particle) + ",t=[" + fmt(x.rect.t.lo) + "," + fmt(x.rect.t.hi) +
                 "],x=[" + fmt(x.rect.x.lo) + "," + fmt(x.rect.x.hi) + "))";
        } else if constexpr (std::is_same_v<T, Node::Not>) {
          return "not " + desc(*x.a);
        } else if constexpr (std::is_same_v<T, Node::And>) {
          return "(" + desc(*x.a) + " and " + desc(*x.b) + ")";
        } else if constexpr (std::is_same_v<T, Node::Or>) {
          return "(" + desc(*x.a) + " or " + desc(*x.b) + ")";
        } else {
          return "moved(" + desc(*x.a) + ")";
        }
      },
      n.v);
}

}  // namespace

Event Event::always() { return Event(std::make_shared<Node const>(Node{Node::Constant{true}})); }
Event Event::never() { return Event(std::make_shared<Node const>(Node{Node::Constant{false}})); }

Event Event::crosses(std::size_t particle, Rectangle rect) {
  if (!(rect.t.hi >= rect.t.lo) || !(rect.x.hi >= rect.x.lo)) throw ValidationError("event: empty rectangle");
  return Event(std::make_shared<Node const>(Node{Node::Atom{particle, rect}}));
}

Event operator&&(Event const& a, Event const& b) {
  return Event(std::make_shared<Node const>(Node{Node::And{a.node_, b.node_}}));
}

Event operator||(Event const& a, Event const& b) {
  return Event(std::make_shared<Node const>(Node{Node::Or{a.node_, b.node_}}));
}

Event operator!(Event const& a) { return Event(std::make_shared<Node const>(Node{Node::Not{a.node_}})); }

Event Event::transformed(PoincareTransform const& g) const {
  if (g.is_identity()) return *this;
  return Event(std::make_shared<Node const>(Node{Node::Moved{g.inverse(), node_}}));
}

bool Event::evaluate(WorldLines const& lines) const {
  if (lines.leaves() == 0) throw ValidationError("event: empty trajectory");
  return eval(*node_, lines);
}

std::string Event::describe() const { return desc(*node_); }

}  // namespace bohm
