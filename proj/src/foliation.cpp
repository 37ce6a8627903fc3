#include "bohm/foliation.hpp"

#include <algorithm>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <cstdint>
#include <sstream>

namespace bohm {

namespace {

constexpr std::uintmax_t kMaxRootIterations = 200;

/// Root of an increasing function h on [lo, hi] with h(lo) <= 0 <= h(hi).
template <class F>
double solve_increasing(F&& h, double lo, double hi, double hlo, double hhi, double tol) {
  if (hlo == 0.0) return lo;
  if (hhi == 0.0) return hi;
  std::uintmax_t iters = kMaxRootIterations;
  auto const stop = [tol](double a, double b) { return std::abs(b - a) <= tol; };
  auto const r = boost::math::tools::toms748_solve(h, lo, hi, hlo, hhi, stop, iters);
  return 0.5 * (r.first + r.second);
}

/// Expands [x0 - step, x0 + step] geometrically until an increasing h changes sign,
/// then solves h = 0.
template <class F>
double bracket_and_solve(F&& h, double x0, double step, double tol) {
  double const h0 = h(x0);
  if (h0 == 0.0) return x0;
  double lo = x0, hi = x0, hlo = h0, hhi = h0;
  for (int k = 0; k < 80; ++k) {
    if (h0 < 0.0) {
      lo = hi;
      hlo = hhi;
      hi = x0 + step;
      hhi = h(hi);
      if (hhi >= 0.0) return solve_increasing(h, lo, hi, hlo, hhi, tol);
    } else {
      hi = lo;
      hhi = hlo;
      lo = x0 - step;
      hlo = h(lo);
      if (hlo <= 0.0) return solve_increasing(h, lo, hi, hlo, hhi, tol);
    }
    step *= 2.0;
  }
  throw DomainError("root bracketing failed");
}

std::string format_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

double smoothstep(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return u * u * (3.0 - 2.0 * u);
}

// --- Flat ------------------------------------------------------------------

class FlatFoliation final : public Foliation {
 public:
  FlatFoliation(double v, double offset, std::string label, Interval params, Interval domain)
      : Foliation(std::move(label), params, domain), v_(v), offset_(offset),
        gamma_(1.0 / std::sqrt(1.0 - v * v)) {
    if (label_.empty()) label_ = describe();
  }

  double velocity() const { return v_; }
  double offset() const { return offset_; }

  FoliationKind kind() const override { return FoliationKind::Flat; }
  std::string describe() const override {
    std::string d = "flat(v=" + format_number(v_);
    if (offset_ != 0.0) d += ",offset=" + format_number(offset_);
    return d + ")";
  }
  double leaf_time(double s, double x) const override { return (s + offset_) / gamma_ + v_ * x; }
  double leaf_slope(double, double) const override { return v_; }
  double leaf_rate(double, double) const override { return 1.0 / gamma_; }
  double parameter_at(SpacePoint p) const override { return gamma_ * (p.t - v_ * p.x) - offset_; }
  Vec2 parameter_gradient(SpacePoint) const override { return {gamma_, -gamma_ * v_}; }

  SpacePoint advance_to_leaf(double s_next, SpacePoint p, Vec2 d) const override {
    if (!(d.t > 0.0)) throw DegenerateStepError("advance_to_leaf: direction not future-pointing");
    Vec2 const unit{1.0, d.x / d.t};
    double const denom = gamma_ * (unit.t - v_ * unit.x);
    if (!(denom >= 1e-9)) throw DegenerateStepError("advance_to_leaf: direction tangent to leaves");
    double const lambda = (s_next - parameter_at(p)) / denom;
    if (lambda < 0.0) throw ValidationError("advance_to_leaf: target leaf lies in the past");
    return p + lambda * unit;
  }

 private:
  double v_;
  double offset_;
  double gamma_;
};

// --- Curved ----------------------------------------------------------------

class CurvedFoliation final : public Foliation {
 public:
  CurvedFoliation(CurveShape shape, std::string label, Interval params, Interval domain)
      : Foliation(std::move(label), params, domain), shape_(shape) {
    if (label_.empty()) label_ = describe();
  }

  FoliationKind kind() const override { return FoliationKind::Curved; }
  std::string describe() const override {
    if (shape_.type == CurveShape::Type::Tanh) {
      return "curved(tanh,a=" + format_number(shape_.amplitude) + ",x0=" + format_number(shape_.center) +
             ",w=" + format_number(shape_.width) + ")";
    }
    return "curved(sin,a=" + format_number(shape_.amplitude) + ",omega=" + format_number(shape_.frequency) +
           ")";
  }
  double leaf_time(double s, double x) const override { return s + f(x); }
  double leaf_slope(double, double x) const override {
    if (x < domain_.lo || x > domain_.hi) return 0.0;
    return shape_.slope(x);
  }
  double leaf_rate(double, double) const override { return 1.0; }
  double parameter_at(SpacePoint p) const override { return p.t - f(p.x); }
  Vec2 parameter_gradient(SpacePoint p) const override { return {1.0, -leaf_slope(0.0, p.x)}; }

 private:
  double f(double x) const { return shape_.value(std::clamp(x, domain_.lo, domain_.hi)); }

  CurveShape shape_;
};

// --- Deformed --------------------------------------------------------------

class DeformedFoliation final : public Foliation {
 public:
  DeformedFoliation(FoliationPtr base, WorldLines lines, DeformOptions options)
      : Foliation(base->label() + "~deformed", base->params(), base->domain()),
        base_(std::move(base)), lines_(std::move(lines)), options_(options) {}

  FoliationKind kind() const override { return FoliationKind::Deformed; }
  std::string describe() const override {
    return "deformed(" + base_->describe() + ",margin=" + format_number(options_.margin) +
           ",bump=" + format_number(options_.bump) + ")";
  }

  double leaf_time(double s, double x) const override { return base_->leaf_time(s, x) + delta(s, x); }
  double leaf_slope(double s, double x) const override {
    double const h = 1e-6;
    return base_->leaf_slope(s, x) + (delta(s, x + h) - delta(s, x - h)) / (2.0 * h);
  }
  double leaf_rate(double s, double x) const override {
    double const h = 1e-6;
    return base_->leaf_rate(s, x) + (delta(s + h, x) - delta(s - h, x)) / (2.0 * h);
  }
  double parameter_at(SpacePoint p) const override {
    double const s0 = base_->parameter_at(p);
    auto const h = [&](double s) { return leaf_time(s, p.x) - p.t; };
    return bracket_and_solve(h, s0, std::max(std::abs(options_.bump), 1e-6), 1e-14);
  }
  Vec2 parameter_gradient(SpacePoint p) const override {
    double const s = parameter_at(p);
    double const rate = leaf_rate(s, p.x);
    return {1.0 / rate, -leaf_slope(s, p.x) / rate};
  }

 private:
  double crossing_x(std::size_t i, double s) const {
    auto const& ps = lines_.params;
    if (s <= ps.front()) return lines_.crossings.front()[i].x;
    if (s >= ps.back()) return lines_.crossings.back()[i].x;
    auto const it = std::upper_bound(ps.begin(), ps.end(), s);
    std::size_t const k = static_cast<std::size_t>(it - ps.begin());
    double const u = (s - ps[k - 1]) / (ps[k] - ps[k - 1]);
    return (1.0 - u) * lines_.crossings[k - 1][i].x + u * lines_.crossings[k][i].x;
  }

  double delta(double s, double x) const {
    double const ramp = smoothstep((s - lines_.params.front()) / options_.ramp_length);
    if (ramp == 0.0) return 0.0;
    double profile = std::tanh((x - crossing_x(0, s)) / options_.width);
    if (options_.margin > 0.0) {
      for (std::size_t i = 0; i < lines_.particles() && profile != 0.0; ++i) {
        profile *= smoothstep((std::abs(x - crossing_x(i, s)) - options_.margin) / options_.width);
      }
    }
    return options_.bump * ramp * profile;
  }

  FoliationPtr base_;
  WorldLines lines_;
  DeformOptions options_;
};

// --- Transformed -----------------------------------------------------------

class TransformedFoliation final : public Foliation {
 public:
  TransformedFoliation(FoliationPtr base, PoincareTransform g)
      : Foliation(base->label(), base->params(), base->domain()), base_(std::move(base)), g_(g),
        inv_(g.inverse()) {}

  FoliationPtr const& base() const { return base_; }
  PoincareTransform const& transform() const { return g_; }

  FoliationKind kind() const override { return FoliationKind::Transformed; }
  std::string describe() const override {
    return "transformed(" + base_->describe() + ",eta=" + format_number(g_.rapidity) +
           ",a=(" + format_number(g_.translation.t) + "," + format_number(g_.translation.x) + "))";
  }

  double parameter_at(SpacePoint p) const override { return base_->parameter_at(inv_.apply(p)); }
  Vec2 parameter_gradient(SpacePoint p) const override {
    Vec2 const g = base_->parameter_gradient(inv_.apply(p));
    double const c = std::cosh(g_.rapidity);
    double const s = std::sinh(g_.rapidity);
    return {c * g.t - s * g.x, -s * g.t + c * g.x};
  }
  double leaf_time(double s, double x) const override {
    SpacePoint const guess = g_.apply(base_->leaf_point(s, inv_.apply({0.0, x}).x));
    auto const h = [&](double t) { return parameter_at({t, x}) - s; };
    return bracket_and_solve(h, guess.t, 1.0, 1e-13);
  }
  double leaf_slope(double s, double x) const override {
    Vec2 const g = parameter_gradient({leaf_time(s, x), x});
    return -g.x / g.t;
  }
  double leaf_rate(double s, double x) const override {
    return 1.0 / parameter_gradient({leaf_time(s, x), x}).t;
  }
  SpacePoint advance_to_leaf(double s_next, SpacePoint p, Vec2 d) const override {
    return g_.apply(base_->advance_to_leaf(s_next, inv_.apply(p), inv_.apply_vector(d)));
  }

 private:
  FoliationPtr base_;
  PoincareTransform g_;
  PoincareTransform inv_;
};

}  // namespace

// --- Foliation base ----------------------------------------------------------

Foliation::Foliation(std::string label, Interval params, Interval domain)
    : label_(std::move(label)), params_(params), domain_(domain) {
  if (!(params.hi > params.lo)) throw ValidationError("foliation: empty parameter range");
  if (!(domain.hi > domain.lo)) throw ValidationError("foliation: empty spatial domain");
}

SpacePoint Foliation::advance_to_leaf(double s_next, SpacePoint p, Vec2 d) const {
  if (!(d.t > 0.0)) throw DegenerateStepError("advance_to_leaf: direction not future-pointing");
  Vec2 const unit{1.0, d.x / d.t};
  double const rate = rate_along(p, unit);
  if (!(rate >= 1e-9)) throw DegenerateStepError("advance_to_leaf: direction tangent to leaves");
  double const gap = s_next - parameter_at(p);
  if (gap < -1e-12) throw ValidationError("advance_to_leaf: target leaf lies in the past");
  if (gap <= 0.0) return p;
  auto const h = [&](double lambda) { return parameter_at(p + lambda * unit) - s_next; };
  double hi = 1.5 * gap / rate;
  double hhi = h(hi);
  for (int k = 0; hhi < 0.0; ++k) {
    if (k > 60) throw DegenerateStepError("advance_to_leaf: no crossing found");
    hi *= 2.0;
    hhi = h(hi);
  }
  double const lambda = solve_increasing(h, 0.0, hi, -gap, hhi, 1e-13);
  return p + lambda * unit;
}

Vec2 Foliation::unit_normal(double s, double x) const {
  double const slope = leaf_slope(s, x);
  if (!(std::abs(slope) < 1.0)) throw ValidationError("unit_normal: leaf is not spacelike");
  double const g = 1.0 / std::sqrt(1.0 - slope * slope);
  return {g, g * slope};
}

Vec2 Foliation::normal_at(SpacePoint p) const {
  Vec2 const g = parameter_gradient(p);
  double const norm2 = g.t * g.t - g.x * g.x;
  if (!(g.t > 0.0) || !(norm2 > 0.0)) throw ValidationError("normal_at: leaf is not spacelike");
  double const inv = 1.0 / std::sqrt(norm2);
  return {g.t * inv, -g.x * inv};
}

double Foliation::length_element(double s, double x) const {
  double const slope = leaf_slope(s, x);
  if (!(std::abs(slope) < 1.0)) throw ValidationError("length_element: leaf is not spacelike");
  return std::sqrt(1.0 - slope * slope);
}

double Foliation::rate_along(SpacePoint p, Vec2 v) const {
  Vec2 const g = parameter_gradient(p);
  return g.t * v.t + g.x * v.x;
}

// --- Constructors ------------------------------------------------------------

FoliationPtr make_flat(double velocity, std::string label, Interval params, double offset,
                       Interval domain) {
  if (!(std::abs(velocity) < 1.0)) throw ValidationError("flat foliation: |v| must be < 1");
  return std::make_shared<FlatFoliation>(velocity, offset, std::move(label), params, domain);
}

double CurveShape::max_slope() const {
  if (type == Type::Tanh) return std::abs(amplitude) / width;
  return std::abs(amplitude) * std::abs(frequency);
}

double CurveShape::value(double x) const {
  if (type == Type::Tanh) return amplitude * std::tanh((x - center) / width);
  return amplitude * std::sin(frequency * x);
}

double CurveShape::slope(double x) const {
  if (type == Type::Tanh) {
    double const c = std::cosh((x - center) / width);
    return amplitude / (width * c * c);
  }
  return amplitude * frequency * std::cos(frequency * x);
}

FoliationPtr make_curved(CurveShape shape, std::string label, Interval params, Interval domain) {
  if (shape.type == CurveShape::Type::Tanh && !(shape.width > 0.0)) {
    throw ValidationError("curved foliation: width must be > 0");
  }
  if (!std::isfinite(shape.amplitude) || !std::isfinite(shape.frequency) || !std::isfinite(shape.center)) {
    throw ValidationError("curved foliation: non-finite shape parameter");
  }
  if (!(shape.max_slope() <= 0.8)) throw ValidationError("curved foliation: slope bound exceeds 0.8");
  return std::make_shared<CurvedFoliation>(shape, std::move(label), params, domain);
}

std::vector<SpacePoint> WorldLines::path(std::size_t i) const {
  std::vector<SpacePoint> out;
  out.reserve(crossings.size());
  for (auto const& row : crossings) out.push_back(row.at(i));
  return out;
}

FoliationPtr deform_foliation_away(FoliationPtr const& base, WorldLines const& lines,
                                   DeformOptions const& options) {
  if (!base) throw ValidationError("deform: null foliation");
  if (lines.leaves() < 2 || lines.particles() == 0) throw ValidationError("deform: trajectory too short");
  if (!(options.margin >= 0.0) || !(options.width > 0.0) || !(options.ramp_length > 0.0)) {
    throw ValidationError("deform: margin must be >= 0, width and ramp length > 0");
  }
  if (options.bump == 0.0) return base;
  auto const out = std::make_shared<DeformedFoliation>(base, lines, options);
  validate_foliation(*out, 0.95, 0.01, 41);
  return out;
}

// --- Transformations -----------------------------------------------------------

std::optional<double> flat_velocity(Foliation const& f) {
  if (auto const* flat = dynamic_cast<FlatFoliation const*>(&f)) return flat->velocity();
  return std::nullopt;
}

FoliationPtr transform_foliation(PoincareTransform const& g, FoliationPtr const& f) {
  if (!f) throw ValidationError("transform: null foliation");
  if (g.is_identity()) return f;
  if (auto const* flat = dynamic_cast<FlatFoliation const*>(f.get())) {
    double const gamma = 1.0 / std::sqrt(1.0 - flat->velocity() * flat->velocity());
    Vec2 const n = g.apply_vector({gamma, gamma * flat->velocity()});
    double const offset = flat->offset() + minkowski_dot(n, g.translation);
    return std::make_shared<FlatFoliation>(n.x / n.t, offset, f->label(), f->params(), f->domain());
  }
  if (auto const* tr = dynamic_cast<TransformedFoliation const*>(f.get())) {
    PoincareTransform const combined = g.after(tr->transform());
    if (combined.is_identity()) return tr->base();
    return std::make_shared<TransformedFoliation>(tr->base(), combined);
  }
  return std::make_shared<TransformedFoliation>(f, g);
}

Leaf transform_leaf(PoincareTransform const& g, Leaf const& leaf) {
  return {transform_foliation(g, leaf.foliation), leaf.s};
}

WorldLines transform_worldlines(PoincareTransform const& g, WorldLines const& lines,
                                FoliationPtr const& image_foliation) {
  WorldLines out = lines;
  if (image_foliation) out.foliation_label = image_foliation->label();
  for (auto& row : out.crossings) {
    for (auto& p : row) p = g.apply(p);
  }
  return out;
}

std::optional<SpacePoint> leaf_crossing(Foliation const& f, double s,
                                        std::span<SpacePoint const> polyline) {
  if (polyline.empty()) return std::nullopt;
  double prev = f.parameter_at(polyline[0]) - s;
  if (prev == 0.0) return polyline[0];
  for (std::size_t k = 1; k < polyline.size(); ++k) {
    double const cur = f.parameter_at(polyline[k]) - s;
    if (cur == 0.0) return polyline[k];
    if ((prev < 0.0) != (cur < 0.0)) {
      SpacePoint const a = polyline[k - 1];
      SpacePoint const b = polyline[k];
      auto h = [&](double u) { return f.parameter_at(a + u * (b - a)) - s; };
      double u;
      if (prev < 0.0) {
        u = solve_increasing(h, 0.0, 1.0, prev, cur, 1e-15);
      } else {
        auto neg = [&](double v) { return -h(v); };
        u = solve_increasing(neg, 0.0, 1.0, -prev, -cur, 1e-15);
      }
      return a + u * (b - a);
    }
    prev = cur;
  }
  return std::nullopt;
}

double validate_foliation(Foliation const& f, double slope_bound, double x_step,
                          std::size_t leaf_samples) {
  Interval const dom = f.domain();
  Interval const ps = f.params();
  std::size_t const nx = static_cast<std::size_t>(std::ceil(dom.length() / x_step)) + 1;
  double worst = 0.0;
  double prev_time = 0.0;
  for (std::size_t ix = 0; ix < nx; ++ix) {
    double const x = std::min(dom.lo + x_step * static_cast<double>(ix), dom.hi);
    for (std::size_t k = 0; k < leaf_samples; ++k) {
      double const s = ps.lo + ps.length() * static_cast<double>(k) / static_cast<double>(leaf_samples - 1);
      double const slope = std::abs(f.leaf_slope(s, x));
      worst = std::max(worst, slope);
      if (!(slope <= slope_bound)) {
        throw ValidationError("foliation " + f.label() + ": slope bound violated at x=" + format_number(x));
      }
      if (!(f.leaf_rate(s, x) > 0.0)) {
        throw ValidationError("foliation " + f.label() + ": leaves not ordered at x=" + format_number(x));
      }
      double const t = f.leaf_time(s, x);
      if (k > 0 && !(t > prev_time)) {
        throw ValidationError("foliation " + f.label() + ": leaves intersect at x=" + format_number(x));
      }
      prev_time = t;
    }
  }
  return worst;
}

}  // namespace bohm
