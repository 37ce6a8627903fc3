#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "bohm/rng.hpp"

namespace bohmsim {

using bohm::Interval;
using bohm::ValidationError;

namespace {

[[noreturn]] void fail(std::string const& where, std::string const& what) {
  throw ValidationError("config: " + where + ": " + what);
}

std::string show(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void require(bool ok, std::string const& where, std::string const& what) {
  if (!ok) fail(where, what);
}

}  // namespace

// --- Section --------------------------------------------------------------------

Section::Section(json const& node, std::string path) : node_(node), path_(std::move(path)) {
  if (!node_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
}

json const* Section::lookup(std::string const& key) {
  used_.push_back(key);
  auto const it = node_.find(key);
  if (it == node_.end() || it->is_null()) return nullptr;
  return &*it;
}

double Section::number(std::string const& key, std::optional<double> fallback) {
  json const* v = lookup(key);
  if (!v) {
    if (!fallback) fail(where(key), "required number is missing");
    return *fallback;
  }
  if (!v->is_number()) fail(where(key), "expected a number");
  double const d = v->get<double>();
  if (!std::isfinite(d)) fail(where(key), "must be finite");
  return d;
}

std::uint64_t Section::count(std::string const& key, std::optional<std::uint64_t> fallback) {
  json const* v = lookup(key);
  if (!v) {
    if (!fallback) fail(where(key), "required integer is missing");
    return *fallback;
  }
  if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0)) {
    fail(where(key), "expected a non-negative integer");
  }
  return v->get<std::uint64_t>();
}

std::string Section::text(std::string const& key, std::optional<std::string> fallback) {
  json const* v = lookup(key);
  if (!v) {
    if (!fallback) fail(where(key), "required string is missing");
    return *fallback;
  }
  if (!v->is_string()) fail(where(key), "expected a string");
  return v->get<std::string>();
}

std::vector<double> Section::numbers(std::string const& key, std::optional<std::vector<double>> fallback) {
  json const* v = lookup(key);
  if (!v) {
    if (!fallback) fail(where(key), "required array is missing");
    return *fallback;
  }
  if (!v->is_array()) fail(where(key), "expected an array of numbers");
  std::vector<double> out;
  for (auto const& e : *v) {
    if (!e.is_number()) fail(where(key), "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

Interval Section::interval(std::string const& key, std::optional<Interval> fallback) {
  std::optional<std::vector<double>> fb;
  if (fallback) fb = std::vector<double>{fallback->lo, fallback->hi};
  auto const v = numbers(key, fb);
  if (v.size() != 2) fail(where(key), "expected [lo, hi]");
  if (!(v[1] >= v[0])) fail(where(key), "expected lo <= hi");
  return {v[0], v[1]};
}

json const& Section::raw(std::string const& key) {
  json const* v = lookup(key);
  if (!v) fail(where(key), "required entry is missing");
  return *v;
}

Section Section::child(std::string const& key) {
  static json const empty = json::object();
  json const* v = lookup(key);
  return Section(v ? *v : empty, where(key));
}

void Section::finish() const {
  std::vector<std::string> unknown;
  for (auto const& [key, value] : node_.items()) {
    if (std::find(used_.begin(), used_.end(), key) == used_.end()) unknown.push_back(where(key));
  }
  if (unknown.empty()) return;
  std::string list;
  for (auto const& k : unknown) list += (list.empty() ? "" : ", ") + k;
  throw ValidationError("config: unknown key(s): " + list);
}

// --- Descriptors ------------------------------------------------------------------

bohm::FoliationPtr FoliationSpec::build(Interval params) const {
  if (kind == "flat") return bohm::make_flat(velocity, label, params, offset);
  return bohm::make_curved(shape, label, params);
}

namespace {

FoliationSpec parse_foliation(Section s) {
  FoliationSpec f;
  f.kind = s.text("kind", "flat");
  f.label = s.text("label", "");
  if (f.kind == "flat") {
    f.velocity = s.number("velocity", 0.0);
    f.offset = s.number("offset", 0.0);
    require(std::abs(f.velocity) < 1.0, s.where("velocity"), "|v| must be < 1 (got " + show(f.velocity) + ")");
  } else if (f.kind == "tanh") {
    f.shape.type = bohm::CurveShape::Type::Tanh;
    f.shape.amplitude = s.number("amplitude", 0.3);
    f.shape.center = s.number("center", 0.0);
    f.shape.width = s.number("width", 1.0);
    require(f.shape.width > 0.0, s.where("width"), "must be > 0");
  } else if (f.kind == "sine") {
    f.shape.type = bohm::CurveShape::Type::Sine;
    f.shape.amplitude = s.number("amplitude", 0.2);
    f.shape.frequency = s.number("frequency", 1.0);
  } else {
    fail(s.where("kind"), "expected flat, tanh or sine (got " + f.kind + ")");
  }
  if (f.kind != "flat") {
    require(f.shape.max_slope() <= 0.8, s.path(),
            "leaf slope bound " + show(f.shape.max_slope()) + " exceeds 0.8");
  }
  s.finish();
  return f;
}

std::vector<TermSpec> parse_terms(Section& s, std::size_t particles) {
  json const& arr = s.raw("terms");
  if (!arr.is_array() || arr.empty()) fail(s.where("terms"), "expected a non-empty array");
  std::vector<TermSpec> out;
  for (std::size_t k = 0; k < arr.size(); ++k) {
    Section t(arr[k], s.where("terms") + "[" + std::to_string(k) + "]");
    TermSpec term;
    auto const c = t.numbers("coefficient", std::vector<double>{1.0, 0.0});
    require(c.size() == 2, t.where("coefficient"), "expected [re, im]");
    term.coefficient = {c[0], c[1]};
    json const& packets = t.raw("packets");
    if (!packets.is_array() || packets.size() != particles) {
      fail(t.where("packets"), "expected one packet per particle (" + std::to_string(particles) + ")");
    }
    for (std::size_t i = 0; i < packets.size(); ++i) {
      Section p(packets[i], t.where("packets") + "[" + std::to_string(i) + "]");
      PacketSpec ps;
      ps.center = p.number("center", 0.0);
      ps.momentum = p.number("momentum", 0.0);
      ps.width = p.number("width", 1.0);
      ps.modes = p.count("modes", 64);
      require(ps.width > 0.0, p.where("width"), "must be > 0");
      require(ps.modes >= 2, p.where("modes"), "must be >= 2");
      p.finish();
      term.packets.push_back(ps);
    }
    t.finish();
    out.push_back(std::move(term));
  }
  return out;
}

std::vector<double> parse_masses(Section& s, std::vector<double> fallback) {
  auto const m = s.numbers("masses", fallback);
  require(!m.empty(), s.where("masses"), "at least one particle is required");
  for (double v : m) require(v > 0.0, s.where("masses"), "masses must be > 0");
  return m;
}

std::vector<TermSpec> single_term(std::vector<PacketSpec> packets) { return {TermSpec{{1.0, 0.0}, std::move(packets)}}; }

void check_samples(std::size_t samples, std::size_t bins, Section const& s) {
  require(samples >= 100, s.where("samples"), "must be >= 100");
  require(bins >= 1, s.where("bins"), "must be >= 1");
}

void check_steps(double lo, double hi, double step, Section const& s, std::string const& lo_key,
                 std::string const& hi_key, std::string const& step_key) {
  require(hi >= lo, s.where(hi_key), "must be >= " + lo_key);
  require(step > 0.0, s.where(step_key), "must be > 0");
}

}  // namespace

bohm::Event parse_event(json const& node, std::string const& path) {
  if (node.is_string()) {
    auto const s = node.get<std::string>();
    if (s == "always") return bohm::Event::always();
    if (s == "never") return bohm::Event::never();
    fail(path, "expected always, never or an event object");
  }
  if (!node.is_object() || node.size() != 1) fail(path, "an event object has exactly one operator key");
  auto const& [op, arg] = *node.items().begin();
  std::string const here = path + "." + op;
  if (op == "not") return !parse_event(arg, here);
  if (op == "and" || op == "or") {
    if (!arg.is_array() || arg.size() < 2) fail(here, "expected at least two operands");
    bohm::Event e = parse_event(arg[0], here + "[0]");
    for (std::size_t k = 1; k < arg.size(); ++k) {
      auto const next = parse_event(arg[k], here + "[" + std::to_string(k) + "]");
      e = op == "and" ? (e && next) : (e || next);
    }
    return e;
  }
  if (op == "crosses") {
    Section s(arg, here);
    auto const particle = s.count("particle");
    auto const t = s.interval("t");
    double const inf = std::numeric_limits<double>::infinity();
    json const& x = s.raw("x");
    if (!x.is_array() || x.size() != 2) fail(s.where("x"), "expected [lo, hi] with null for unbounded");
    auto const bound = [&](json const& v, double unbounded) {
      if (v.is_null()) return unbounded;
      if (!v.is_number()) fail(s.where("x"), "bounds must be numbers or null");
      return v.get<double>();
    };
    Interval const xi{bound(x[0], -inf), bound(x[1], inf)};
    require(xi.hi >= xi.lo, s.where("x"), "expected lo <= hi");
    s.finish();
    return bohm::Event::crosses(particle, {t, xi});
  }
  fail(here, "unknown event operator (expected crosses, and, or, not)");
}

bohm::FoliationFamily FamilyConfig::build() const {
  if (use_default) return bohm::default_family(params);
  std::vector<bohm::FoliationPtr> m;
  for (auto const& spec : members) m.push_back(spec.build(params));
  return bohm::FoliationFamily(std::move(m), params);
}

bohm::nr::WaveFunction NrConfig::make() const {
  std::vector<bohm::nr::ProductTerm> pts;
  for (auto const& t : terms) {
    bohm::nr::ProductTerm pt;
    pt.coefficient = t.coefficient;
    for (auto const& p : t.packets) pt.packets.push_back({p.center, p.momentum, p.width});
    pts.push_back(std::move(pt));
  }
  if (potential == "none") return bohm::nr::WaveFunction::analytic(masses, pts);
  bohm::nr::GridSpec spec = grid;
  spec.t_max = std::max(t0, t1);
  spec.potential.kind = bohm::nr::Potential::Kind::Harmonic;
  spec.potential.omega = omega;
  return bohm::nr::WaveFunction::grid(masses, pts, spec);
}

bohm::dirac::MultiTimeWaveFunction DiracConfig::make() const {
  std::vector<bohm::dirac::Term> ts;
  for (auto const& t : terms) {
    bohm::dirac::Term term;
    term.coefficient = t.coefficient;
    for (auto const& p : t.packets) {
      bohm::dirac::PacketSpec ps;
      ps.center = p.center;
      ps.momentum = p.momentum;
      ps.width = p.width;
      ps.modes = p.modes;
      term.factors.push_back(bohm::dirac::make_packet(ps));
    }
    ts.push_back(std::move(term));
  }
  bohm::dirac::MultiTimeWaveFunction const wf(masses, std::move(ts));
  return wf.normalized_on_rest_leaf(normalization_window.lo, normalization_window.hi);
}

// --- Whole document ---------------------------------------------------------------

json read_json_file(std::string const& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot read " + path);
  try {
    return json::parse(in);
  } catch (json::parse_error const& e) {
    throw ValidationError("config: " + path + " is not valid JSON: " + e.what());
  }
}

void apply_override(json& doc, std::string const& assignment) {
  auto const eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ValidationError("--set expects key=value, got " + assignment);
  std::string const key = assignment.substr(0, eq);
  std::string const text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (json::parse_error const&) {
    value = text;
  }
  std::string pointer;
  std::stringstream ss(key);
  for (std::string part; std::getline(ss, part, '.');) {
    if (part.empty()) throw ValidationError("--set: empty path component in " + key);
    pointer += "/" + part;
  }
  doc[json::json_pointer(pointer)] = value;
}

std::string hash_text(std::uint64_t hash) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << hash;
  return os.str();
}

Config parse_config(json const& doc) {
  Config c;
  c.resolved = doc;
  Section root(doc, "");
  c.seed = root.count("seed", 1);
  c.threads = static_cast<unsigned>(root.count("threads", 0));
  c.output_dir = root.text("output_dir", c.output_dir);

  {
    Section s = root.child("nr");
    c.nr.masses = parse_masses(s, {1.0});
    c.nr.terms = s.has("terms") ? parse_terms(s, c.nr.masses.size())
                                : single_term(std::vector<PacketSpec>(c.nr.masses.size()));
    Section pot = s.child("potential");
    c.nr.potential = pot.text("kind", "none");
    c.nr.omega = pot.number("omega", 1.0);
    require(c.nr.potential == "none" || c.nr.potential == "harmonic", pot.where("kind"),
            "expected none or harmonic");
    require(c.nr.omega > 0.0, pot.where("omega"), "must be > 0");
    pot.finish();
    Section grid = s.child("grid");
    c.nr.grid.length = grid.number("length", 40.0);
    c.nr.grid.points = grid.count("points", 64);
    c.nr.grid.dt = grid.number("dt", 1e-3);
    require(c.nr.grid.length > 0.0, grid.where("length"), "must be > 0");
    require(c.nr.grid.points >= 8, grid.where("points"), "must be >= 8");
    require(c.nr.grid.dt > 0.0, grid.where("dt"), "must be > 0");
    grid.finish();
    c.nr.initial = s.numbers("initial", std::vector<double>(c.nr.masses.size(), 1.0));
    require(c.nr.initial.size() == c.nr.masses.size(), s.where("initial"), "one position per particle");
    c.nr.t0 = s.number("t0", 0.0);
    c.nr.t1 = s.number("t1", 2.0);
    c.nr.h = s.number("h", 1e-3);
    check_steps(c.nr.t0, c.nr.t1, c.nr.h, s, "t0", "t1", "h");
    c.nr.samples = s.count("samples", 10000);
    c.nr.bins = s.count("bins", 30);
    check_samples(c.nr.samples, c.nr.bins, s);
    c.nr.velocity_scale = s.number("velocity_scale", 1.0);
    s.finish();
  }
  {
    Section s = root.child("dirac");
    c.dirac.masses = parse_masses(s, {1.0});
    c.dirac.terms = s.has("terms") ? parse_terms(s, c.dirac.masses.size())
                                   : single_term(std::vector<PacketSpec>(c.dirac.masses.size()));
    c.dirac.normalization_window = s.interval("normalization_window", Interval{-30.0, 30.0});
    require(c.dirac.normalization_window.length() > 0.0, s.where("normalization_window"), "must be non-empty");
    s.finish();
  }
  c.foliation = parse_foliation(root.child("foliation"));
  std::size_t const n = c.dirac.masses.size();
  {
    Section s = root.child("hbd");
    c.hbd.s0 = s.number("s0", 0.0);
    c.hbd.s1 = s.number("s1", 2.0);
    c.hbd.ds = s.number("ds", 1e-3);
    check_steps(c.hbd.s0, c.hbd.s1, c.hbd.ds, s, "s0", "s1", "ds");
    c.hbd.initial = s.numbers("initial", std::vector<double>(n, 0.0));
    require(c.hbd.initial.size() == n, s.where("initial"), "one leaf coordinate per particle");
    c.hbd.node_floor = s.number("node_floor", 1e-12);
    c.hbd.current_scale = s.number("current_scale", 1.0);
    require(c.hbd.node_floor >= 0.0, s.where("node_floor"), "must be >= 0");
    s.finish();
  }
  {
    Section s = root.child("ensemble");
    c.ensemble.s0 = s.number("s0", 0.0);
    c.ensemble.s1 = s.number("s1", 2.0);
    c.ensemble.ds = s.number("ds", 0.02);
    check_steps(c.ensemble.s0, c.ensemble.s1, c.ensemble.ds, s, "s0", "s1", "ds");
    c.ensemble.samples = s.count("samples", 10000);
    c.ensemble.bins = s.count("bins", 30);
    check_samples(c.ensemble.samples, c.ensemble.bins, s);
    c.ensemble.failure_budget = s.number("failure_budget", 0.01);
    require(c.ensemble.failure_budget >= 0.0 && c.ensemble.failure_budget <= 1.0, s.where("failure_budget"),
            "must lie in [0, 1]");
    c.ensemble.current_scale = s.number("current_scale", 1.0);
    c.ensemble.window = s.interval("window", Interval{-30.0, 30.0});
    s.finish();
  }
  {
    Section s = root.child("equivariance");
    c.equivariance_sector = s.text("sector", "dirac");
    require(c.equivariance_sector == "dirac" || c.equivariance_sector == "nr", s.where("sector"),
            "expected dirac or nr");
    s.finish();
  }
  {
    Section s = root.child("cross_foliation");
    if (s.has("prime")) {
      c.cross.prime = parse_foliation(s.child("prime"));
    } else {
      c.cross.prime.velocity = 0.6;
    }
    c.cross.s0 = s.number("s0", -12.5);
    c.cross.s1 = s.number("s1", 4.5);
    c.cross.ds = s.number("ds", 0.02);
    check_steps(c.cross.s0, c.cross.s1, c.cross.ds, s, "s0", "s1", "ds");
    c.cross.s_baseline = s.number("s_baseline", 0.0);
    require(c.cross.s_baseline >= c.cross.s0 && c.cross.s_baseline <= c.cross.s1, s.where("s_baseline"),
            "must lie in [s0, s1]");
    c.cross.s_prime = s.number("s_prime", 0.0);
    c.cross.samples = s.count("samples", 5000);
    c.cross.bins = s.count("bins", 10);
    check_samples(c.cross.samples, c.cross.bins, s);
    s.finish();
  }
  {
    Section s = root.child("family");
    c.family.params = s.interval("params", Interval{-5.0, 5.0});
    if (s.has("members")) {
      json const& m = s.raw("members");
      if (m.is_string()) {
        require(m.get<std::string>() == "default", s.where("members"), "expected \"default\" or an array");
      } else {
        if (!m.is_array() || m.empty()) fail(s.where("members"), "expected a non-empty array");
        c.family.use_default = false;
        for (std::size_t k = 0; k < m.size(); ++k) {
          c.family.members.push_back(parse_foliation(Section(m[k], s.where("members") + "[" + std::to_string(k) + "]")));
        }
      }
    }
    s.finish();
  }
  {
    Section s = root.child("pstar");
    c.pstar.samples = s.count("samples", 4000);
    require(c.pstar.samples >= 100, s.where("samples"), "must be >= 100");
    c.pstar.ds = s.number("ds", 0.02);
    require(c.pstar.ds > 0.0, s.where("ds"), "must be > 0");
    c.pstar.epsilon = s.number("epsilon", 0.02);
    require(c.pstar.epsilon > 0.0 && c.pstar.epsilon < 1.0, s.where("epsilon"), "must lie in (0, 1)");
    if (s.has("event")) c.pstar.event = parse_event(s.raw("event"), s.where("event"));
    Section cap = s.child("capacity");
    double const t = cap.number("time", 1.0);
    c.pstar.capacity = bohm::default_capacity_events(t);
    for (auto const& [key, slot] : {std::pair{"a", &c.pstar.capacity.a}, std::pair{"b", &c.pstar.capacity.b},
                                    std::pair{"c", &c.pstar.capacity.c}, std::pair{"d", &c.pstar.capacity.d}}) {
      if (cap.has(key)) *slot = parse_event(cap.raw(key), cap.where(key));
    }
    cap.finish();
    s.finish();
  }
  {
    Section s = root.child("covariance");
    c.covariance.boost_velocity = s.number("boost_velocity", 0.3);
    require(std::abs(c.covariance.boost_velocity) < 1.0, s.where("boost_velocity"),
            "|v| must be < 1 (got " + show(c.covariance.boost_velocity) + ")");
    auto const a = s.numbers("translation", std::vector<double>{0.0, 0.0});
    require(a.size() == 2, s.where("translation"), "expected [a0, a1]");
    c.covariance.translation = {a[0], a[1]};
    c.covariance.pstar_samples = s.count("pstar_samples", 0);
    require(c.covariance.pstar_samples == 0 || c.covariance.pstar_samples >= 100, s.where("pstar_samples"),
            "must be 0 or >= 100");
    s.finish();
  }
  {
    Section s = root.child("overlap");
    c.overlap.margin = s.number("margin", 1.5);
    c.overlap.bump = s.number("bump", 0.2);
    c.overlap.width = s.number("width", 1.0);
    c.overlap.ramp_length = s.number("ramp_length", 0.5);
    require(c.overlap.margin >= 0.0, s.where("margin"), "must be >= 0");
    require(c.overlap.width > 0.0, s.where("width"), "must be > 0");
    require(c.overlap.ramp_length > 0.0, s.where("ramp_length"), "must be > 0");
    s.finish();
  }
  {
    Section s = root.child("validate");
    c.validate.ensemble_samples = s.count("ensemble_samples", 2000);
    c.validate.pstar_samples = s.count("pstar_samples", 300);
    require(c.validate.ensemble_samples >= 100, s.where("ensemble_samples"), "must be >= 100");
    require(c.validate.pstar_samples >= 100, s.where("pstar_samples"), "must be >= 100");
    s.finish();
  }
  root.finish();

  json canonical = doc;
  canonical.erase("output_dir");
  canonical.erase("threads");
  canonical["seed"] = c.seed;
  c.hash = bohm::fnv1a64(canonical.dump());
  return c;
}

}  // namespace bohmsim
