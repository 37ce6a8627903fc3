#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "bohm/ensemble.hpp"
#include "bohm/hbd.hpp"
#include "bohm/hypersurface.hpp"
#include "bohm/nolaw.hpp"
#include "bohm/nr_bohm.hpp"
#include "bohm/rng.hpp"

namespace bohmsim {

using namespace bohm;

namespace {

struct Context {
  Config const& cfg;
  OutputDir& out;
  Report& report;
  std::ostream& log;

  std::string provenance(std::string const& command) const {
    return "command=" + command + " config_hash=" + hash_text(cfg.hash) + " seed=" + std::to_string(cfg.seed);
  }
};

EnsembleOptions ensemble_options(Config const& cfg, double ds) {
  EnsembleOptions o;
  o.ds = ds;
  o.threads = cfg.threads;
  o.failure_budget = cfg.ensemble.failure_budget;
  o.hbd.node_floor = cfg.hbd.node_floor;
  o.hbd.current_scale = cfg.ensemble.current_scale;
  o.sampler.window = cfg.ensemble.window;
  return o;
}

std::vector<SpacePoint> initial_points(Foliation const& f, double s, std::vector<double> const& xs) {
  std::vector<SpacePoint> out;
  for (double x : xs) out.push_back(f.leaf_point(s, x));
  return out;
}

std::string lines_csv(WorldLines const& w, std::string const& provenance) {
  Csv csv(provenance, {"s", "particle", "t", "x"});
  for (std::size_t k = 0; k < w.leaves(); ++k) {
    for (std::size_t i = 0; i < w.particles(); ++i) {
      csv.cell(w.params[k]).cell(std::uint64_t{i}).cell(w.crossings[k][i].t).cell(w.crossings[k][i].x);
      csv.end_row();
    }
  }
  return csv.str();
}

std::string marginal_csv(std::vector<Interval> const& ranges, std::vector<std::vector<std::size_t>> const& counts,
                         std::vector<std::vector<double>> const& expected, std::size_t samples,
                         std::string const& provenance) {
  Csv csv(provenance, {"particle", "bin", "bin_lo", "bin_hi", "count", "frequency", "expected"});
  for (std::size_t i = 0; i < counts.size(); ++i) {
    std::size_t const bins = counts[i].size();
    double const w = ranges[i].length() / static_cast<double>(bins);
    for (std::size_t b = 0; b < bins; ++b) {
      csv.cell(std::uint64_t{i}).cell(std::uint64_t{b});
      csv.cell(ranges[i].lo + w * static_cast<double>(b)).cell(ranges[i].lo + w * static_cast<double>(b + 1));
      csv.cell(std::uint64_t{counts[i][b]});
      csv.cell(static_cast<double>(counts[i][b]) / static_cast<double>(samples)).cell(expected[i][b]);
      csv.end_row();
    }
  }
  return csv.str();
}

std::string joint_csv(DistanceReport const& r, std::string const& provenance) {
  Csv csv(provenance, {"bin0", "bin1", "x0_lo", "x0_hi", "x1_lo", "x1_hi", "count", "frequency", "expected"});
  double const w0 = r.ranges[0].length() / static_cast<double>(r.bins);
  double const w1 = r.ranges[1].length() / static_cast<double>(r.bins);
  for (std::size_t u = 0; u < r.bins; ++u) {
    for (std::size_t v = 0; v < r.bins; ++v) {
      std::size_t const c = r.counts[0][u * r.bins + v];
      csv.cell(std::uint64_t{u}).cell(std::uint64_t{v});
      csv.cell(r.ranges[0].lo + w0 * static_cast<double>(u)).cell(r.ranges[0].lo + w0 * static_cast<double>(u + 1));
      csv.cell(r.ranges[1].lo + w1 * static_cast<double>(v)).cell(r.ranges[1].lo + w1 * static_cast<double>(v + 1));
      csv.cell(std::uint64_t{c}).cell(static_cast<double>(c) / static_cast<double>(r.samples));
      csv.cell(r.expected[0][u * r.bins + v]);
      csv.end_row();
    }
  }
  return csv.str();
}

std::string distance_csv(DistanceReport const& r, std::string const& provenance) {
  if (r.cells == r.bins * r.bins && r.l1.size() == 1 && r.ranges.size() == 2 && r.bins > 1) {
    return joint_csv(r, provenance);
  }
  return marginal_csv(r.ranges, r.counts, r.expected, r.samples, provenance);
}

void report_estimate(Report& report, std::string const& prefix, LowerProbEstimate const& e) {
  report.set(prefix + ".value", e.value);
  report.set(prefix + ".argmin", e.argmin);
  report.set(prefix + ".lower_bound", e.lower_bound);
  report.set(prefix + ".argmin_upper", e.upper_bound);
  for (auto const& f : e.per_foliation) {
    std::string const key = prefix + ".foliation[" + f.label + "]";
    report.set(key + ".estimate", f.interval.estimate);
    report.set(key + ".ci", "[" + format_double(f.interval.lower) + ", " + format_double(f.interval.upper) + "]");
    report.set(key + ".failures", std::uint64_t{f.failures});
  }
}

std::string tally_csv(FamilyTally const& t, std::vector<std::string> const& names, std::string const& provenance) {
  Csv csv(provenance, {"foliation", "seed", "event", "hits", "samples", "failures", "estimate", "ci_lower",
                       "ci_upper"});
  for (std::size_t k = 0; k < t.labels.size(); ++k) {
    for (std::size_t e = 0; e < t.predicates(); ++e) {
      auto const ci = wilson_interval(t.hits[k][e], t.samples);
      csv.cell(t.labels[k]).cell(std::uint64_t{t.seeds[k]}).cell(names[e]);
      csv.cell(std::uint64_t{t.hits[k][e]}).cell(std::uint64_t{t.samples}).cell(std::uint64_t{t.failures[k]});
      csv.cell(ci.estimate).cell(ci.lower).cell(ci.upper);
      csv.end_row();
    }
  }
  return csv.str();
}

PoincareTransform configured_transform(Config const& cfg) {
  return PoincareTransform::translate(cfg.covariance.translation.t, cfg.covariance.translation.x)
      .after(PoincareTransform::frame_boost(cfg.covariance.boost_velocity));
}

// --- Subcommands ------------------------------------------------------------------

int simulate_nr(Context& c) {
  auto const& nr = c.cfg.nr;
  auto const wf = nr.make();
  nr::IntegrateOptions opts;
  opts.velocity_scale = nr.velocity_scale;
  auto const traj = nr::integrate(wf, nr.initial, nr.t0, nr.t1, nr.h, opts);
  std::vector<std::string> header{"t"};
  for (std::size_t i = 0; i < traj.particles; ++i) header.push_back("x" + std::to_string(i));
  Csv csv(c.provenance("simulate-nr"), header);
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    csv.cell(traj.times[k]);
    for (double x : traj.at(k)) csv.cell(x);
    csv.end_row();
  }
  c.out.write("trajectory_nr.csv", csv.str());
  c.report.set("steps", std::uint64_t{traj.times.size() - 1});
  c.report.set("valid", traj.valid);
  c.report.set("final_time", traj.times.back());
  auto const last = traj.at(traj.times.size() - 1);
  for (std::size_t i = 0; i < last.size(); ++i) c.report.set("final_x" + std::to_string(i), last[i]);
  return 0;
}

int simulate_hbd(Context& c) {
  auto const& h = c.cfg.hbd;
  auto const wf = c.cfg.dirac.make();
  auto const f = c.cfg.foliation.build({h.s0, std::max(h.s1, h.s0 + 1e-9)});
  auto const init = initial_points(*f, h.s0, h.initial);
  HbdOptions opts{h.node_floor, h.current_scale};
  auto const w = integrate_hbd(wf, f, init, h.s0, h.s1, h.ds, opts);
  c.out.write("trajectory_hbd.csv", lines_csv(w, c.provenance("simulate-hbd")));
  c.report.set("foliation", f->label());
  c.report.set("leaves", std::uint64_t{w.leaves()});
  c.report.set("valid", w.valid);
  if (!w.valid) c.report.set("failure", w.failure);
  for (std::size_t i = 0; i < w.particles(); ++i) {
    c.report.set("final_t" + std::to_string(i), w.crossings.back()[i].t);
    c.report.set("final_x" + std::to_string(i), w.crossings.back()[i].x);
  }
  return 0;
}

int equivariance(Context& c) {
  auto const& cfg = c.cfg;
  double l1 = 0.0;
  double floor = 0.0;
  if (cfg.equivariance_sector == "nr") {
    auto const wf = cfg.nr.make();
    nr::EquivarianceOptions o;
    o.h = cfg.nr.h;
    o.velocity_scale = cfg.nr.velocity_scale;
    o.threads = cfg.threads;
    auto const r = nr::equivariance(wf, cfg.nr.t0, cfg.nr.t1, cfg.nr.samples, cfg.nr.bins, cfg.seed, o);
    c.out.write("histogram_equivariance.csv",
                marginal_csv(r.ranges, r.counts, r.expected, r.samples, c.provenance("equivariance")));
    l1 = *std::max_element(r.l1.begin(), r.l1.end());
    floor = r.noise_floor;
    for (std::size_t i = 0; i < r.l1.size(); ++i) c.report.set("l1[" + std::to_string(i) + "]", r.l1[i]);
    c.report.set("failures", std::uint64_t{r.failures});
  } else {
    auto const& e = cfg.ensemble;
    auto const wf = cfg.dirac.make();
    auto const f = cfg.foliation.build({e.s0, std::max(e.s1, e.s0 + 1e-9)});
    auto const r = equivariance_rel(wf, f, e.s0, e.s1, e.samples, e.bins, cfg.seed, ensemble_options(cfg, e.ds));
    c.out.write("histogram_equivariance.csv", distance_csv(r, c.provenance("equivariance")));
    l1 = r.max_l1();
    floor = r.noise_floor;
    for (std::size_t i = 0; i < r.l1.size(); ++i) c.report.set("l1[" + std::to_string(i) + "]", r.l1[i]);
    c.report.set("foliation", f->label());
    c.report.set("failures", std::uint64_t{r.failures});
  }
  c.report.set("sector", cfg.equivariance_sector);
  c.report.set("l1_max", l1);
  c.report.set("noise_floor", floor);
  c.report.set("within_3x_noise_floor", l1 <= 3.0 * floor);
  return 0;
}

int cross_foliation(Context& c) {
  auto const& x = c.cfg.cross;
  auto const wf = c.cfg.dirac.make();
  auto const f = c.cfg.foliation.build({x.s0, std::max(x.s1, x.s0 + 1e-9)});
  auto const fp = x.prime.build({x.s_prime - 1.0, x.s_prime + 1.0});
  auto const r = cross_foliation_test(wf, f, fp, x.s0, x.s1, x.s_baseline, x.s_prime, x.samples, x.bins, c.cfg.seed,
                                      ensemble_options(c.cfg, x.ds));
  c.out.write("histogram_baseline.csv", distance_csv(r.baseline, c.provenance("cross-foliation")));
  c.out.write("histogram_cross.csv", distance_csv(r.cross, c.provenance("cross-foliation")));
  c.report.set("foliation", f->label());
  c.report.set("prime", fp->label());
  c.report.set("distribution", r.baseline.cells == r.baseline.bins ? "marginal" : "joint");
  c.report.set("baseline_l1", r.baseline.max_l1());
  c.report.set("cross_l1", r.cross.max_l1());
  c.report.set("noise_floor", r.baseline.noise_floor);
  c.report.set("ratio", r.ratio);
  c.report.set("failures", std::uint64_t{r.baseline.failures});
  c.report.set("cross_exceeds_3x_baseline", r.cross.max_l1() >= 3.0 * r.baseline.max_l1());
  return 0;
}

int pstar(Context& c) {
  auto const& p = c.cfg.pstar;
  if (!p.event) throw ValidationError("config: pstar.event: required for pstar");
  auto const wf = c.cfg.dirac.make();
  auto const family = c.cfg.family.build();
  auto const tally = tally_family({label_blind(*p.event)}, family, wf, p.samples, c.cfg.seed,
                                  ensemble_options(c.cfg, p.ds));
  auto const est = lower_probability(tally, 0);
  auto const verdict = is_typical(est, p.epsilon);
  c.out.write("pstar_table.csv", tally_csv(tally, {p.event->describe()}, c.provenance("pstar")));
  c.report.set("event", p.event->describe());
  c.report.set("family_size", std::uint64_t{family.size()});
  report_estimate(c.report, "pstar", est);
  c.report.set("epsilon", p.epsilon);
  c.report.set("typical", verdict.typical);
  c.report.set("verdict", verdict.text);
  return 0;
}

int pstar_properties(Context& c) {
  auto const& p = c.cfg.pstar;
  auto const wf = c.cfg.dirac.make();
  auto const family = c.cfg.family.build();
  auto const r = check_capacity_properties(family, wf, p.samples, c.cfg.seed, p.capacity,
                                           ensemble_options(c.cfg, p.ds));
  std::vector<std::string> const names{"empty", "whole", "A", "B", "A or B", "A and B", "C", "D"};
  c.out.write("capacity_table.csv", tally_csv(r.tally, names, c.provenance("pstar-properties")));
  c.report.set("family_size", std::uint64_t{family.size()});
  c.report.set("event.A", p.capacity.a.describe());
  c.report.set("event.B", p.capacity.b.describe());
  c.report.set("event.C", p.capacity.c.describe());
  c.report.set("event.D", p.capacity.d.describe());
  for (std::size_t e = 0; e < names.size(); ++e) {
    c.report.set("pstar[" + names[e] + "]", lower_probability(r.tally, e).value);
  }
  for (auto const& chk : r.checks) {
    c.report.set("property." + chk.name, chk.pass ? "pass" : "fail");
    c.report.set("property." + chk.name + ".detail", chk.detail);
  }
  c.report.set("all_pass", r.all_pass());
  return r.all_pass() ? 0 : 1;
}

int covariance(Context& c) {
  auto const& h = c.cfg.hbd;
  auto const wf = c.cfg.dirac.make();
  auto const f = c.cfg.foliation.build({h.s0, std::max(h.s1, h.s0 + 1e-9)});
  auto const g = configured_transform(c.cfg);
  auto const r = covariance_check(wf, f, initial_points(*f, h.s0, h.initial), h.s0, h.s1, g, h.ds);
  c.report.set("boost_velocity", c.cfg.covariance.boost_velocity);
  c.report.set("sup_distance", r.distance);
  c.report.set("refined_sup_distance", r.refined_distance);
  c.report.set("refinement_slope", r.refinement_slope);
  c.report.set("decreasing", r.decreasing);
  bool ok = r.distance <= kIntegratorTolerance && r.decreasing;
  c.report.set("trajectory_covariant", ok);
  if (c.cfg.covariance.pstar_samples > 0) {
    Event const event = c.cfg.pstar.event ? *c.cfg.pstar.event : c.cfg.pstar.capacity.a;
    auto const cmp = covariance_p_star(event, c.cfg.family.build(), wf, g, c.cfg.covariance.pstar_samples,
                                       c.cfg.seed, ensemble_options(c.cfg, c.cfg.pstar.ds));
    report_estimate(c.report, "pstar.original", cmp.original);
    report_estimate(c.report, "pstar.transformed", cmp.transformed);
    c.report.set("pstar.ci_overlap", cmp.overlap);
    ok = ok && cmp.overlap;
  }
  return ok ? 0 : 1;
}

int overlap(Context& c) {
  auto const& h = c.cfg.hbd;
  auto const wf = c.cfg.dirac.make();
  auto const f = c.cfg.foliation.build({h.s0, std::max(h.s1, h.s0 + 1e-9)});
  auto const w = integrate_hbd(wf, f, initial_points(*f, h.s0, h.initial), h.s0, h.s1, h.ds);
  if (!w.valid) throw NumericalBudgetError("overlap-check: reference trajectory failed: " + w.failure);
  auto const r = overlap_check(wf, f, w, c.cfg.overlap, h.ds);
  DeformOptions control = c.cfg.overlap;
  control.margin = 0.0;
  auto const neg = overlap_check(wf, f, w, control, h.ds);
  c.out.write("trajectory_reference.csv", lines_csv(w, c.provenance("overlap-check")));
  c.out.write("trajectory_deformed.csv", lines_csv(r.deformed_run, c.provenance("overlap-check")));
  c.report.set("margin", c.cfg.overlap.margin);
  c.report.set("bump", c.cfg.overlap.bump);
  c.report.set("sup_distance", r.distance);
  c.report.set("tolerance", r.tolerance);
  c.report.set("same_trajectory", r.success);
  c.report.set("control_margin0_sup_distance", neg.distance);
  c.report.set("control_margin0_differs", !neg.success);
  return r.success && !neg.success ? 0 : 1;
}

// --- validate ------------------------------------------------------------------------

class Suite {
 public:
  explicit Suite(Context& c) : c_(c) {}

  template <class Check>
  void run(std::string const& name, Check&& check) {
    std::string detail;
    bool pass = false;
    try {
      pass = check(detail);
    } catch (Error const& e) {
      detail = std::string("error: ") + e.what();
    }
    c_.report.set("invariant." + name, pass ? "pass" : "fail");
    c_.report.set("invariant." + name + ".detail", detail);
    c_.log << (pass ? "PASS " : "FAIL ") << name << "  " << detail << "\n";
    all_ = all_ && pass;
  }

  bool all() const { return all_; }

 private:
  Context& c_;
  bool all_ = true;
};

int validate(Context& c) {
  auto const& cfg = c.cfg;
  auto const wf = cfg.dirac.make();
  auto const n = wf.particle_count();
  Suite suite(c);

  suite.run("nr_guiding_oracle", [&](std::string& d) {
    nr::ProductTerm term{{1.0, 0.0}, {{0.0, 0.0, 1.0}}};
    auto const free = nr::WaveFunction::analytic({1.0}, {term});
    std::vector<double> const x0{1.0};
    auto const traj = nr::integrate(free, x0, 0.0, 2.0, 1e-3);
    double const err = std::abs(traj.at(traj.times.size() - 1)[0] - std::sqrt(2.0));
    d = "|x(2) - sqrt(2)| = " + format_double(err);
    return traj.valid && err <= 1e-8;
  });
  suite.run("nr_equivariance", [&](std::string& d) {
    nr::ProductTerm term{{1.0, 0.0}, {{0.0, 0.5, 1.0}}};
    auto const free = nr::WaveFunction::analytic({1.0}, {term});
    nr::EquivarianceOptions o;
    o.threads = cfg.threads;
    auto const r = nr::equivariance(free, 0.0, 1.0, cfg.validate.ensemble_samples, 20, cfg.seed, o);
    d = "l1 = " + format_double(r.l1[0]) + ", 3x floor = " + format_double(3.0 * r.noise_floor);
    return r.l1[0] <= 3.0 * r.noise_floor;
  });
  auto const residuals = dirac::structure_residuals();
  suite.run("dirac_clifford", [&](std::string& d) {
    d = "max residual " + format_double(residuals.clifford);
    return residuals.clifford <= 1e-12;
  });
  suite.run("dirac_mode_equation", [&](std::string& d) {
    d = "max residual " + format_double(residuals.mode_equation);
    return residuals.mode_equation <= 1e-12;
  });
  suite.run("dirac_spinor_intertwining", [&](std::string& d) {
    d = "max residual " + format_double(residuals.intertwining);
    return residuals.intertwining <= 1e-12;
  });
  suite.run("positivity_causality", [&](std::string& d) {
    auto const f = cfg.foliation.build({cfg.hbd.s0, std::max(cfg.hbd.s1, cfg.hbd.s0 + 1e-9)});
    auto const tilted = make_flat(0.6);
    CounterRng rng(cfg.seed, 0, 7);
    double worst_rho = 0.0;
    double worst_cone = 0.0;
    std::size_t const cases = 1000;
    for (std::size_t k = 0; k < cases; ++k) {
      Leaf const leaf{k % 2 ? tilted : f, rng.uniform(cfg.hbd.s0, cfg.hbd.s1)};
      std::vector<SpacePoint> conf;
      for (std::size_t i = 0; i < n; ++i) conf.push_back(leaf.point(rng.uniform(-8.0, 8.0)));
      auto const b = leaf_bilinears(wf, leaf, conf);
      worst_rho = std::min(worst_rho, b.rho);
      for (auto const& j : b.currents) worst_cone = std::min(worst_cone, j.t - std::abs(j.x));
    }
    d = std::to_string(cases) + " cases, min rho " + format_double(worst_rho) + ", min j0-|j1| " +
        format_double(worst_cone);
    return worst_rho >= -1e-12 && worst_cone >= -1e-12;
  });
  suite.run("normalization_leaf_independent", [&](std::string& d) {
    auto const f = cfg.foliation.build({-1.0, 1.0});
    std::vector<Leaf> const leaves{{make_flat(0.0), 0.0}, {make_flat(0.6), 0.0}, {f, 0.0}};
    double worst = 0.0;
    for (auto const& leaf : leaves) {
      worst = std::max(worst, std::abs(normalization(wf, leaf, cfg.dirac.normalization_window).value - 1.0));
    }
    d = "max |norm - 1| on rest, v=0.6 and configured leaves: " + format_double(worst);
    return worst <= 2e-3;
  });
  suite.run("hbd_covariance", [&](std::string& d) {
    auto const f = cfg.foliation.build({cfg.hbd.s0, std::max(cfg.hbd.s1, cfg.hbd.s0 + 1e-9)});
    auto const r = covariance_check(wf, f, initial_points(*f, cfg.hbd.s0, cfg.hbd.initial), cfg.hbd.s0,
                                    cfg.hbd.s1, configured_transform(cfg), cfg.hbd.ds);
    d = "sup distance " + format_double(r.distance) + ", refined " + format_double(r.refined_distance);
    return r.distance <= kIntegratorTolerance && r.decreasing;
  });
  suite.run("foliation_overlap", [&](std::string& d) {
    auto const f = cfg.foliation.build({cfg.hbd.s0, std::max(cfg.hbd.s1, cfg.hbd.s0 + 1e-9)});
    auto const w = integrate_hbd(wf, f, initial_points(*f, cfg.hbd.s0, cfg.hbd.initial), cfg.hbd.s0, cfg.hbd.s1,
                                 cfg.hbd.ds);
    auto const r = overlap_check(wf, f, w, cfg.overlap, cfg.hbd.ds);
    DeformOptions control = cfg.overlap;
    control.margin = 0.0;
    auto const neg = overlap_check(wf, f, w, control, cfg.hbd.ds);
    d = "protected " + format_double(r.distance) + ", unprotected " + format_double(neg.distance);
    return r.success && !neg.success;
  });
  suite.run("relativistic_equivariance", [&](std::string& d) {
    auto const& e = cfg.ensemble;
    auto const f = cfg.foliation.build({e.s0, std::max(e.s1, e.s0 + 1e-9)});
    auto const r = equivariance_rel(wf, f, e.s0, e.s1, cfg.validate.ensemble_samples, std::min<std::size_t>(e.bins, 20),
                                    cfg.seed, ensemble_options(cfg, e.ds));
    d = "l1 = " + format_double(r.max_l1()) + ", 3x floor = " + format_double(3.0 * r.noise_floor);
    return r.max_l1() <= 3.0 * r.noise_floor;
  });
  suite.run("capacity_properties", [&](std::string& d) {
    auto const r = check_capacity_properties(cfg.family.build(), wf, cfg.validate.pstar_samples, cfg.seed,
                                             cfg.pstar.capacity, ensemble_options(cfg, cfg.pstar.ds));
    for (auto const& chk : r.checks) d += (d.empty() ? "" : "; ") + chk.name + (chk.pass ? " ok" : " FAILED");
    return r.all_pass();
  });
  suite.run("deterministic_sampling", [&](std::string& d) {
    Leaf const leaf{cfg.foliation.build({-1.0, 1.0}), 0.0};
    auto const a = sample_on_leaf(wf, leaf, 200, cfg.seed, {}, 1);
    auto const b = sample_on_leaf(wf, leaf, 200, cfg.seed, {}, 0);
    d = "200 configurations drawn serially and in parallel";
    return a == b;
  });
  c.report.set("all_pass", suite.all());
  return suite.all() ? 0 : 1;
}

}  // namespace

std::vector<std::string> const& command_names() {
  static std::vector<std::string> const names{"simulate-nr",     "simulate-hbd", "equivariance",
                                              "cross-foliation", "pstar",        "pstar-properties",
                                              "covariance-check", "overlap-check", "validate"};
  return names;
}

int run_command(std::string const& name, Config const& config, OutputDir& out, Report& report, std::ostream& log) {
  Context c{config, out, report, log};
  if (name == "simulate-nr") return simulate_nr(c);
  if (name == "simulate-hbd") return simulate_hbd(c);
  if (name == "equivariance") return equivariance(c);
  if (name == "cross-foliation") return cross_foliation(c);
  if (name == "pstar") return pstar(c);
  if (name == "pstar-properties") return pstar_properties(c);
  if (name == "covariance-check") return covariance(c);
  if (name == "overlap-check") return overlap(c);
  if (name == "validate") return validate(c);
  throw ValidationError("unknown command " + name);
}

}  // namespace bohmsim
