#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "bohm/ensemble.hpp"
#include "bohm/hbd.hpp"
#include "bohm/hypersurface.hpp"
#include "bohm/nolaw.hpp"
#include "bohm/nr_bohm.hpp"
#include "commands.hpp"

namespace py = pybind11;
using namespace bohm;

namespace {

using PyFoliation = std::shared_ptr<Foliation>;

PyFoliation mutable_ptr(FoliationPtr const& f) { return std::const_pointer_cast<Foliation>(f); }

using PacketTuple = std::tuple<double, double, double>;

dirac::MultiTimeWaveFunction make_dirac(std::vector<double> masses,
                                        std::vector<std::pair<Complex, std::vector<PacketTuple>>> const& terms,
                                        std::size_t modes, Interval window) {
  std::vector<dirac::Term> ts;
  for (auto const& [c, packets] : terms) {
    dirac::Term t{c, {}};
    for (auto const& [center, momentum, width] : packets) {
      dirac::PacketSpec spec;
      spec.center = center;
      spec.momentum = momentum;
      spec.width = width;
      spec.modes = modes;
      t.factors.push_back(dirac::make_packet(spec));
    }
    ts.push_back(std::move(t));
  }
  return dirac::MultiTimeWaveFunction(std::move(masses), std::move(ts)).normalized_on_rest_leaf(window.lo, window.hi);
}

nr::WaveFunction make_nr(std::vector<double> masses,
                         std::vector<std::pair<Complex, std::vector<PacketTuple>>> const& terms) {
  std::vector<nr::ProductTerm> ts;
  for (auto const& [c, packets] : terms) {
    nr::ProductTerm t{c, {}};
    for (auto const& [center, momentum, width] : packets) t.packets.push_back({center, momentum, width});
    ts.push_back(std::move(t));
  }
  return nr::WaveFunction::analytic(std::move(masses), std::move(ts));
}

std::vector<SpacePoint> on_leaf(Foliation const& f, double s, std::vector<double> const& xs) {
  std::vector<SpacePoint> out;
  for (double x : xs) out.push_back(f.leaf_point(s, x));
  return out;
}

EnsembleOptions ensemble_options(double ds, unsigned threads) {
  EnsembleOptions o;
  o.ds = ds;
  o.threads = threads;
  return o;
}

py::dict estimate_dict(LowerProbEstimate const& e) {
  py::dict d;
  d["value"] = e.value;
  d["argmin"] = e.argmin;
  d["lower_bound"] = e.lower_bound;
  d["upper_bound"] = e.upper_bound;
  py::dict per;
  for (auto const& f : e.per_foliation) {
    per[py::str(f.label)] = py::make_tuple(f.interval.estimate, f.interval.lower, f.interval.upper);
  }
  d["per_foliation"] = per;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bohmian trajectories along foliations of 1+1 Minkowski spacetime";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericalBudgetError>(m, "NumericalBudgetError", PyExc_RuntimeError);

  py::class_<Interval>(m, "Interval")
      .def(py::init<double, double>(), py::arg("lo"), py::arg("hi"))
      .def(py::init([](py::tuple const& t) {
        if (t.size() != 2) throw ValidationError("an interval needs exactly two bounds");
        return Interval{t[0].cast<double>(), t[1].cast<double>()};
      }))
      .def_readwrite("lo", &Interval::lo)
      .def_readwrite("hi", &Interval::hi);
  py::implicitly_convertible<py::tuple, Interval>();

  py::class_<SpacePoint>(m, "SpacePoint")
      .def(py::init<double, double>(), py::arg("t"), py::arg("x"))
      .def_readwrite("t", &SpacePoint::t)
      .def_readwrite("x", &SpacePoint::x)
      .def("__repr__", [](SpacePoint const& p) {
        std::ostringstream os;
        os << "SpacePoint(t=" << p.t << ", x=" << p.x << ")";
        return os.str();
      });

  py::class_<PoincareTransform>(m, "PoincareTransform")
      .def_static("identity", &PoincareTransform::identity)
      .def_static("frame_boost", &PoincareTransform::frame_boost, py::arg("velocity"))
      .def_static("translate", &PoincareTransform::translate, py::arg("a0"), py::arg("a1"))
      .def("after", &PoincareTransform::after)
      .def("inverse", &PoincareTransform::inverse)
      .def("apply", &PoincareTransform::apply)
      .def_property_readonly("velocity", &PoincareTransform::velocity);

  py::class_<Foliation, PyFoliation>(m, "Foliation")
      .def_property_readonly("label", &Foliation::label)
      .def("describe", &Foliation::describe)
      .def("leaf_time", &Foliation::leaf_time, py::arg("s"), py::arg("x"))
      .def("leaf_slope", &Foliation::leaf_slope, py::arg("s"), py::arg("x"))
      .def("parameter_at", [](Foliation const& f, double t, double x) { return f.parameter_at({t, x}); },
           py::arg("t"), py::arg("x"));

  m.def(
      "flat_foliation", [](double v, Interval params) { return mutable_ptr(make_flat(v, {}, params)); },
      py::arg("velocity"), py::arg("params") = Interval{0.0, 2.0});
  m.def(
      "tanh_foliation",
      [](double a, double center, double width, Interval params) {
        CurveShape s;
        s.amplitude = a;
        s.center = center;
        s.width = width;
        return mutable_ptr(make_curved(s, {}, params));
      },
      py::arg("amplitude"), py::arg("center") = 0.0, py::arg("width") = 1.0, py::arg("params") = Interval{0.0, 2.0});
  m.def(
      "sine_foliation",
      [](double a, double omega, Interval params) {
        CurveShape s;
        s.type = CurveShape::Type::Sine;
        s.amplitude = a;
        s.frequency = omega;
        return mutable_ptr(make_curved(s, {}, params));
      },
      py::arg("amplitude"), py::arg("frequency") = 1.0, py::arg("params") = Interval{0.0, 2.0});

  py::class_<dirac::MultiTimeWaveFunction>(m, "DiracWaveFunction")
      .def(py::init(&make_dirac), py::arg("masses"), py::arg("terms"), py::arg("modes") = 64,
           py::arg("window") = Interval{-30.0, 30.0})
      .def_property_readonly("particle_count", &dirac::MultiTimeWaveFunction::particle_count)
      .def("transformed", [](dirac::MultiTimeWaveFunction const& wf, PoincareTransform const& g) {
        return apply_poincare(g, wf);
      });

  m.def(
      "rho_sigma",
      [](dirac::MultiTimeWaveFunction const& wf, PyFoliation const& f, double s, std::vector<double> const& xs) {
        Leaf const leaf{f, s};
        auto const pts = on_leaf(*f, s, xs);
        return leaf_bilinears(wf, leaf, pts).rho;
      },
      py::arg("wf"), py::arg("foliation"), py::arg("s"), py::arg("xs"));
  m.def(
      "normalization",
      [](dirac::MultiTimeWaveFunction const& wf, PyFoliation const& f, double s, Interval range) {
        return normalization(wf, Leaf{f, s}, range).value;
      },
      py::arg("wf"), py::arg("foliation"), py::arg("s"), py::arg("range") = Interval{-20.0, 20.0});

  py::class_<WorldLines>(m, "WorldLines")
      .def_readonly("params", &WorldLines::params)
      .def_readonly("crossings", &WorldLines::crossings)
      .def_readonly("valid", &WorldLines::valid)
      .def_readonly("failure", &WorldLines::failure)
      .def_readonly("foliation_label", &WorldLines::foliation_label);

  m.def(
      "integrate_hbd",
      [](dirac::MultiTimeWaveFunction const& wf, PyFoliation const& f, std::vector<double> const& initial, double s0,
         double s1, double ds) {
        auto const pts = on_leaf(*f, s0, initial);
        return integrate_hbd(wf, f, pts, s0, s1, ds);
      },
      py::arg("wf"), py::arg("foliation"), py::arg("initial"), py::arg("s0"), py::arg("s1"), py::arg("ds") = 1e-3);
  m.def(
      "covariance_distance",
      [](dirac::MultiTimeWaveFunction const& wf, PyFoliation const& f, std::vector<double> const& initial, double s0,
         double s1, PoincareTransform const& g, double ds) {
        auto const pts = on_leaf(*f, s0, initial);
        return covariance_check(wf, f, pts, s0, s1, g, ds).distance;
      },
      py::arg("wf"), py::arg("foliation"), py::arg("initial"), py::arg("s0"), py::arg("s1"), py::arg("g"),
      py::arg("ds") = 1e-3);

  m.def(
      "sample_on_leaf",
      [](dirac::MultiTimeWaveFunction const& wf, PyFoliation const& f, double s, std::size_t count,
         std::uint64_t seed, unsigned threads) { return sample_on_leaf(wf, Leaf{f, s}, count, seed, {}, threads); },
      py::arg("wf"), py::arg("foliation"), py::arg("s"), py::arg("count"), py::arg("seed"), py::arg("threads") = 0);
  m.def(
      "equivariance_l1",
      [](dirac::MultiTimeWaveFunction const& wf, PyFoliation const& f, double s0, double s1, std::size_t count,
         std::size_t bins, std::uint64_t seed, double ds, unsigned threads) {
        auto const r = equivariance_rel(wf, f, s0, s1, count, bins, seed, ensemble_options(ds, threads));
        return py::make_tuple(r.l1, r.noise_floor);
      },
      py::arg("wf"), py::arg("foliation"), py::arg("s0"), py::arg("s1"), py::arg("count"), py::arg("bins"),
      py::arg("seed"), py::arg("ds") = 0.02, py::arg("threads") = 0);

  py::class_<nr::WaveFunction>(m, "NrWaveFunction")
      .def(py::init(&make_nr), py::arg("masses"), py::arg("terms"))
      .def("density", [](nr::WaveFunction const& wf, double t, std::vector<double> const& x) {
        return nr::density(wf, t, x);
      })
      .def("velocity", [](nr::WaveFunction const& wf, double t, std::vector<double> const& x) {
        return nr::velocity(wf, t, x);
      });
  m.def(
      "nr_integrate",
      [](nr::WaveFunction const& wf, std::vector<double> const& x0, double t0, double t1, double h) {
        auto const tr = nr::integrate(wf, x0, t0, t1, h);
        std::vector<std::vector<double>> xs;
        for (std::size_t k = 0; k < tr.times.size(); ++k) xs.emplace_back(tr.at(k).begin(), tr.at(k).end());
        return py::make_tuple(tr.times, xs, tr.valid);
      },
      py::arg("wf"), py::arg("x0"), py::arg("t0"), py::arg("t1"), py::arg("h") = 1e-3);

  py::class_<Event>(m, "Event")
      .def_static("always", &Event::always)
      .def_static("never", &Event::never)
      .def_static(
          "crosses",
          [](std::size_t particle, Interval t, Interval x) { return Event::crosses(particle, Rectangle{t, x}); },
          py::arg("particle"), py::arg("t"), py::arg("x"))
      .def("__and__", [](Event const& a, Event const& b) { return a && b; })
      .def("__or__", [](Event const& a, Event const& b) { return a || b; })
      .def("__invert__", [](Event const& a) { return !a; })
      .def("transformed", &Event::transformed)
      .def("evaluate", &Event::evaluate)
      .def("describe", &Event::describe);

  py::class_<FoliationFamily>(m, "FoliationFamily")
      .def(py::init([](std::vector<PyFoliation> const& members, Interval params) {
             return FoliationFamily({members.begin(), members.end()}, params);
           }),
           py::arg("members"), py::arg("params"))
      .def_property_readonly("labels", &FoliationFamily::labels)
      .def("__len__", &FoliationFamily::size);
  m.def("default_family", &default_family, py::arg("params") = Interval{-5.0, 5.0});

  m.def(
      "p_star",
      [](Event const& e, FoliationFamily const& family, dirac::MultiTimeWaveFunction const& wf, std::size_t samples,
         std::uint64_t seed, double ds, unsigned threads) {
        return estimate_dict(p_star(e, family, wf, samples, seed, ensemble_options(ds, threads)));
      },
      py::arg("event"), py::arg("family"), py::arg("wf"), py::arg("samples"), py::arg("seed"), py::arg("ds") = 0.02,
      py::arg("threads") = 0);
  m.def(
      "is_typical",
      [](double lower_bound, double epsilon) {
        LowerProbEstimate e;
        e.lower_bound = lower_bound;
        auto const v = is_typical(e, epsilon);
        return py::make_tuple(v.typical, v.text);
      },
      py::arg("lower_bound"), py::arg("epsilon") = 0.02);
  m.def("wilson_interval", [](std::size_t k, std::size_t n) {
    auto const w = wilson_interval(k, n);
    return py::make_tuple(w.estimate, w.lower, w.upper);
  });

  m.def("commands", &bohmsim::command_names);
  m.def(
      "run",
      [](std::string const& command, std::string const& config_json, std::string const& out_dir) {
        auto doc = bohmsim::json::parse(config_json);
        doc["output_dir"] = out_dir;
        auto const cfg = bohmsim::parse_config(doc);
        bohmsim::OutputDir out(cfg.output_dir);
        bohmsim::Report report;
        report.set("command", command);
        report.set("config_hash", bohmsim::hash_text(cfg.hash));
        report.set("seed", cfg.seed);
        std::ostringstream log;
        int const code = bohmsim::run_command(command, cfg, out, report, log);
        out.write("report.txt", report.render());
        return py::make_tuple(code, report.render());
      },
      py::arg("command"), py::arg("config_json"), py::arg("out_dir"));
}
