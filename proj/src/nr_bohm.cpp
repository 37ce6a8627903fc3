#include "bohm/nr_bohm.hpp"

#include <algorithm>
#include <cmath>

#include "bohm/parallel.hpp"
#include "bohm/rng.hpp"
#include "bohm/stats.hpp"

namespace bohm::nr {

double density(WaveFunction const& wf, double t, std::span<double const> x) {
  return std::norm(wf.amplitude(t, x));
}

std::vector<double> current(WaveFunction const& wf, double t, std::span<double const> x) {
  std::vector<double> j(wf.particle_count());
  wf.current_into(t, x, j);
  return j;
}

namespace {

void velocity_into(WaveFunction const& wf, double t, std::span<double const> x, double node_floor,
                   std::span<double> out) {
  double const rho = wf.current_into(t, x, out);
  if (!(rho > node_floor) || !(rho > 0.0)) {
    throw NodeProximityError("guiding velocity: density below node guard");
  }
  for (double& c : out) c /= rho;
}

}  // namespace

std::vector<double> velocity(WaveFunction const& wf, double t, std::span<double const> x,
                             double node_floor) {
  if (x.size() != wf.particle_count()) throw ValidationError("velocity: wrong configuration size");
  std::vector<double> v(x.size());
  velocity_into(wf, t, x, node_floor, v);
  return v;
}

double continuity_residual(WaveFunction const& wf, double t, std::span<double const> x, double h_t) {
  if (!(h_t > 0.0)) throw ValidationError("continuity_residual: h_t must be > 0");
  LocalValue const v = wf.local(t, x);
  if (std::norm(v.psi) < 1e-300) return 0.0;
  double const drho_dt = (density(wf, t + h_t, x) - density(wf, t - h_t, x)) / (2.0 * h_t);
  auto const masses = wf.masses();
  double divergence = 0.0;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    divergence += (std::conj(v.psi) * v.second[i]).imag() / masses[i];
  }
  return std::abs(drho_dt + divergence);
}

Trajectory integrate(WaveFunction const& wf, std::span<double const> x0, double t0, double t1,
                     double h, IntegrateOptions const& options) {
  std::size_t const n = wf.particle_count();
  if (x0.size() != n) throw ValidationError("integrate: wrong configuration size");
  if (!(h > 0.0)) throw ValidationError("integrate: step must be > 0");
  if (!(t1 >= t0)) throw ValidationError("integrate: need t1 >= t0");
  double const floor = options.node_floor >= 0.0 ? options.node_floor : 1e-12 * peak_density(wf, t0);
  if (!(density(wf, t0, x0) > floor)) {
    throw NodeProximityError("integrate: initial configuration at a node");
  }

  auto const steps = static_cast<std::size_t>(std::ceil((t1 - t0) / h - 1e-9));
  double const step = steps == 0 ? 0.0 : (t1 - t0) / static_cast<double>(steps);
  Trajectory traj;
  traj.particles = n;
  traj.times.reserve(steps + 1);
  traj.configurations.reserve((steps + 1) * n);
  traj.times.push_back(t0);
  traj.configurations.insert(traj.configurations.end(), x0.begin(), x0.end());

  std::vector<double> x(x0.begin(), x0.end()), tmp(n), k1(n), k2(n), k3(n), k4(n);
  auto field = [&](double t, std::span<double const> at, std::vector<double>& out) {
    velocity_into(wf, t, at, floor, out);
    for (double& c : out) c *= options.velocity_scale;
  };
  try {
    for (std::size_t k = 0; k < steps; ++k) {
      double const t = t0 + step * static_cast<double>(k);
      field(t, x, k1);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * step * k1[i];
      field(t + 0.5 * step, tmp, k2);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * step * k2[i];
      field(t + 0.5 * step, tmp, k3);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + step * k3[i];
      field(t + step, tmp, k4);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if (!std::isfinite(x[i])) throw NodeProximityError("integrate: non-finite position");
      }
      traj.times.push_back(k + 1 == steps ? t1 : t + step);
      traj.configurations.insert(traj.configurations.end(), x.begin(), x.end());
    }
  } catch (NodeProximityError const&) {
    traj.valid = false;
  } catch (DomainError const&) {
    traj.valid = false;
  }
  return traj;
}

std::vector<std::vector<double>> sample(WaveFunction const& wf, double t, std::size_t count,
                                        std::uint64_t seed, unsigned threads) {
  if (count == 0) throw ValidationError("sample: count must be >= 1");
  std::vector<Interval> const box = wf.support(t);
  double const envelope = 1.1 * peak_density(wf, t);
  if (!(envelope > 0.0) || !std::isfinite(envelope)) {
    throw EnvelopeError("sample: could not build a rejection envelope (zero or non-finite peak)");
  }
  std::size_t const n = wf.particle_count();
  std::vector<std::vector<double>> out(count);
  parallel_for(count, threads, [&](std::size_t m) {
    CounterRng rng(seed, m);
    std::vector<double> x(n);
    for (std::size_t attempt = 0; attempt < 100'000'000; ++attempt) {
      for (std::size_t i = 0; i < n; ++i) x[i] = rng.uniform(box[i].lo, box[i].hi);
      double const rho = density(wf, t, x);
      if (rho > envelope) throw EnvelopeError("sample: density exceeds the rejection envelope");
      if (rng.uniform() * envelope < rho) {
        out[m] = x;
        return;
      }
    }
    throw EnvelopeError("sample: rejection sampling did not terminate");
  });
  return out;
}

EquivarianceReport equivariance(WaveFunction const& wf, double t0, double t1, std::size_t samples,
                                std::size_t bins, std::uint64_t seed,
                                EquivarianceOptions const& options) {
  if (samples < 100) throw ValidationError("equivariance: need at least 100 samples");
  if (bins == 0) throw ValidationError("equivariance: bins must be >= 1");
  std::size_t const n = wf.particle_count();
  auto const initial = sample(wf, t0, samples, seed, options.threads);
  double const floor = 1e-12 * peak_density(wf, t0);

  std::vector<std::vector<double>> finals(samples);
  std::vector<char> ok(samples, 0);
  parallel_for(samples, options.threads, [&](std::size_t m) {
    IntegrateOptions io;
    io.node_floor = floor;
    io.velocity_scale = options.velocity_scale;
    Trajectory const traj = integrate(wf, initial[m], t0, t1, options.h, io);
    if (!traj.valid) return;
    auto const last = traj.at(traj.times.size() - 1);
    finals[m].assign(last.begin(), last.end());
    ok[m] = 1;
  });

  EquivarianceReport report;
  report.bins = bins;
  report.samples = samples;
  report.failures = static_cast<std::size_t>(std::count(ok.begin(), ok.end(), 0));
  report.noise_floor = l1_noise_floor(bins, samples);
  std::vector<Interval> const box = wf.support(t1);
  for (std::size_t i = 0; i < n; ++i) {
    // Histogram over the central 6-width region of the 8-width support box.
    double const centre = 0.5 * (box[i].lo + box[i].hi);
    double const half = 0.375 * (box[i].hi - box[i].lo);
    Interval const range = wf.is_grid() ? box[i] : Interval{centre - half, centre + half};
    Histogram hist(range.lo, range.hi, bins);
    for (std::size_t m = 0; m < samples; ++m) {
      if (ok[m]) hist.add(finals[m][i]);
    }
    auto const probs = wf.marginal_bin_probabilities(i, t1, range.lo, range.hi, bins);
    report.l1.push_back(hist.total() > 0 ? hist.l1_distance(probs) : 2.0);
    report.ranges.push_back(range);
    std::vector<std::size_t> counts(bins);
    for (std::size_t b = 0; b < bins; ++b) counts[b] = hist.count(b);
    report.counts.push_back(std::move(counts));
    report.expected.push_back(probs);
  }
  return report;
}

}  // namespace bohm::nr
