#include "bohm/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bohm/hypersurface.hpp"
#include "bohm/parallel.hpp"
#include "bohm/rng.hpp"

namespace bohm {

namespace {

constexpr std::uint32_t kSamplingSubstream = 1;
constexpr std::size_t kMaxProposals = 50'000'000;
constexpr std::size_t kNodesPerBin = 16;

std::vector<double> uniform_nodes(Interval r, std::size_t points) {
  std::vector<double> xs(points);
  double const h = r.length() / static_cast<double>(points - 1);
  for (std::size_t q = 0; q < points; ++q) xs[q] = r.lo + h * static_cast<double>(q);
  return xs;
}

/// Per-bin integrals of every table entry of `particle`: out[(bin * K + a) * K + b].
std::vector<Complex> bin_integrals(LeafFactorTable const& table, std::size_t particle, std::size_t bins,
                                   double h) {
  std::size_t const k = table.terms();
  auto const w = simpson_weights(kNodesPerBin + 1, h);
  std::vector<Complex> out(bins * k * k);
  for (std::size_t bin = 0; bin < bins; ++bin) {
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) {
        Complex s{};
        for (std::size_t q = 0; q <= kNodesPerBin; ++q) {
          s += w[q] * table.entry(particle, bin * kNodesPerBin + q, a, b);
        }
        out[(bin * k + a) * k + b] = s;
      }
    }
  }
  return out;
}

LeafFactorTable window_table(dirac::MultiTimeWaveFunction const& wf, Leaf const& leaf, Interval window,
                             double step, std::vector<double>& weights) {
  std::size_t points = static_cast<std::size_t>(std::ceil(window.length() / step)) + 1;
  if (points % 2 == 0) ++points;
  weights = simpson_weights(points, window.length() / static_cast<double>(points - 1));
  return LeafFactorTable(wf, leaf, uniform_nodes(window, points));
}

double default_scan_step(std::size_t particles) {
  switch (particles) {
    case 1:
      return 0.01;
    case 2:
      return 0.05;
    case 3:
      return 0.25;
    default:
      return 0.5;
  }
}

void check_count(std::size_t count) {
  if (count == 0) throw ValidationError("ensemble: sample count must be > 0");
}

}  // namespace

// --- Sampling ------------------------------------------------------------------

LeafSampler::LeafSampler(dirac::MultiTimeWaveFunction wf, Leaf leaf, SamplerOptions const& options)
    : wf_(std::move(wf)), leaf_(std::move(leaf)) {
  if (!leaf_.foliation) throw ValidationError("sampler: null foliation");
  if (!(options.safety >= 1.0)) throw ValidationError("sampler: safety factor must be >= 1");
  std::size_t const n = wf_.particle_count();
  box_ = leaf_support(wf_, leaf_, options.window, 1e-9);
  double const step = options.scan_step > 0.0 ? options.scan_step : default_scan_step(n);

  Interval hull = box_.front();
  for (auto const& b : box_) hull = {std::min(hull.lo, b.lo), std::max(hull.hi, b.hi)};
  std::size_t const points = static_cast<std::size_t>(std::ceil(hull.length() / step)) + 1;
  if (std::pow(static_cast<double>(points), static_cast<double>(n)) > 5e7) {
    throw EnvelopeError("sampler: envelope scan too large; increase scan_step");
  }
  LeafFactorTable const table(wf_, leaf_, uniform_nodes(hull, points));
  std::vector<std::pair<std::size_t, std::size_t>> ranges(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto const& xs = table.xs();
    auto const lo = std::lower_bound(xs.begin(), xs.end(), box_[i].lo);
    auto const hi = std::upper_bound(xs.begin(), xs.end(), box_[i].hi);
    std::size_t const a = static_cast<std::size_t>(lo - xs.begin());
    std::size_t const b = static_cast<std::size_t>(hi - xs.begin());
    ranges[i] = {a > 0 ? a - 1 : a, std::min(b + 1, xs.size())};
  }
  std::vector<std::size_t> q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = ranges[i].first;
  double peak = 0.0;
  for (;;) {
    peak = std::max(peak, table.density(q));
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (++q[i] < ranges[i].second) break;
      q[i] = ranges[i].first;
      if (i == 0) {
        i = n + 1;
        break;
      }
    }
    if (i == n + 1) break;
  }
  if (!(peak > 0.0)) throw EnvelopeError("sampler: density vanishes on the leaf");
  envelope_ = options.safety * peak;
}

double LeafSampler::density(std::span<double const> xs) const {
  std::vector<SpacePoint> config(xs.size());
  double dl = 1.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    config[i] = leaf_.point(xs[i]);
    dl *= leaf_.foliation->length_element(leaf_.s, xs[i]);
  }
  return leaf_bilinears(wf_, leaf_, config, false).rho * dl;
}

std::vector<SpacePoint> LeafSampler::draw(std::uint64_t seed, std::uint64_t index) const {
  CounterRng rng(seed, index, kSamplingSubstream);
  std::size_t const n = box_.size();
  std::vector<double> xs(n);
  for (std::size_t attempt = 0; attempt < kMaxProposals; ++attempt) {
    for (std::size_t i = 0; i < n; ++i) xs[i] = rng.uniform(box_[i].lo, box_[i].hi);
    double const u = rng.uniform() * envelope_;
    double const d = density(xs);
    if (d > envelope_) throw EnvelopeError("sampler: density exceeds the envelope");
    if (u < d) {
      std::vector<SpacePoint> out(n);
      for (std::size_t i = 0; i < n; ++i) out[i] = leaf_.point(xs[i]);
      return out;
    }
  }
  throw EnvelopeError("sampler: proposal budget exhausted");
}

std::vector<std::vector<SpacePoint>> sample_on_leaf(dirac::MultiTimeWaveFunction const& wf, Leaf const& leaf,
                                                    std::size_t count, std::uint64_t seed,
                                                    SamplerOptions const& options, unsigned threads) {
  check_count(count);
  LeafSampler const sampler(wf, leaf, options);
  std::vector<std::vector<SpacePoint>> out(count);
  parallel_for(count, threads, [&](std::size_t j) { out[j] = sampler.draw(seed, j); });
  return out;
}

// --- Propagation ----------------------------------------------------------------

std::size_t propagate_ensemble(dirac::MultiTimeWaveFunction const& wf, FoliationPtr const& foliation,
                               double s0, double s1, std::size_t count, std::uint64_t seed,
                               EnsembleOptions const& options,
                               std::function<void(std::size_t, WorldLines const&)> const& visit) {
  check_count(count);
  if (!foliation) throw ValidationError("ensemble: null foliation");
  LeafSampler const sampler(wf, Leaf{foliation, s0}, options.sampler);
  std::vector<char> failed(count, 0);
  parallel_for(count, options.threads, [&](std::size_t j) {
    auto const config = sampler.draw(seed, j);
    auto const lines = integrate_hbd(wf, foliation, config, s0, s1, options.ds, options.hbd);
    failed[j] = lines.valid ? 0 : 1;
    visit(j, lines);
  });
  auto const failures = static_cast<std::size_t>(std::count(failed.begin(), failed.end(), 1));
  if (static_cast<double>(failures) > options.failure_budget * static_cast<double>(count)) {
    throw NumericalBudgetError("ensemble: " + std::to_string(failures) + " of " + std::to_string(count) +
                               " trajectories failed on " + foliation->label());
  }
  return failures;
}

EnsembleRun run_ensemble(dirac::MultiTimeWaveFunction const& wf, FoliationPtr const& foliation, double s0,
                         double s1, std::size_t count, std::uint64_t seed, EnsembleOptions const& options) {
  EnsembleRun run;
  run.foliation_label = foliation ? foliation->label() : std::string{};
  run.s0 = s0;
  run.s1 = s1;
  run.samples = count;
  run.seed = seed;
  run.trajectories.resize(count);
  run.failures = propagate_ensemble(wf, foliation, s0, s1, count, seed, options,
                                    [&](std::size_t j, WorldLines const& w) { run.trajectories[j] = w; });
  return run;
}

// --- Exact leaf distributions ---------------------------------------------------------

std::vector<Interval> leaf_support(dirac::MultiTimeWaveFunction const& wf, Leaf const& leaf, Interval window,
                                   double tail) {
  if (!(window.hi > window.lo)) throw ValidationError("leaf_support: empty window");
  std::vector<double> w;
  auto const table = window_table(wf, leaf, window, 0.02, w);
  auto const& xs = table.xs();
  std::vector<Interval> out;
  for (std::size_t i = 0; i < wf.particle_count(); ++i) {
    auto const m = table.marginals(i, w);
    std::vector<double> cum(xs.size(), 0.0);
    for (std::size_t q = 1; q < xs.size(); ++q) {
      cum[q] = cum[q - 1] + 0.5 * (std::max(m[q], 0.0) + std::max(m[q - 1], 0.0)) * (xs[q] - xs[q - 1]);
    }
    double const total = cum.back();
    if (!(total > 0.0)) throw ValidationError("leaf_support: no mass in the window");
    auto const lo = std::lower_bound(cum.begin(), cum.end(), 0.5 * tail * total);
    auto const hi = std::lower_bound(cum.begin(), cum.end(), (1.0 - 0.5 * tail) * total);
    std::size_t const a = static_cast<std::size_t>(lo - cum.begin());
    std::size_t const b = static_cast<std::size_t>(hi - cum.begin());
    out.push_back({xs[a > 0 ? a - 1 : 0], xs[std::min(b, xs.size() - 1)]});
  }
  return out;
}

std::vector<double> leaf_marginal_bins(dirac::MultiTimeWaveFunction const& wf, Leaf const& leaf,
                                       std::size_t particle, Interval range, std::size_t bins, Interval window) {
  if (particle >= wf.particle_count()) throw ValidationError("marginal: particle out of range");
  if (bins == 0 || !(range.hi > range.lo)) throw ValidationError("marginal: bad binning");
  std::size_t const k = wf.terms().size();
  std::vector<double> ww;
  auto const whole = window_table(wf, leaf, window, 0.01, ww);
  auto const ints = whole.integrals(ww);
  std::size_t const nodes = bins * kNodesPerBin + 1;
  LeafFactorTable const fine(wf, leaf, uniform_nodes(range, nodes));
  double const h = range.length() / static_cast<double>(nodes - 1);
  auto const per_bin = bin_integrals(fine, particle, bins, h);
  std::vector<double> out(bins);
  for (std::size_t bin = 0; bin < bins; ++bin) {
    Complex total{};
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) {
        Complex v = std::conj(fine.coefficient(a)) * fine.coefficient(b) * per_bin[(bin * k + a) * k + b];
        for (std::size_t j = 0; j < wf.particle_count(); ++j) {
          if (j != particle) v *= ints[(j * k + a) * k + b];
        }
        total += v;
      }
    }
    out[bin] = total.real();
  }
  return out;
}

std::vector<double> leaf_joint_bins(dirac::MultiTimeWaveFunction const& wf, Leaf const& leaf, Interval range0,
                                    Interval range1, std::size_t bins) {
  if (wf.particle_count() != 2) throw ValidationError("joint bins need exactly two particles");
  if (bins == 0) throw ValidationError("joint bins: bins must be > 0");
  std::size_t const k = wf.terms().size();
  std::size_t const nodes = bins * kNodesPerBin + 1;
  LeafFactorTable const t0(wf, leaf, uniform_nodes(range0, nodes));
  LeafFactorTable const t1(wf, leaf, uniform_nodes(range1, nodes));
  auto const b0 = bin_integrals(t0, 0, bins, range0.length() / static_cast<double>(nodes - 1));
  auto const b1 = bin_integrals(t1, 1, bins, range1.length() / static_cast<double>(nodes - 1));
  std::vector<double> out(bins * bins);
  for (std::size_t u = 0; u < bins; ++u) {
    for (std::size_t v = 0; v < bins; ++v) {
      Complex total{};
      for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) {
          total += std::conj(t0.coefficient(a)) * t0.coefficient(b) * b0[(u * k + a) * k + b] *
                   b1[(v * k + a) * k + b];
        }
      }
      out[u * bins + v] = total.real();
    }
  }
  return out;
}

// --- Distribution checks -----------------------------------------------------------

double DistanceReport::max_l1() const {
  double m = 0.0;
  for (double v : l1) m = std::max(m, v);
  return m;
}

namespace {

/// Marginal comparison of per-trajectory points (NaN: missing).
DistanceReport compare_marginals(dirac::MultiTimeWaveFunction const& wf, Leaf const& leaf,
                                 std::vector<std::vector<double>> const& xs, std::size_t bins, Interval window) {
  std::size_t const n = wf.particle_count();
  DistanceReport r;
  r.bins = bins;
  r.cells = bins;
  r.samples = xs.size();
  r.noise_floor = l1_noise_floor(bins, xs.size());
  r.ranges = leaf_support(wf, leaf, window, 1e-4);
  for (std::size_t i = 0; i < n; ++i) {
    Histogram hist(r.ranges[i].lo, r.ranges[i].hi, bins);
    for (auto const& row : xs) hist.add(std::isnan(row[i]) ? std::numeric_limits<double>::infinity() : row[i]);
    auto expected = leaf_marginal_bins(wf, leaf, i, r.ranges[i], bins, window);
    r.l1.push_back(hist.l1_distance(expected));
    std::vector<std::size_t> counts(bins);
    for (std::size_t b = 0; b < bins; ++b) counts[b] = hist.count(b);
    r.counts.push_back(std::move(counts));
    r.expected.push_back(std::move(expected));
  }
  return r;
}

DistanceReport compare_joint(dirac::MultiTimeWaveFunction const& wf, Leaf const& leaf,
                             std::vector<std::vector<double>> const& xs, std::size_t bins, Interval window) {
  DistanceReport r;
  r.bins = bins;
  r.cells = bins * bins;
  r.samples = xs.size();
  r.noise_floor = l1_noise_floor(r.cells, xs.size());
  r.ranges = leaf_support(wf, leaf, window, 1e-3);
  auto const expected = leaf_joint_bins(wf, leaf, r.ranges[0], r.ranges[1], bins);
  std::vector<std::size_t> counts(r.cells, 0);
  std::size_t outside = 0;
  auto const cell = [&](double x, Interval range) -> std::ptrdiff_t {
    if (std::isnan(x) || x < range.lo || x >= range.hi) return -1;
    auto const b = static_cast<std::size_t>((x - range.lo) / range.length() * static_cast<double>(bins));
    return static_cast<std::ptrdiff_t>(std::min(b, bins - 1));
  };
  for (auto const& row : xs) {
    auto const u = cell(row[0], r.ranges[0]);
    auto const v = cell(row[1], r.ranges[1]);
    if (u < 0 || v < 0) {
      ++outside;
      continue;
    }
    ++counts[static_cast<std::size_t>(u) * bins + static_cast<std::size_t>(v)];
  }
  double const total = static_cast<double>(xs.size());
  double l1 = 0.0;
  double inside = 0.0;
  for (std::size_t c = 0; c < r.cells; ++c) {
    l1 += std::abs(static_cast<double>(counts[c]) / total - expected[c]);
    inside += expected[c];
  }
  l1 += std::abs(static_cast<double>(outside) / total - std::max(0.0, 1.0 - inside));
  r.l1 = {l1};
  r.counts = {std::move(counts)};
  r.expected = {expected};
  return r;
}

}  // namespace

DistanceReport equivariance_rel(dirac::MultiTimeWaveFunction const& wf, FoliationPtr const& foliation,
                                double s0, double s1, std::size_t count, std::size_t bins, std::uint64_t seed,
                                EnsembleOptions const& options) {
  if (count < 100) throw ValidationError("equivariance: need at least 100 samples");
  if (bins == 0) throw ValidationError("equivariance: bins must be > 0");
  std::size_t const n = wf.particle_count();
  std::vector<std::vector<double>> finals(count, std::vector<double>(n, std::numeric_limits<double>::quiet_NaN()));
  auto const failures = propagate_ensemble(wf, foliation, s0, s1, count, seed, options,
                                           [&](std::size_t j, WorldLines const& w) {
                                             if (!w.valid) return;
                                             for (std::size_t i = 0; i < n; ++i) finals[j][i] = w.crossings.back()[i].x;
                                           });
  auto r = compare_marginals(wf, Leaf{foliation, s1}, finals, bins, options.sampler.window);
  r.failures = failures;
  return r;
}

CrossFoliationReport cross_foliation_test(dirac::MultiTimeWaveFunction const& wf, FoliationPtr const& f,
                                          FoliationPtr const& f_prime, double s0, double s1, double s_baseline,
                                          double s_prime, std::size_t count, std::size_t bins,
                                          std::uint64_t seed, EnsembleOptions const& options) {
  if (!f || !f_prime) throw ValidationError("cross_foliation: null foliation");
  std::size_t const n = wf.particle_count();
  if (n > 2) throw ValidationError("cross_foliation: at most two particles");
  if (!(s_baseline >= s0 && s_baseline <= s1)) throw ValidationError("cross_foliation: baseline leaf outside the run");
  double const nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::vector<double>> base(count, std::vector<double>(n, nan));
  std::vector<std::vector<double>> cross(count, std::vector<double>(n, nan));
  auto const failures = propagate_ensemble(wf, f, s0, s1, count, seed, options, [&](std::size_t j, WorldLines const& w) {
    for (std::size_t i = 0; i < n; ++i) {
      auto const path = w.path(i);
      if (auto const p = leaf_crossing(*f, s_baseline, path)) base[j][i] = p->x;
      if (auto const p = leaf_crossing(*f_prime, s_prime, path)) cross[j][i] = p->x;
    }
  });
  Interval const window = options.sampler.window;
  CrossFoliationReport r;
  Leaf const base_leaf{f, s_baseline};
  Leaf const cross_leaf{f_prime, s_prime};
  if (n == 2) {
    r.baseline = compare_joint(wf, base_leaf, base, bins, window);
    r.cross = compare_joint(wf, cross_leaf, cross, bins, window);
  } else {
    r.baseline = compare_marginals(wf, base_leaf, base, bins, window);
    r.cross = compare_marginals(wf, cross_leaf, cross, bins, window);
  }
  r.baseline.failures = failures;
  r.cross.failures = failures;
  r.ratio = r.baseline.max_l1() > 0.0 ? r.cross.max_l1() / r.baseline.max_l1()
                                      : std::numeric_limits<double>::infinity();
  return r;
}

ProportionInterval estimate_event_prob(Event const& event, EnsembleRun const& run) {
  if (run.trajectories.empty()) throw ValidationError("estimate_event_prob: empty run");
  if (run.failures >= run.trajectories.size()) throw NumericalBudgetError("estimate_event_prob: every trajectory failed");
  std::size_t hits = 0;
  for (auto const& w : run.trajectories) hits += event.evaluate(w) ? 1 : 0;
  return wilson_interval(hits, run.trajectories.size());
}

}  // namespace bohm
