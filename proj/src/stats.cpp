#include "bohm/stats.hpp"

#include <algorithm>
#include <cmath>

#include "bohm/common.hpp"

namespace bohm {

double simpson(std::function<double(double)> const& f, double a, double b, std::size_t intervals) {
  if (intervals < 2) intervals = 2;
  if (intervals % 2 == 1) ++intervals;
  double const h = (b - a) / static_cast<double>(intervals);
  double sum = f(a) + f(b);
  for (std::size_t i = 1; i < intervals; ++i) {
    sum += (i % 2 == 1 ? 4.0 : 2.0) * f(a + h * static_cast<double>(i));
  }
  return sum * h / 3.0;
}

std::vector<double> simpson_weights(std::size_t points, double step) {
  if (points < 3 || points % 2 == 0) {
    throw ValidationError("simpson_weights: need an odd number of points >= 3");
  }
  std::vector<double> w(points);
  for (std::size_t i = 0; i < points; ++i) {
    double const c = (i == 0 || i + 1 == points) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    w[i] = c * step / 3.0;
  }
  return w;
}

ProportionInterval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) throw ValidationError("wilson_interval: zero trials");
  double const n = static_cast<double>(trials);
  double const p = static_cast<double>(successes) / n;
  double const z2 = z * z;
  double const denom = 1.0 + z2 / n;
  double const centre = (p + z2 / (2.0 * n)) / denom;
  double const half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {p, std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

Histogram::Histogram(double lo, double hi, std::size_t bins)
    : lo_(lo), hi_(hi), width_((hi - lo) / static_cast<double>(bins)), counts_(bins, 0) {
  if (bins == 0 || !(hi > lo)) throw ValidationError("Histogram: empty range or zero bins");
}

void Histogram::add(double value) {
  ++total_;
  if (!(value >= lo_ && value < hi_)) {
    ++overflow_;
    return;
  }
  auto b = static_cast<std::size_t>((value - lo_) / width_);
  if (b >= counts_.size()) b = counts_.size() - 1;
  ++counts_[b];
}

double Histogram::l1_distance(std::span<double const> probabilities) const {
  if (probabilities.size() != counts_.size()) {
    throw ValidationError("Histogram::l1_distance: bin count mismatch");
  }
  if (total_ == 0) throw ValidationError("Histogram::l1_distance: empty histogram");
  double const n = static_cast<double>(total_);
  double distance = 0.0;
  double mass = 0.0;
  for (std::size_t b = 0; b < counts_.size(); ++b) {
    distance += std::abs(static_cast<double>(counts_[b]) / n - probabilities[b]);
    mass += probabilities[b];
  }
  distance += std::abs(static_cast<double>(overflow_) / n - std::max(0.0, 1.0 - mass));
  return distance;
}

double l1_noise_floor(std::size_t cells, std::size_t samples, double c) {
  return c * std::sqrt(static_cast<double>(cells) / static_cast<double>(samples));
}

}  // namespace bohm
