#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace bohm {

/// Composite Simpson rule on [a, b] with `intervals` sub-intervals (rounded
/// up to even).
double simpson(std::function<double(double)> const& f, double a, double b, std::size_t intervals);

/// Composite Simpson weights for `points` equally spaced nodes (points odd).
std::vector<double> simpson_weights(std::size_t points, double step);

struct ProportionInterval {
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// Wilson score interval for `successes` out of `trials` at z (default 95%).
ProportionInterval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

/// Uniform-bin histogram over [lo, hi). Samples outside the range land in a
/// single overflow cell so that frequencies always sum to one.
class Histogram {
 public:
  Histogram(double lo, double hi, std::size_t bins);

  void add(double value);
  std::size_t bins() const { return counts_.size(); }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double bin_lo(std::size_t b) const { return lo_ + width_ * static_cast<double>(b); }
  double bin_width() const { return width_; }
  std::size_t count(std::size_t b) const { return counts_[b]; }
  std::size_t overflow() const { return overflow_; }
  std::size_t total() const { return total_; }

  /// L1 distance sum_b |f_b - p_b| + |f_out - p_out| between the empirical
  /// frequencies and reference bin probabilities. p_out = 1 - sum(p).
  double l1_distance(std::span<double const> probabilities) const;

 private:
  double lo_, hi_, width_;
  std::vector<std::size_t> counts_;
  std::size_t overflow_ = 0;
  std::size_t total_ = 0;
};

/// Monte Carlo noise floor c * sqrt(cells / samples) for an L1 histogram
/// distance.
double l1_noise_floor(std::size_t cells, std::size_t samples, double c = 2.0);

}  // namespace bohm
