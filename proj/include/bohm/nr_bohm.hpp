#pragma once

// Non-relativistic N-particle Bohmian mechanics, one spatial dimension per
// particle, natural units (hbar = 1).

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "bohm/common.hpp"

namespace bohm::nr {

/// Free Gaussian packet: |psi(x,0)|^2 is normal with mean `center` and
/// standard deviation `width`; mean momentum `momentum`.
struct GaussianPacket {
  double center = 0.0;
  double momentum = 0.0;
  double width = 1.0;
};

/// coefficient * prod_i packets[i](x_i)
struct ProductTerm {
  Complex coefficient{1.0, 0.0};
  std::vector<GaussianPacket> packets;
};

struct Potential {
  enum class Kind { None, Harmonic };
  Kind kind = Kind::None;
  double omega = 1.0;

  /// Potential energy contribution of one particle of `mass` at x.
  double value(double x, double mass) const {
    return kind == Kind::Harmonic ? 0.5 * mass * omega * omega * x * x : 0.0;
  }
};

/// Periodic grid on [-length/2, length/2)^N evolved by Strang split-step.
struct GridSpec {
  double length = 40.0;
  std::size_t points = 64;
  double dt = 1e-3;
  double t_max = 2.0;
  Potential potential;
};

/// psi, its gradient and the diagonal of its Hessian at one configuration.
struct LocalValue {
  Complex psi;
  std::vector<Complex> gradient;
  std::vector<Complex> second;
};

class Backend;

/// Immutable N-particle wave function. Two backends: exact free Gaussian
/// superpositions (V = 0) and a periodic split-step grid for general V.
/// Both are normalized at construction.
class WaveFunction {
 public:
  static WaveFunction analytic(std::vector<double> masses, std::vector<ProductTerm> terms);
  static WaveFunction grid(std::vector<double> masses, std::vector<ProductTerm> initial_terms,
                           GridSpec spec);

  std::size_t particle_count() const;
  std::span<double const> masses() const;
  bool is_grid() const;

  Complex amplitude(double t, std::span<double const> x) const;
  /// `second` is left empty unless with_second.
  LocalValue local(double t, std::span<double const> x, bool with_second = true) const;

  /// Writes the probability current j into `current` and returns |psi|^2,
  /// without allocating for the analytic backend.
  double current_into(double t, std::span<double const> x, std::span<double> current) const;

  /// Integral of |psi_t|^2 over configuration space.
  double norm(double t) const;

  /// Maximum of rho_t: a grid scan over the support box (analytic) or the
  /// largest nodal value (grid).
  double peak_density(double t) const;

  /// Per-axis box holding the state's mass at time t (8 packet widths for
  /// the analytic backend, the whole periodic box for the grid backend).
  std::vector<Interval> support(double t) const;

  /// Exact probabilities of the marginal of `axis` over `bins` equal bins
  /// of [lo, hi).
  std::vector<double> marginal_bin_probabilities(std::size_t axis, double t, double lo, double hi,
                                                 std::size_t bins) const;

 private:
  explicit WaveFunction(std::shared_ptr<Backend const> backend);
  std::shared_ptr<Backend const> backend_;
};

// ---------------------------------------------------------------------------
// Operations

double density(WaveFunction const& wf, double t, std::span<double const> x);

std::vector<double> current(WaveFunction const& wf, double t, std::span<double const> x);

/// j / rho. Throws NodeProximityError when rho <= node_floor.
std::vector<double> velocity(WaveFunction const& wf, double t, std::span<double const> x,
                             double node_floor = 0.0);

/// |d rho/dt + div j| with a central difference of step h_t in time and
/// exact (or spectral) spatial derivatives. Returns 0 where rho < 1e-300.
double continuity_residual(WaveFunction const& wf, double t, std::span<double const> x, double h_t);

inline double peak_density(WaveFunction const& wf, double t) { return wf.peak_density(t); }

struct Trajectory {
  std::size_t particles = 0;
  std::vector<double> times;
  /// configurations[k * particles + i] = x_i(times[k])
  std::vector<double> configurations;
  bool valid = true;

  std::span<double const> at(std::size_t k) const {
    return {configurations.data() + k * particles, particles};
  }
};

struct IntegrateOptions {
  /// Node guard. Negative means 1e-12 * peak_density(wf, t0).
  double node_floor = -1.0;
  /// Multiplies the guiding velocity; 1 is the physical law. Other values
  /// exist only for negative-control experiments.
  double velocity_scale = 1.0;
};

/// Classical fixed-step RK4 on dx/dt = j/rho from t0 to t1 with
/// K = ceil((t1 - t0)/h) uniform steps. On node proximity the partial
/// trajectory is returned with valid = false.
Trajectory integrate(WaveFunction const& wf, std::span<double const> x0, double t0, double t1,
                     double h, IntegrateOptions const& options = {});

/// M i.i.d. configurations from rho_t by rejection sampling from a uniform
/// box envelope. Sample m uses the random stream (seed, m).
std::vector<std::vector<double>> sample(WaveFunction const& wf, double t, std::size_t count,
                                        std::uint64_t seed, unsigned threads = 0);

struct EquivarianceReport {
  std::vector<double> l1;  ///< per axis
  double noise_floor = 0.0;
  std::size_t bins = 0;
  std::size_t samples = 0;
  std::size_t failures = 0;
  /// Histograms of the final positions per axis with their exact bin
  /// probabilities, for CSV output.
  std::vector<Interval> ranges;
  std::vector<std::vector<std::size_t>> counts;
  std::vector<std::vector<double>> expected;
};

struct EquivarianceOptions {
  double h = 1e-3;
  double velocity_scale = 1.0;
  unsigned threads = 0;
};

/// Samples from rho_{t0}, transports every configuration to t1 with the
/// guiding law and compares the empirical marginals with the exact
/// |psi_{t1}|^2 marginals (L1 histogram distance per axis).
EquivarianceReport equivariance(WaveFunction const& wf, double t0, double t1, std::size_t samples,
                                std::size_t bins, std::uint64_t seed,
                                EquivarianceOptions const& options = {});

}  // namespace bohm::nr
