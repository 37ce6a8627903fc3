#pragma once

// Free multi-time Dirac wave functions in 1+1 dimensions.
//
// Gamma matrices: gamma0 = [[1,0],[0,-1]], gamma1 = [[0,1],[-1,0]], metric
// (+,-). A plane-wave mode with momentum p and branch s is
//   u_s(p) exp(-i s E t + i p x),   E = sqrt(p^2 + m^2),
// with (gamma0 s E - gamma1 p - m) u_s(p) = 0 and u^dagger u = 1:
//   u_+(p) ~ (E + m, p),   u_-(p) ~ (-p, E + m).

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "bohm/common.hpp"
#include "bohm/poincare.hpp"

namespace bohm::dirac {

/// Row-major 2x2 complex matrix.
struct Matrix2 {
  std::array<Complex, 4> a{};

  static Matrix2 identity() { return {{Complex{1}, Complex{}, Complex{}, Complex{1}}}; }
  Complex operator()(int r, int c) const { return a[2 * r + c]; }

  friend Matrix2 operator*(Matrix2 const& x, Matrix2 const& y);
  friend Matrix2 operator+(Matrix2 const& x, Matrix2 const& y);
  friend Matrix2 operator-(Matrix2 const& x, Matrix2 const& y);
  friend Matrix2 operator*(Complex s, Matrix2 const& x);
};

/// Largest entry modulus.
double max_abs(Matrix2 const& m);

Matrix2 gamma0();
Matrix2 gamma1();

/// gamma^mu n_mu = gamma0 n^0 - gamma1 n^1 for a future unit timelike n.
/// Throws ValidationError unless n^0 > 0 and |n.n - 1| <= 1e-9.
Matrix2 gamma_dot(Vec2 n);

using Spinor = std::array<Complex, 2>;

enum class Branch : int { Positive = 1, Negative = -1 };

inline double energy(double momentum, double mass) { return std::hypot(momentum, mass); }

/// Unit-norm spinor u_s(p).
Spinor mode_spinor(double momentum, double mass, Branch branch);

/// gamma0 E_s - gamma1 p - m, whose kernel holds u_s(p).
Matrix2 dirac_operator(double signed_energy, double momentum, double mass);

struct PlaneWaveMode {
  double momentum = 0.0;
  Branch branch = Branch::Positive;
  Complex coefficient{1.0, 0.0};
};

/// Gaussian wave packet built from a finite uniform momentum grid. Its
/// position density at t = 0 is approximately normal with mean `center` and
/// standard deviation `width`. The mode sum is periodic in x with period
/// 2 pi / dp; choose `modes` so the period exceeds the region of interest.
struct PacketSpec {
  double center = 0.0;
  double momentum = 0.0;
  double width = 1.0;
  Branch branch = Branch::Positive;
  std::size_t modes = 64;
  double cutoff = 6.0;  ///< momentum half-range in momentum widths 1/(2 width)
};

std::vector<PlaneWaveMode> make_packet(PacketSpec const& spec);

/// Spatial period 2 pi / dp of a packet's mode sum.
double packet_period(PacketSpec const& spec);

/// coefficient * (factors[0] (x) factors[1] (x) ...), each factor a
/// superposition of plane-wave modes of one particle.
struct Term {
  Complex coefficient{1.0, 0.0};
  std::vector<std::vector<PlaneWaveMode>> factors;
};

/// psi: M^N -> (C^2)^{(x)N}. Component index c has the spin of particle i in
/// bit (N - 1 - i), i.e. particle 0 is the most significant factor.
class MultiTimeWaveFunction {
 public:
  MultiTimeWaveFunction(std::vector<double> masses, std::vector<Term> terms);

  std::size_t particle_count() const { return masses_.size(); }
  std::size_t components() const { return std::size_t{1} << masses_.size(); }
  std::span<double const> masses() const { return masses_; }
  std::vector<Term> const& terms() const { return terms_; }

  /// psi(points[0], ..., points[N-1]).
  std::vector<Complex> evaluate(std::span<SpacePoint const> points) const;
  void evaluate_into(std::span<SpacePoint const> points, std::span<Complex> out) const;

  /// Value of factor `particle` of term `term` at one spacetime point.
  Spinor evaluate_factor(std::size_t term, std::size_t particle, SpacePoint p) const;

  /// Rescales so that the integral of psi^dagger psi over [lo, hi]^N at
  /// t = 0 equals one (factorized Simpson quadrature with the given step).
  MultiTimeWaveFunction normalized_on_rest_leaf(double lo, double hi, double step = 0.01) const;

  MultiTimeWaveFunction scaled(Complex factor) const;

 private:
  struct CompiledMode {
    double momentum;
    double signed_energy;
    Complex weighted[2];  // coefficient * u
  };

  std::vector<double> masses_;
  std::vector<Term> terms_;
  // compiled_[term * N + particle]
  std::vector<std::vector<CompiledMode>> compiled_;
};

/// Exact image U_g psi: momenta boosted, spinors multiplied by S, phases
/// shifted by the translation, so that
///   (U_g psi)(g x_1, ..., g x_N) = (S (x) ... (x) S) psi(x_1, ..., x_N).
MultiTimeWaveFunction apply_poincare(PoincareTransform const& g, MultiTimeWaveFunction const& wf);

struct StructureResiduals {
  double clifford = 0.0;
  double mode_equation = 0.0;
  double intertwining = 0.0;
};

/// Self-check of the algebra: Clifford relations, the mode spinors against
/// the Dirac operator on a momentum grid, and S^-1 gamma^mu S = Lambda gamma
/// over a rapidity grid.
StructureResiduals structure_residuals();

/// Hypersurface bilinears of a spinor tensor given one future unit normal
/// per particle:
///   rho   = psibar (gamma.n_1) ... (gamma.n_N) psi
///   j_i^mu = psibar (gamma.n_1) ... gamma^mu ... (gamma.n_N) psi
/// Imaginary parts are dropped (they vanish up to round-off).
struct Bilinears {
  double rho = 0.0;
  double rho_imag = 0.0;
  std::vector<Vec2> currents;
  double max_current_imag = 0.0;
};

Bilinears hypersurface_bilinears(std::span<Complex const> psi, std::span<Vec2 const> normals,
                                 bool with_currents = true);

}  // namespace bohm::dirac
