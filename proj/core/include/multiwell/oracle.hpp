#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "multiwell/fluctuation.hpp"
#include "multiwell/potential.hpp"
#include "multiwell/twolevel.hpp"

namespace multiwell {

/// Symmetric tridiagonal matrix with a Sturm-sequence bisection eigensolver.
struct SymTridiagonal {
  std::vector<double> diag;
  std::vector<double> off;  ///< off[j] couples j and j+1

  /// Number of eigenvalues strictly below x.
  int count_below(double x) const;
  /// k-th smallest eigenvalue (0-based), bisected to rounding level.
  double eigenvalue(int k) const;
  /// Inverse iteration at `lambda`, Euclidean-normalized.
  std::vector<double> eigenvector(double lambda, int iterations = 2) const;
};

/// Uniform grid x_j = x_min + j h, j = 0..n_points-1, with psi = 0 at both ends.
struct GridSpec {
  double x_min = 0.0, x_max = 0.0;
  int n_points = 8192;
  double hbar = 1.0;

  double spacing() const { return (x_max - x_min) / (n_points - 1); }
  double x(int j) const { return x_min + j * spacing(); }
};

/// Wells span plus a margin of 8 ground-state widths sqrt(hbar / omega).
GridSpec default_grid(std::span<const Well> wells, double hbar, int n_points = 8192);

struct SchrodingerOptions {
  double richardson_tol = 1e-4;  ///< relative to the spread of the requested levels
  double edge_tol = 1e-10;       ///< |psi| at the edges relative to its peak
  /// Solve even and odd sectors separately when the potential is even and the grid symmetric.
  bool use_parity = true;
};

struct SpectralResult {
  std::vector<double> energies;        ///< Richardson-extrapolated
  std::vector<double> error_estimates;
  std::vector<std::vector<double>> wavefunctions;  ///< on `grid`, sum h psi^2 = 1
  std::vector<std::vector<double>> coarse_wavefunctions;
  std::vector<int> parity;             ///< +1 / -1 per level, 0 when not resolved by symmetry
  GridSpec grid;                       ///< the finer of the two grids
  GridSpec coarse_grid;
};

/// Lowest n_levels of -(hbar^2/2) d^2/dx^2 + V on the grid (3-point stencil,
/// Dirichlet), with a second grid of spacing h/2 for Richardson extrapolation.
SpectralResult diagonalize_schrodinger(const PotentialModel& model, const GridSpec& grid, int n_levels,
                                       const SchrodingerOptions& options = {});
SpectralResult diagonalize_schrodinger(const std::function<double(double)>& potential, bool even,
                                       const GridSpec& grid, int n_levels,
                                       const SchrodingerOptions& options = {});

/// |psi_n(x)| per level and position (rows: levels), interpolated and extrapolated.
std::vector<std::vector<double>> endpoint_wavefunction_values(const SpectralResult& spec,
                                                              std::span<const double> positions);

struct FluctuationSpectrum {
  double lambda0 = 0.0;
  int nodes = 0;
  int n_points = 0;
};

/// Lowest Dirichlet eigenvalue of the operator on its window by a sine-basis
/// (particle in a box) discretization in extended precision.
FluctuationSpectrum diagonalize_fluctuation(const FluctuationOperator& op, int n_points = 0);

/// Ordered-time integral over 0 <= t_1 <= ... <= t_N <= tau of N hops between
/// the two levels, starting in the initial well, by nested quadrature. N <= 3.
double nested_simplex_integral(int n, const TwoLevelSystem& sys, double tau);

/// exp(-tau H / hbar) for H = [[e_i, -c], [-c, e_f]], c = sqrt(g) hbar K, row-major
/// {ii, if, fi, ff}, by Cayley-Hamilton.
std::array<double, 4> propagator_2x2(const TwoLevelSystem& sys, double tau);

}  // namespace multiwell
