#pragma once

#include <array>
#include <cstddef>
#include <functional>

#include "fipriv/densities.hpp"
#include "fipriv/fisher.hpp"
#include "fipriv/matrix.hpp"

namespace fipriv {

/// Uniform 1-D grid; an odd point count keeps the midpoint on the grid.
struct Grid1D {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t points = 65;

  double spacing() const { return (hi - lo) / static_cast<double>(points - 1); }
  double at(std::size_t i) const { return lo + spacing() * static_cast<double>(i); }
};

Grid1D make_grid(double lo, double hi, std::size_t points);

/// Residual summary for the optimality-PDE checks. mu is the Lagrange
/// multiplier enforcing normalization of gamma = u^2.
struct ResidualReport {
  double max_abs_residual = 0.0;
  std::size_t interior_points_checked = 0;
  double mu_used = 0.0;
  std::array<double, 2> boundary_values = {0.0, 0.0};  // |u| at lo, hi
  double spacing = 0.0;
  double sup_u = 0.0;  // ||u||_inf over the grid, for relative thresholds
};

/// Central-difference residual of u'' + mu u over the interior of the grid,
/// excluding one cell at each boundary where u vanishes.
ResidualReport residual_from_u(std::span<const double> u, double spacing, double mu);

/// u = sqrt(pdf) of the cos^2 density against u'' + mu u = 0 with
/// mu = (pi/L)^2 (the bounded-support optimality condition in 1-D).
ResidualReport helmholtz_residual(const CosSqDensity& d, const Grid1D& grid);

/// Scalar form of the nonconvex-problem condition:
/// I^{-2} C^2 u'' + mu u = 0 with mu fitted by least squares over the grid.
ResidualReport theorem1_residual(const NoiseDensity& d, const Matrix& c, const Grid1D& grid,
                                 std::size_t fisher_grid = 8193);

/// Non-uniform weight, scalar identity query, in the variable v = x + w:
/// u_vv + a u_v + mu(x) u = 0 with a = p'(x)/p(x), mu(x) = a^2/4 + (pi/L)^2.
ResidualReport theorem2_residual_scalar(const DensityFamily& family,
                                        const WeightFunction& weight, double x,
                                        const Grid1D& grid);

/// Unbounded-support condition Tr(C C^T D^2 u) + (mu - (rho/4) w^T w) u = 0
/// for the Gaussian u. The residual does not vanish for every printed Sigma;
/// the report records the mismatch instead of asserting it away.
struct Theorem4Report {
  ResidualReport residual;
  /// Ratio between rho and the w^2 coefficient produced by sigma; 1 means
  /// the PDE is satisfied, 4 for Sigma = 2 (C C^T)^{1/2}/sqrt(rho).
  double w2_mismatch_factor = 1.0;
  /// Scale s (Sigma = s (C C^T)^{1/2}) at which the residual vanishes.
  double vanishing_scale = 1.0;
};

Theorem4Report theorem4_residual(const Matrix& c, double rho, const Matrix& sigma,
                                 std::size_t points_per_axis);

/// Assumption check: bounded densities vanish on the support boundary.
bool boundary_check(const NoiseDensity& d);
bool boundary_check(const std::function<double(double)>& pdf, Interval support);

}  // namespace fipriv
