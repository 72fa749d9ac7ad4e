#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "fipriv/densities.hpp"
#include "fipriv/matrix.hpp"
#include "fipriv/query.hpp"

namespace fipriv {

/// Fisher information of the response about the database, with the bound
/// chain Tr(I^{-1}) >= n^2/Tr(I) and the worst-case per-entry bound 1/Tr(I).
///
/// The Fisher matrix here is the standard Int (gamma')^2/gamma form; with
/// gamma = u^2 this equals 4 Int (u')^2.
struct FisherReport {
  Matrix matrix;
  double trace = 0.0;
  std::optional<double> trace_inverse;  // absent when I is singular
  double lower_bound = 0.0;             // n^2 / Tr(I)
  double worst_case_entry_bound = 0.0;  // 1 / Tr(I)
};

FisherReport make_fisher_report(Matrix fisher);

enum class ScoreMode {
  kAuto,               // analytic d/dw log pdf (all shipped families expose one)
  kCentralDifference,  // finite differences of log pdf, h = support length / 2^16
};

/// Scalar Fisher Int (gamma')^2 / gamma by trapezoid integration over a
/// uniform grid (>= 2049 points); the integrand at the support endpoints is
/// extrapolated from the nearest interior values.
double fisher_scalar_quadrature(const NoiseDensity& d, std::size_t grid,
                                ScoreMode mode = ScoreMode::kAuto);

/// Noise Fisher matrix I_w: diagonal of per-coordinate quadrature values for
/// scalar/product densities, the precision matrix for Gaussian noise.
Matrix noise_fisher_matrix(const NoiseDensity& d, std::size_t grid = 8193);

/// I = F^T I_w F for a query Jacobian F (m x n) and x-independent noise.
FisherReport fisher_matrix(const NoiseDensity& d, const Matrix& jacobian,
                           std::size_t grid = 8193);

/// Unbiased Cramer-Rao bound Tr(I^{-1}); throws SingularFisherError when no
/// finite unbiased bound exists (m < n).
double crb_unbiased(const FisherReport& report);

/// Biased-estimator bound Tr(G^T I^{-1} G) + ||x - g(x)||^2.
double crb_biased(const FisherReport& report, const Matrix& g_jacobian,
                  std::span<const double> bias);

/// (n^2/Tr(I), 1/Tr(I)); verifies Tr(I^{-1}) >= n^2/Tr(I) when invertible.
std::pair<double, double> bound_chain(const FisherReport& report);

/// Quadrature grid over the database domain for the weighted objectives.
/// Abscissae are cell midpoints so a unit weight integrates to exactly 1.
struct WeightGrid {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t points = 101;

  double spacing() const { return (hi - lo) / static_cast<double>(points); }
  double at(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * spacing(); }
};

struct ObjectiveReport {
  double j_bar = 0.0;  // Int Tr(I(x)^{-1}) p(x) dx
  double j = 0.0;      // Int Tr(I(x)) p(x) dx
  Vec grid;            // abscissae
  Vec weights;         // p(x_i) * spacing
  std::vector<std::size_t> singular_points;  // excluded from j_bar
};

using DensityFamily = std::function<NoiseDensity(double)>;

ObjectiveReport objectives(const DensityFamily& family, const Query& query,
                           const WeightFunction& weight, const WeightGrid& grid,
                           std::size_t fisher_grid = 4097);

}  // namespace fipriv
