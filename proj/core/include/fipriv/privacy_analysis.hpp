#pragma once

#include <string>
#include <vector>

#include "fipriv/densities.hpp"
#include "fipriv/matrix.hpp"
#include "fipriv/mechanisms.hpp"

namespace fipriv {

/// Differential-privacy certificate for the optimal Gaussian mechanism.
struct DpCertificate {
  enum class Kind { kEpsilon, kEpsilonDelta };
  Kind kind = Kind::kEpsilonDelta;
  double epsilon = 0.0;
  double delta = 0.0;
  bool satisfied = false;
  double binding_value = 0.0;  // right-hand side of the governing inequality
};

/// (eps, delta)-DP sufficient condition for the theta-budget Gaussian:
/// theta >= Delta (sqrt(2 ln(1/(2 delta)))/eps + 1/sqrt(2 eps)), delta <= 1/2.
DpCertificate check_eps_delta(double theta, Interval entry_domain, const Matrix& c,
                              double epsilon, double delta);

struct RegionCell {
  double epsilon = 0.0;
  double delta = 0.0;
  bool satisfied = false;
};

std::vector<RegionCell> eps_delta_region(double theta, Interval entry_domain, const Matrix& c,
                                         std::span<const double> eps_grid,
                                         std::span<const double> delta_grid);

/// n log-spaced points over [lo, hi].
Vec log_space(double lo, double hi, std::size_t n);

struct EntropyComparison {
  double laplace_bits = 0.0;   // log2(e sqrt(2 theta))
  double gaussian_bits = 0.0;  // log2(sqrt(2 pi e theta))
  bool gaussian_at_least_laplace = false;
};

/// Entropies of the Laplace and optimal Gaussian noise at equal quality.
EntropyComparison entropy_compare(double theta);

struct FisherComparison {
  double laplace = 0.0;   // 2 C C^T / theta
  double gaussian = 0.0;  // C C^T / theta
};

FisherComparison fisher_compare(const Matrix& c, double theta);

/// 1 + kappa, kappa = 1/(1 + 2 (C C^T)^2 max ||(1 - C^+C)x||^2 / theta);
/// the maximum over the box is attained at a vertex and is enumerated exactly.
double strength_factor(const Matrix& c, Interval entry_domain, double theta);

/// Numeric audit of the epsilon-DP density-ratio condition for a Laplace
/// mechanism; adjacent databases differ in one coordinate at the domain
/// extremes, probes span +-20b. Optionally reports the supremum log-ratio.
bool epsilon_dp_audit(const Mechanism& mech, Interval entry_domain, double epsilon,
                      std::size_t probes = 2049, double* sup_log_ratio = nullptr);

}  // namespace fipriv
