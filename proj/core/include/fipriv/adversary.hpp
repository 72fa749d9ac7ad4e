#pragma once

#include <string>

#include "fipriv/dynamic.hpp"
#include "fipriv/mechanisms.hpp"

namespace fipriv {

/// Monte Carlo check that an estimator's MSE respects its Cramer-Rao bound.
/// passed <=> mse + 3 stderr >= bound (the bounds are exact inequalities;
/// the harness must not false-alarm at 1e5 trials).
struct McResult {
  std::string mechanism_id;
  std::string estimator;
  std::size_t trials = 0;
  double mse = 0.0;
  double stderr_mse = 0.0;
  double bias_norm = 0.0;
  double bound = 0.0;
  bool passed = false;
  Vec per_entry_mse;  // worst-case per-entry comparisons against 1/Tr(I)
};

/// x_hat = y - E{w}; unbiased for identity queries.
Vec unbiased_identity_estimate(std::span<const double> y, std::span<const double> noise_mean);

/// Least squares x_hat = C^+ y; biased when m < n.
Vec ls_estimate(const Matrix& c, std::span<const double> y);

enum class EstimatorKind { kIdentityUnbiased, kLeastSquares };

/// Runs `trials` responses of the mechanism at the fixed database x and
/// compares the estimator's empirical MSE against the bound matching its
/// bias structure: Tr(I^{-1}) for the unbiased estimator, the biased-CRB
/// ||(1 - C^+C)x||^2 + Tr(C^+ I_w^{-1} C^{+T}) for least squares.
McResult mc_crb_check(const Mechanism& mech, EstimatorKind estimator,
                      std::span<const double> x, std::size_t trials, Rng& rng);

/// Smoothing-estimator check for the dynamic mechanism; the bound is
/// Tr(I^{-1}) with I = Psi^T (Psi Sigma Psi^T)^+ Psi = Sigma^{-1}.
McResult mc_crb_check_dynamic(const LtiPrivacyModel& model, std::span<const double> x0,
                              std::size_t trials, Rng& rng);

std::string mc_result_csv_header();
std::string to_csv_row(const McResult& r);

}  // namespace fipriv
