#pragma once

#include <cstddef>
#include <vector>

#include "fipriv/matrix.hpp"
#include "fipriv/mechanisms.hpp"
#include "fipriv/rng.hpp"

namespace fipriv {

/// LTI state-privacy mechanism: responses y[k] = C A^k x0 + C A^k z with a
/// single Gaussian draw z ~ N(0, Sigma), Sigma = 2 (Psi^T Psi)^{-1/2}/sqrt(rho).
/// The noise w_T = Psi_T z is correlated across time, not i.i.d.
struct LtiPrivacyModel {
  Matrix a;
  Matrix c;
  std::size_t horizon = 0;  // responses at k = 0..horizon
  Matrix psi;               // stacked C A^k blocks
  Matrix sigma_z;
  double rho = 1.0;
};

/// Psi_T = [C; CA; ...; CA^T].
Matrix build_psi(const Matrix& a, const Matrix& c, std::size_t horizon);

struct GramianCheck {
  bool invertible = false;
  double min_eigenvalue = 0.0;
};

/// Whether Psi^T Psi (the observability Gramian over {0..T}) is invertible.
/// Sufficient condition: (A, C) observable and T >= n.
GramianCheck check_gramian(const Matrix& a, const Matrix& c, std::size_t horizon);

LtiPrivacyModel dynamic_mechanism(const Matrix& a, const Matrix& c, std::size_t horizon,
                                  double rho);

/// One run over the horizon with a fresh draw of z.
std::vector<Response> simulate(const LtiPrivacyModel& model, std::span<const double> x0,
                               Rng& rng);
/// Same trajectory for a caller-supplied z (z = 0 gives the noiseless run).
std::vector<Response> simulate_with_z(const LtiPrivacyModel& model, std::span<const double> x0,
                                      std::span<const double> z);

/// Stacks responses into the y_T vector.
Vec stack_responses(const std::vector<Response>& responses);

/// Smoothing estimate x0_hat = Psi^+ y_T.
Vec smoothing_estimate(const LtiPrivacyModel& model, std::span<const double> y_stacked);

/// Traffic crowd-sensing example: A = [[1,1],[0,1]], C = [1,0].
Matrix traffic_a();
Matrix traffic_c();

struct TrafficReport {
  std::size_t horizon = 0;
  double rho = 1.0;
  double delta = 0.0;       // 4T^4 + 4T^3 + 13T^2 - 12T + 36
  double q_closed = 0.0;    // closed-form E||w_T||^2
  double mse_closed = 0.0;  // closed-form E||x0_hat - x0||^2
  double q_matrix = 0.0;    // 2 Tr((Psi^T Psi)^{1/2}) / sqrt(rho)
  double mse_matrix = 0.0;  // Tr(Sigma)
};

/// Closed forms evaluated and cross-checked against matrix computation.
/// Requires T > 2 (HorizonTooShortError otherwise).
TrafficReport traffic_report(std::size_t horizon, double rho);

}  // namespace fipriv
