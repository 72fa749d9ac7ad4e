#include "fipriv/dynamic.hpp"

#include <cmath>

#include "fipriv/errors.hpp"

namespace fipriv {

Matrix build_psi(const Matrix& a, const Matrix& c, std::size_t horizon) {
  if (a.rows() != a.cols()) throw DimensionMismatchError("build_psi: A must be square");
  if (c.cols() != a.rows()) throw DimensionMismatchError("build_psi: C columns must match A");
  const std::size_t n = a.rows();
  const std::size_t m = c.rows();
  Matrix psi((horizon + 1) * m, n);
  Matrix block = c;  // C A^k
  for (std::size_t k = 0; k <= horizon; ++k) {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) psi(k * m + i, j) = block(i, j);
    if (k < horizon) block = block * a;
  }
  return psi;
}

GramianCheck check_gramian(const Matrix& a, const Matrix& c, std::size_t horizon) {
  const Matrix psi = build_psi(a, c, horizon);
  const Matrix gram = psi.transpose() * psi;
  const double min_eig = spectral_decompose(gram).min_eigenvalue();
  return GramianCheck{min_eig > kPsdTol, min_eig};
}

LtiPrivacyModel dynamic_mechanism(const Matrix& a, const Matrix& c, std::size_t horizon,
                                  double rho) {
  if (!(rho > 0.0)) throw Error("dynamic_mechanism: rho must be > 0");
  const GramianCheck check = check_gramian(a, c, horizon);
  if (!check.invertible)
    throw SingularGramianError("dynamic_mechanism: observability Gramian is singular");
  LtiPrivacyModel model;
  model.a = a;
  model.c = c;
  model.horizon = horizon;
  model.psi = build_psi(a, c, horizon);
  model.sigma_z = psd_inv_sqrt(model.psi.transpose() * model.psi).scaled(2.0 / std::sqrt(rho));
  model.rho = rho;
  return model;
}

std::vector<Response> simulate_with_z(const LtiPrivacyModel& model, std::span<const double> x0,
                                      std::span<const double> z) {
  const std::size_t n = model.a.rows();
  if (x0.size() != n || z.size() != n)
    throw DimensionMismatchError("simulate: x0/z must match the state dimension");
  Vec shifted(n);
  for (std::size_t i = 0; i < n; ++i) shifted[i] = x0[i] + z[i];

  std::vector<Response> out;
  out.reserve(model.horizon + 1);
  Vec state(shifted);
  for (std::size_t k = 0; k <= model.horizon; ++k) {
    Response r;
    r.value = model.c.apply(state);
    r.mechanism_id = "dynamic";
    r.timestamp = k;
    out.push_back(std::move(r));
    if (k < model.horizon) state = model.a.apply(state);
  }
  return out;
}

std::vector<Response> simulate(const LtiPrivacyModel& model, std::span<const double> x0,
                               Rng& rng) {
  // One z per run: the mechanism perturbs the initial condition once and
  // propagates it, rather than adding independent per-step noise.
  const std::size_t n = model.a.rows();
  Vec standard(n);
  for (double& s : standard) s = rng.normal();
  const Vec z = psd_sqrt(model.sigma_z).apply(standard);
  return simulate_with_z(model, x0, z);
}

Vec stack_responses(const std::vector<Response>& responses) {
  Vec y;
  for (const Response& r : responses) y.insert(y.end(), r.value.begin(), r.value.end());
  return y;
}

Vec smoothing_estimate(const LtiPrivacyModel& model, std::span<const double> y_stacked) {
  if (y_stacked.size() != model.psi.rows())
    throw DimensionMismatchError("smoothing_estimate: stacked response has wrong length");
  const Matrix gram = model.psi.transpose() * model.psi;
  const SpectralDecomposition dec = spectral_decompose(gram);
  if (dec.min_eigenvalue() <= kPsdTol)
    throw SingularGramianError("smoothing_estimate: Gramian singular");
  Matrix scaled = dec.eigenvectors;
  for (std::size_t j = 0; j < dec.eigenvalues.size(); ++j)
    for (std::size_t i = 0; i < dec.eigenvalues.size(); ++i) scaled(i, j) /= dec.eigenvalues[j];
  const Matrix gram_inv = scaled * dec.eigenvectors.transpose();
  return (gram_inv * model.psi.transpose()).apply(y_stacked);
}

Matrix traffic_a() { return Matrix{{1.0, 1.0}, {0.0, 1.0}}; }

Matrix traffic_c() { return Matrix{{1.0, 0.0}}; }

TrafficReport traffic_report(std::size_t horizon, double rho) {
  if (horizon <= 2) throw HorizonTooShortError("traffic_report: requires T > 2");
  if (!(rho > 0.0)) throw Error("traffic_report: rho must be > 0");
  const double t = static_cast<double>(horizon);

  TrafficReport report;
  report.horizon = horizon;
  report.rho = rho;
  report.delta = 4.0 * t * t * t * t + 4.0 * t * t * t + 13.0 * t * t - 12.0 * t + 36.0;

  const double root = std::sqrt(report.delta);
  const double minus = (t + 1.0) * (2.0 * t * t + t + 6.0 - root);
  const double plus = (t + 1.0) * (2.0 * t * t + t + 6.0 + root);
  report.q_closed = (std::sqrt(minus) + std::sqrt(plus)) / std::sqrt(3.0 * rho);
  report.mse_closed =
      4.0 * std::sqrt(3.0) / std::sqrt(rho) * (1.0 / std::sqrt(minus) + 1.0 / std::sqrt(plus));

  const LtiPrivacyModel model = dynamic_mechanism(traffic_a(), traffic_c(), horizon, rho);
  const Matrix gram = model.psi.transpose() * model.psi;
  report.q_matrix = 2.0 * psd_sqrt(gram).trace() / std::sqrt(rho);
  report.mse_matrix = model.sigma_z.trace();
  return report;
}

}  // namespace fipriv
