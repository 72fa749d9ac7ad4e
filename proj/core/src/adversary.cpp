#include "fipriv/adversary.hpp"

#include <cmath>
#include <sstream>

#include "fipriv/errors.hpp"
#include "fipriv/fisher.hpp"

namespace fipriv {

Vec unbiased_identity_estimate(std::span<const double> y, std::span<const double> noise_mean) {
  if (y.size() != noise_mean.size())
    throw DimensionMismatchError("unbiased_identity_estimate: size mismatch");
  Vec x(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) x[i] = y[i] - noise_mean[i];
  return x;
}

Vec ls_estimate(const Matrix& c, std::span<const double> y) {
  return moore_penrose_pinv(c).apply(y);
}

namespace {

struct Accumulator {
  explicit Accumulator(std::size_t n) : error_sum(n, 0.0), per_entry_sq(n, 0.0) {}

  Vec error_sum;      // of x - x_hat, for the bias estimate
  Vec per_entry_sq;   // of (x_i - x_hat_i)^2
  double sq_sum = 0.0;
  double sq_sq_sum = 0.0;
  std::size_t count = 0;

  void add(std::span<const double> x, std::span<const double> x_hat) {
    double sq = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = x[i] - x_hat[i];
      error_sum[i] += e;
      per_entry_sq[i] += e * e;
      sq += e * e;
    }
    sq_sum += sq;
    sq_sq_sum += sq * sq;
    ++count;
  }

  void fill(McResult& r) const {
    const double n = static_cast<double>(count);
    r.trials = count;
    r.mse = sq_sum / n;
    const double var = std::max(0.0, sq_sq_sum / n - r.mse * r.mse);
    r.stderr_mse = std::sqrt(var / n);
    double b2 = 0.0;
    for (double s : error_sum) b2 += (s / n) * (s / n);
    r.bias_norm = std::sqrt(b2);
    r.per_entry_mse.resize(per_entry_sq.size());
    for (std::size_t i = 0; i < per_entry_sq.size(); ++i) r.per_entry_mse[i] = per_entry_sq[i] / n;
  }
};

}  // namespace

McResult mc_crb_check(const Mechanism& mech, EstimatorKind estimator, std::span<const double> x,
                      std::size_t trials, Rng& rng) {
  if (trials < 10000) throw Error("mc_crb_check: needs at least 1e4 trials");
  const NoiseDensity noise = mech.has_family() ? mech.noise_at(x[0]) : mech.fixed_noise();
  const Moments nm = moments(noise);

  McResult result;
  result.mechanism_id = mech.id;

  Matrix pinv;  // least squares only
  if (estimator == EstimatorKind::kLeastSquares) pinv = moore_penrose_pinv(mech.query.linear_matrix());

  Accumulator acc(x.size());
  for (std::size_t t = 0; t < trials; ++t) {
    const Response r = respond(mech, x, rng, t);
    Vec x_hat;
    if (estimator == EstimatorKind::kIdentityUnbiased) {
      x_hat = unbiased_identity_estimate(r.value, nm.mean);
    } else {
      x_hat = pinv.apply(r.value);
    }
    acc.add(x, x_hat);
  }
  acc.fill(result);

  if (estimator == EstimatorKind::kIdentityUnbiased) {
    result.estimator = "identity_unbiased";
    const FisherReport fr = fisher_matrix(noise, mech.query.jacobian(x));
    result.bound = crb_unbiased(fr);
  } else {
    result.estimator = "least_squares";
    const Matrix& c = mech.query.linear_matrix();
    // bias of E{x_hat} = C^+ C x
    const Vec projected = (pinv * c).apply(x);
    Vec bias(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) bias[i] = x[i] - projected[i];
    // Noise Fisher as the 1-d measurement information; sensitivity C^+.
    const FisherReport iw = make_fisher_report(noise_fisher_matrix(noise));
    result.bound = crb_biased(iw, pinv, bias);
  }
  result.passed = result.mse + 3.0 * result.stderr_mse >= result.bound;
  return result;
}

McResult mc_crb_check_dynamic(const LtiPrivacyModel& model, std::span<const double> x0,
                              std::size_t trials, Rng& rng) {
  if (trials < 10000) throw Error("mc_crb_check_dynamic: needs at least 1e4 trials");
  McResult result;
  result.mechanism_id = "dynamic";
  result.estimator = "smoothing";

  Accumulator acc(x0.size());
  for (std::size_t t = 0; t < trials; ++t) {
    const auto responses = simulate(model, x0, rng);
    const Vec y = stack_responses(responses);
    const Vec x_hat = smoothing_estimate(model, y);
    acc.add(x0, x_hat);
  }
  acc.fill(result);

  // Fisher of the stacked Gaussian w_T = Psi z through the pseudo-inverse of
  // its singular covariance: Psi^T (Psi Sigma Psi^T)^+ Psi.
  const Matrix cov_w = model.psi * model.sigma_z * model.psi.transpose();
  const SpectralDecomposition dec = spectral_decompose(cov_w);
  Matrix scaled = dec.eigenvectors;
  for (std::size_t j = 0; j < dec.eigenvalues.size(); ++j) {
    const double lambda = dec.eigenvalues[j];
    const double inv = lambda > 1e-10 * dec.eigenvalues.front() ? 1.0 / lambda : 0.0;
    for (std::size_t i = 0; i < dec.eigenvalues.size(); ++i) scaled(i, j) *= inv;
  }
  const Matrix cov_pinv = scaled * dec.eigenvectors.transpose();
  const FisherReport fisher =
      make_fisher_report(model.psi.transpose() * cov_pinv * model.psi);
  result.bound = crb_unbiased(fisher);
  result.passed = result.mse + 3.0 * result.stderr_mse >= result.bound;
  return result;
}

std::string mc_result_csv_header() {
  return "mechanism_id,estimator,trials,mse,stderr,bound,passed";
}

std::string to_csv_row(const McResult& r) {
  std::ostringstream os;
  os.precision(17);
  os << r.mechanism_id << ',' << r.estimator << ',' << r.trials << ',' << r.mse << ','
     << r.stderr_mse << ',' << r.bound << ',' << (r.passed ? "true" : "false");
  return os.str();
}

}  // namespace fipriv
