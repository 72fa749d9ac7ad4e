#include "fipriv/privacy_analysis.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>

#include "fipriv/errors.hpp"

namespace fipriv {

namespace {

double sensitivity(Interval entry_domain, const Matrix& c) {
  double cmax = 0.0;
  for (std::size_t j = 0; j < c.cols(); ++j) cmax = std::max(cmax, std::abs(c(0, j)));
  return entry_domain.length() * cmax;
}

}  // namespace

DpCertificate check_eps_delta(double theta, Interval entry_domain, const Matrix& c,
                              double epsilon, double delta) {
  if (!(epsilon > 0.0)) throw Error("check_eps_delta: epsilon must be > 0");
  if (!(delta > 0.0) || delta > 0.5)
    throw DeltaOutOfRangeError("check_eps_delta: requires 0 < delta <= 1/2");
  if (c.rows() != 1) throw DimensionMismatchError("check_eps_delta: C must be 1 x n");

  const double width = sensitivity(entry_domain, c);
  const double kbar = std::sqrt(2.0 * std::log(1.0 / (2.0 * delta)));
  const double rhs = width * (kbar / epsilon + 1.0 / std::sqrt(2.0 * epsilon));

  DpCertificate cert;
  cert.kind = DpCertificate::Kind::kEpsilonDelta;
  cert.epsilon = epsilon;
  cert.delta = delta;
  cert.binding_value = rhs;
  cert.satisfied = theta >= rhs;
  return cert;
}

std::vector<RegionCell> eps_delta_region(double theta, Interval entry_domain, const Matrix& c,
                                         std::span<const double> eps_grid,
                                         std::span<const double> delta_grid) {
  std::vector<RegionCell> cells;
  cells.reserve(eps_grid.size() * delta_grid.size());
  for (double eps : eps_grid)
    for (double delta : delta_grid) {
      const DpCertificate cert = check_eps_delta(theta, entry_domain, c, eps, delta);
      cells.push_back(RegionCell{eps, delta, cert.satisfied});
    }
  return cells;
}

Vec log_space(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw Error("log_space: bad range");
  Vec out(n);
  const double llo = std::log(lo);
  const double lhi = std::log(hi);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) / static_cast<double>(n - 1));
  return out;
}

EntropyComparison entropy_compare(double theta) {
  if (!(theta > 0.0)) throw Error("entropy_compare: theta must be > 0");
  EntropyComparison cmp;
  cmp.laplace_bits = std::log2(std::numbers::e * std::sqrt(2.0 * theta));
  cmp.gaussian_bits = 0.5 * std::log2(2.0 * std::numbers::pi * std::numbers::e * theta);
  cmp.gaussian_at_least_laplace = cmp.gaussian_bits >= cmp.laplace_bits;
  return cmp;
}

FisherComparison fisher_compare(const Matrix& c, double theta) {
  if (!(theta > 0.0)) throw Error("fisher_compare: theta must be > 0");
  if (c.rows() != 1) throw DimensionMismatchError("fisher_compare: C must be 1 x n");
  const double gram = (c * c.transpose())(0, 0);
  return FisherComparison{2.0 * gram / theta, gram / theta};
}

double strength_factor(const Matrix& c, Interval entry_domain, double theta) {
  if (c.rows() != 1) throw DimensionMismatchError("strength_factor: C must be 1 x n");
  const std::size_t n = c.cols();
  if (n > 30) throw Error("strength_factor: corner enumeration limited to n <= 30");
  const Matrix pinv = moore_penrose_pinv(c);
  const Matrix projector = Matrix::identity(n) - pinv * c;  // 1 - C^+ C

  double max_sq = 0.0;
  Vec x(n);
  for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
    for (std::size_t i = 0; i < n; ++i)
      x[i] = (mask >> i) & 1ULL ? entry_domain.hi : entry_domain.lo;
    max_sq = std::max(max_sq, norm2_squared(projector.apply(x)));
  }

  const double gram = (c * c.transpose())(0, 0);
  const double kappa = 1.0 / (1.0 + 2.0 * gram * gram * max_sq / theta);
  return 1.0 + kappa;
}

bool epsilon_dp_audit(const Mechanism& mech, Interval entry_domain, double epsilon,
                      std::size_t probes, double* sup_log_ratio) {
  const auto* laplace = std::get_if<LaplaceDensity>(&mech.fixed_noise());
  if (laplace == nullptr) throw Error("epsilon_dp_audit: mechanism must carry Laplace noise");
  const Matrix& c = mech.query.linear_matrix();
  if (c.rows() != 1) throw DimensionMismatchError("epsilon_dp_audit: scalar queries only");
  const double b = laplace->scale();
  const std::size_t n = c.cols();

  double sup = 0.0;
  Vec x(n, entry_domain.lo);
  Vec xp(n, entry_domain.lo);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = entry_domain.hi;  // adjacent pair: one coordinate at opposite extremes
    const double fx = dot(std::span<const double>(c.data()), x);
    const double fxp = dot(std::span<const double>(c.data()), xp);
    const double mid = 0.5 * (fx + fxp);  // ratio is extremal in the tails
    for (std::size_t k = 0; k < probes; ++k) {
      const double y = mid - 20.0 * b +
                       40.0 * b * static_cast<double>(k) / static_cast<double>(probes - 1);
      const double log_ratio = (std::abs(y - fxp) - std::abs(y - fx)) / b;
      sup = std::max(sup, std::abs(log_ratio));
    }
    x[i] = entry_domain.lo;
  }
  if (sup_log_ratio != nullptr) *sup_log_ratio = sup;
  return sup <= epsilon + 1e-9;
}

}  // namespace fipriv
