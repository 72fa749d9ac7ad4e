#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fipriv/matrix.hpp"
#include "fipriv/rng.hpp"

namespace fipriv {

/// Closed interval [lo, hi] with lo < hi, both finite. Serves as the
/// per-coordinate noise support and as the database entry domain.
struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  double length() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double w) const { return w >= lo && w <= hi; }
};

/// Validates the Interval invariants (degenerate lo == hi is rejected:
/// no density exists on a point support).
Interval make_interval(double lo, double hi);

struct Moments {
  Vec mean;
  Matrix covariance;
};

/// The bounded-support optimum: gamma(w) = (2/L) cos^2(pi (w - mid) / L).
class CosSqDensity {
 public:
  CosSqDensity() : support_{0.0, 1.0} {}
  explicit CosSqDensity(Interval support);

  const Interval& support() const { return support_; }
  double pdf1(double w) const;
  double cdf1(double w) const;
  double sample1(Rng& rng) const;
  double mean() const { return support_.mid(); }
  double variance() const;
  /// d/dw log pdf on the open support.
  double score(double w) const;
  /// Analytic Fisher information 4 pi^2 / L^2.
  double fisher() const;

 private:
  Interval support_;
};

/// Product of independent CosSq coordinates (identity-query optimum).
class ProductCosSqDensity {
 public:
  explicit ProductCosSqDensity(std::vector<CosSqDensity> factors);
  ProductCosSqDensity(std::size_t m, Interval support);

  std::size_t dim() const { return factors_.size(); }
  const std::vector<CosSqDensity>& factors() const { return factors_; }
  double pdf(std::span<const double> w) const;

 private:
  std::vector<CosSqDensity> factors_;
};

/// Non-uniform-weight optimum on a bounded support:
///   gamma(w|x) = c(x) exp(-a (w + x)) cos^2(pi (w - mid)/L),  a = p'(x)/p(x).
/// The x-only factor exp(-a x) cancels between c(x) and the exponential, so
/// evaluation uses the reduced constant over exp(-a w); this keeps densities
/// for x-independent tilts bitwise identical across x.
class TiltedCosSqDensity {
 public:
  TiltedCosSqDensity(Interval support, double tilt, double shift);

  const Interval& support() const { return support_; }
  double tilt() const { return tilt_; }
  double shift() const { return shift_; }
  /// The paper's c(x) = reduced_norm * exp(tilt * shift).
  double norm_const() const;
  double pdf1(double w) const;
  double cdf1(double w) const;
  double sample1(Rng& rng) const;
  double score(double w) const;
  Moments moments() const;

 private:
  Interval support_;
  double tilt_ = 0.0;
  double shift_ = 0.0;
  double reduced_norm_ = 1.0;  // 1 / integral exp(-tilt w) cos^2(...) dw
  double envelope_ = 0.0;      // sup pdf over a dense grid, inflated 1.01x
};

/// Zero-mean multivariate Gaussian with positive definite covariance.
class GaussianDensity {
 public:
  explicit GaussianDensity(Matrix covariance);
  GaussianDensity(std::size_t m, double variance);

  std::size_t dim() const { return covariance_.rows(); }
  const Matrix& covariance() const { return covariance_; }
  const Matrix& covariance_sqrt() const { return sqrt_; }
  const Matrix& precision() const { return precision_; }
  double pdf(std::span<const double> w) const;
  double variance1() const;  // scalar case
  double cdf1(double w) const;
  double score(double w) const;
  double entropy_bits1() const;

 private:
  Matrix covariance_;
  Matrix sqrt_;
  Matrix precision_;
  double log_det_ = 0.0;
};

/// Scalar zero-mean Laplace noise, pdf = exp(-|w|/b) / (2b).
class LaplaceDensity {
 public:
  explicit LaplaceDensity(double scale);

  double scale() const { return scale_; }
  double pdf1(double w) const;
  double cdf1(double w) const;
  double sample1(Rng& rng) const;
  double score(double w) const;  // -sign(w)/b; 0 at the kink
  double entropy_bits() const;

 private:
  double scale_ = 1.0;
};

using NoiseDensity = std::variant<CosSqDensity, ProductCosSqDensity, TiltedCosSqDensity,
                                  GaussianDensity, LaplaceDensity>;

std::size_t dim(const NoiseDensity& d);
double pdf(const NoiseDensity& d, std::span<const double> w);
double pdf1(const NoiseDensity& d, double w);

/// CDF of a scalar density; throws NotScalarError otherwise.
double cdf_1d(const NoiseDensity& d, double w);

void sample_into(const NoiseDensity& d, Rng& rng, std::span<double> out);
std::vector<Vec> sample(const NoiseDensity& d, Rng& rng, std::size_t n);

Moments moments(const NoiseDensity& d);

/// Quality contribution E ||w||^2 = Tr(cov) + ||mean||^2.
double quality(const NoiseDensity& d);

/// Differential entropy in bits of a scalar density. Closed form for
/// Gaussian and Laplace, quadrature of -Int pdf log2 pdf otherwise.
double entropy_bits(const NoiseDensity& d);

/// Bounded support if the density has one (per coordinate for products).
std::optional<Interval> bounded_support(const NoiseDensity& d);

/// Interval on which quadrature sees effectively all of the mass; equals the
/// support for bounded densities and a pdf-level truncation for unbounded ones.
Interval effective_support(const NoiseDensity& d);

/// Analytic d/dw log pdf for scalar densities.
double analytic_score(const NoiseDensity& d, double w);

/// Design weight p(x): not a prior, a statement of where privacy matters.
struct WeightFunction {
  std::function<double(double)> log_ratio;  // p'(x)/p(x)
  std::function<double(double)> value;      // p(x), unnormalized
  std::string description;
};

WeightFunction uniform_weight();
WeightFunction exp_decay_weight();          // p(x) proportional to exp(-x)
WeightFunction squared_exp_decay_weight();  // p(x) proportional to exp(-x^2)
/// Lookup by the names used in JSON configs; throws ParseError on unknown.
WeightFunction weight_by_name(const std::string& name);

/// Corollary-6 construction: the tilted density at database value x.
TiltedCosSqDensity tilted_new(Interval support, const WeightFunction& weight, double x);

}  // namespace fipriv
