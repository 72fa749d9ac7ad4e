#include "fipriv/densities.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fipriv/errors.hpp"
#include "fipriv/quadrature.hpp"

namespace fipriv {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLog2E = std::numbers::log2e;
// pdf level below which an unbounded density is truncated for quadrature
constexpr double kTruncationLevel = 1e-13;

}  // namespace

Interval make_interval(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi))
    throw Error("Interval: endpoints must be finite");
  if (!(lo < hi)) throw Error("Interval: requires lo < hi");
  return Interval{lo, hi};
}

// ---------------------------------------------------------------- CosSq

CosSqDensity::CosSqDensity(Interval support) : support_(make_interval(support.lo, support.hi)) {}

double CosSqDensity::pdf1(double w) const {
  if (w <= support_.lo || w >= support_.hi) return 0.0;  // gamma = 0 on the boundary
  const double l = support_.length();
  const double c = std::cos(kPi / l * (w - support_.mid()));
  return 2.0 / l * c * c;
}

double CosSqDensity::cdf1(double w) const {
  if (w <= support_.lo) return 0.0;
  if (w >= support_.hi) return 1.0;
  const double l = support_.length();
  const double u = w - support_.mid();
  return std::clamp(u / l + 0.5 + std::sin(2.0 * kPi * u / l) / (2.0 * kPi), 0.0, 1.0);
}

double CosSqDensity::sample1(Rng& rng) const {
  // Rejection from the uniform proposal; acceptance probability cos^2 gives
  // the exact envelope constant 2.
  const double l = support_.length();
  for (;;) {
    const double w = rng.uniform(support_.lo, support_.hi);
    const double c = std::cos(kPi / l * (w - support_.mid()));
    if (rng.uniform01() < c * c) return w;
  }
}

double CosSqDensity::variance() const {
  const double l = support_.length();
  return (kPi * kPi - 6.0) * l * l / (12.0 * kPi * kPi);
}

double CosSqDensity::score(double w) const {
  const double l = support_.length();
  const double k = kPi / l;
  return -2.0 * k * std::tan(k * (w - support_.mid()));
}

double CosSqDensity::fisher() const {
  const double l = support_.length();
  return 4.0 * kPi * kPi / (l * l);
}

// --------------------------------------------------------- ProductCosSq

ProductCosSqDensity::ProductCosSqDensity(std::vector<CosSqDensity> factors)
    : factors_(std::move(factors)) {
  if (factors_.empty()) throw Error("ProductCosSqDensity: needs at least one factor");
}

ProductCosSqDensity::ProductCosSqDensity(std::size_t m, Interval support)
    : factors_(m, CosSqDensity(support)) {
  if (m == 0) throw Error("ProductCosSqDensity: needs at least one factor");
}

double ProductCosSqDensity::pdf(std::span<const double> w) const {
  if (w.size() != factors_.size()) throw DimensionMismatchError("ProductCosSq pdf: dim mismatch");
  double p = 1.0;
  for (std::size_t i = 0; i < factors_.size(); ++i) p *= factors_[i].pdf1(w[i]);
  return p;
}

// --------------------------------------------------------- TiltedCosSq

TiltedCosSqDensity::TiltedCosSqDensity(Interval support, double tilt, double shift)
    : support_(make_interval(support.lo, support.hi)), tilt_(tilt), shift_(shift) {
  if (!std::isfinite(tilt)) throw Error("TiltedCosSqDensity: tilt must be finite");
  const double l = support_.length();
  const double mid = support_.mid();
  const double mass = integrate(
      [&](double w) {
        const double c = std::cos(kPi / l * (w - mid));
        return std::exp(-tilt_ * w) * c * c;
      },
      support_.lo, support_.hi);
  reduced_norm_ = 1.0 / mass;

  // Envelope for rejection sampling: dense-grid maximum inflated 1.01x.
  constexpr std::size_t kGrid = 4097;
  double peak = 0.0;
  for (std::size_t i = 0; i < kGrid; ++i) {
    const double w = support_.lo + l * static_cast<double>(i) / (kGrid - 1);
    peak = std::max(peak, pdf1(w));
  }
  envelope_ = 1.01 * peak;
}

double TiltedCosSqDensity::norm_const() const { return reduced_norm_ * std::exp(tilt_ * shift_); }

double TiltedCosSqDensity::pdf1(double w) const {
  if (w <= support_.lo || w >= support_.hi) return 0.0;
  const double l = support_.length();
  const double c = std::cos(kPi / l * (w - support_.mid()));
  return reduced_norm_ * std::exp(-tilt_ * w) * c * c;
}

double TiltedCosSqDensity::cdf1(double w) const {
  if (w <= support_.lo) return 0.0;
  if (w >= support_.hi) return 1.0;
  return std::clamp(integrate([&](double v) { return pdf1(v); }, support_.lo, w), 0.0, 1.0);
}

double TiltedCosSqDensity::sample1(Rng& rng) const {
  for (;;) {
    const double w = rng.uniform(support_.lo, support_.hi);
    if (rng.uniform01() * envelope_ < pdf1(w)) return w;
  }
}

double TiltedCosSqDensity::score(double w) const {
  const double l = support_.length();
  const double k = kPi / l;
  return -tilt_ - 2.0 * k * std::tan(k * (w - support_.mid()));
}

Moments TiltedCosSqDensity::moments() const {
  const double mean = integrate([&](double w) { return w * pdf1(w); }, support_.lo, support_.hi);
  const double second =
      integrate([&](double w) { return w * w * pdf1(w); }, support_.lo, support_.hi);
  Moments m;
  m.mean = {mean};
  m.covariance = Matrix(1, 1, {second - mean * mean});
  return m;
}

// ------------------------------------------------------------- Gaussian

GaussianDensity::GaussianDensity(Matrix covariance) : covariance_(std::move(covariance)) {
  if (covariance_.rows() != covariance_.cols())
    throw DimensionMismatchError("GaussianDensity: covariance must be square");
  const SpectralDecomposition dec = spectral_decompose(covariance_);
  if (dec.min_eigenvalue() <= kPsdTol)
    throw NotPsdError("GaussianDensity: covariance must be positive definite");
  sqrt_ = psd_sqrt(covariance_);
  const Matrix inv_sqrt = psd_inv_sqrt(covariance_);
  precision_ = inv_sqrt * inv_sqrt;
  log_det_ = 0.0;
  for (double lambda : dec.eigenvalues) log_det_ += std::log(lambda);
}

GaussianDensity::GaussianDensity(std::size_t m, double variance)
    : GaussianDensity(Matrix::identity(m).scaled(variance)) {}

double GaussianDensity::pdf(std::span<const double> w) const {
  if (w.size() != dim()) throw DimensionMismatchError("Gaussian pdf: dim mismatch");
  const Vec pw = precision_.apply(w);
  const double quad = dot(w, pw);
  const double m = static_cast<double>(dim());
  return std::exp(-0.5 * quad - 0.5 * log_det_ - 0.5 * m * std::log(2.0 * kPi));
}

double GaussianDensity::variance1() const {
  if (dim() != 1) throw NotScalarError("GaussianDensity: not scalar");
  return covariance_(0, 0);
}

double GaussianDensity::cdf1(double w) const {
  return 0.5 * std::erfc(-w / std::sqrt(2.0 * variance1()));
}

double GaussianDensity::score(double w) const { return -w / variance1(); }

double GaussianDensity::entropy_bits1() const {
  return 0.5 * std::log2(2.0 * kPi * std::numbers::e * variance1());
}

// -------------------------------------------------------------- Laplace

LaplaceDensity::LaplaceDensity(double scale) : scale_(scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw Error("LaplaceDensity: scale must be > 0");
}

double LaplaceDensity::pdf1(double w) const {
  return std::exp(-std::abs(w) / scale_) / (2.0 * scale_);
}

double LaplaceDensity::cdf1(double w) const {
  if (w < 0.0) return 0.5 * std::exp(w / scale_);
  return 1.0 - 0.5 * std::exp(-w / scale_);
}

double LaplaceDensity::sample1(Rng& rng) const {
  const double u = rng.uniform01() - 0.5;
  const double a = 1.0 - 2.0 * std::abs(u);
  const double mag = -scale_ * std::log(std::max(a, 1e-300));
  return u < 0.0 ? -mag : mag;
}

double LaplaceDensity::score(double w) const {
  if (w == 0.0) return 0.0;
  return w > 0.0 ? -1.0 / scale_ : 1.0 / scale_;
}

double LaplaceDensity::entropy_bits() const { return std::log2(2.0 * scale_ * std::numbers::e); }

// ------------------------------------------------------- variant facade

std::size_t dim(const NoiseDensity& d) {
  return std::visit(
      [](const auto& v) -> std::size_t {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ProductCosSqDensity> || std::is_same_v<T, GaussianDensity>)
          return v.dim();
        else
          return 1;
      },
      d);
}

double pdf(const NoiseDensity& d, std::span<const double> w) {
  if (w.size() != dim(d)) throw DimensionMismatchError("pdf: dimension mismatch");
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ProductCosSqDensity> || std::is_same_v<T, GaussianDensity>)
          return v.pdf(w);
        else
          return v.pdf1(w[0]);
      },
      d);
}

double pdf1(const NoiseDensity& d, double w) { return pdf(d, std::span<const double>(&w, 1)); }

double cdf_1d(const NoiseDensity& d, double w) {
  if (dim(d) != 1) throw NotScalarError("cdf_1d: density is not scalar");
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ProductCosSqDensity>)
          return v.factors().front().cdf1(w);
        else
          return v.cdf1(w);
      },
      d);
}

void sample_into(const NoiseDensity& d, Rng& rng, std::span<double> out) {
  if (out.size() != dim(d)) throw DimensionMismatchError("sample_into: dimension mismatch");
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ProductCosSqDensity>) {
          for (std::size_t i = 0; i < v.dim(); ++i) out[i] = v.factors()[i].sample1(rng);
        } else if constexpr (std::is_same_v<T, GaussianDensity>) {
          Vec z(v.dim());
          for (double& zi : z) zi = rng.normal();
          const Vec w = v.covariance_sqrt().apply(z);
          std::copy(w.begin(), w.end(), out.begin());
        } else {
          out[0] = v.sample1(rng);
        }
      },
      d);
}

std::vector<Vec> sample(const NoiseDensity& d, Rng& rng, std::size_t n) {
  if (n == 0) throw Error("sample: n must be >= 1");
  std::vector<Vec> draws(n, Vec(dim(d)));
  for (auto& w : draws) sample_into(d, rng, w);
  return draws;
}

Moments moments(const NoiseDensity& d) {
  return std::visit(
      [&](const auto& v) -> Moments {
        using T = std::decay_t<decltype(v)>;
        Moments m;
        if constexpr (std::is_same_v<T, CosSqDensity>) {
          m.mean = {v.mean()};
          m.covariance = Matrix(1, 1, {v.variance()});
        } else if constexpr (std::is_same_v<T, ProductCosSqDensity>) {
          const std::size_t n = v.dim();
          m.mean.resize(n);
          m.covariance = Matrix(n, n);
          for (std::size_t i = 0; i < n; ++i) {
            m.mean[i] = v.factors()[i].mean();
            m.covariance(i, i) = v.factors()[i].variance();
          }
        } else if constexpr (std::is_same_v<T, TiltedCosSqDensity>) {
          m = v.moments();
        } else if constexpr (std::is_same_v<T, GaussianDensity>) {
          m.mean = Vec(v.dim(), 0.0);
          m.covariance = v.covariance();
        } else {
          m.mean = {0.0};
          m.covariance = Matrix(1, 1, {2.0 * v.scale() * v.scale()});
        }
        return m;
      },
      d);
}

double quality(const NoiseDensity& d) {
  const Moments m = moments(d);
  return m.covariance.trace() + norm2_squared(m.mean);
}

namespace {

double entropy_bits_by_quadrature(const NoiseDensity& d) {
  const Interval range = effective_support(d);
  return integrate(
      [&](double w) {
        const double p = pdf1(d, w);
        if (p < 1e-300) return 0.0;
        return -p * std::log(p) * kLog2E;
      },
      range.lo, range.hi, {.abs_tol = 1e-10, .max_depth = 48, .strict = false});
}

}  // namespace

double entropy_bits(const NoiseDensity& d) {
  if (dim(d) != 1) throw NotScalarError("entropy_bits: density is not scalar");
  if (const auto* g = std::get_if<GaussianDensity>(&d)) return g->entropy_bits1();
  if (const auto* l = std::get_if<LaplaceDensity>(&d)) return l->entropy_bits();
  return entropy_bits_by_quadrature(d);
}

std::optional<Interval> bounded_support(const NoiseDensity& d) {
  return std::visit(
      [](const auto& v) -> std::optional<Interval> {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, CosSqDensity> || std::is_same_v<T, TiltedCosSqDensity>)
          return v.support();
        else if constexpr (std::is_same_v<T, ProductCosSqDensity>)
          return v.factors().front().support();
        else
          return std::nullopt;
      },
      d);
}

Interval effective_support(const NoiseDensity& d) {
  if (auto s = bounded_support(d)) return *s;
  if (const auto* g = std::get_if<GaussianDensity>(&d)) {
    const double sigma = std::sqrt(g->variance1());
    const double peak = 1.0 / std::sqrt(2.0 * kPi) / sigma;
    const double r = sigma * std::sqrt(2.0 * std::max(1.0, std::log(peak / kTruncationLevel)));
    return Interval{-r, r};
  }
  const auto& l = std::get<LaplaceDensity>(d);
  const double b = l.scale();
  const double r = b * std::max(1.0, std::log(1.0 / (2.0 * b * kTruncationLevel)));
  return Interval{-r, r};
}

double analytic_score(const NoiseDensity& d, double w) {
  if (dim(d) != 1) throw NotScalarError("analytic_score: density is not scalar");
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ProductCosSqDensity>)
          return v.factors().front().score(w);
        else
          return v.score(w);
      },
      d);
}

// ------------------------------------------------------ weight functions

WeightFunction uniform_weight() {
  return {[](double) { return 0.0; }, [](double) { return 1.0; }, "uniform"};
}

WeightFunction exp_decay_weight() {
  return {[](double) { return -1.0; }, [](double x) { return std::exp(-x); }, "exp_decay"};
}

WeightFunction squared_exp_decay_weight() {
  return {[](double x) { return -2.0 * x; }, [](double x) { return std::exp(-x * x); },
          "squared_exp_decay"};
}

WeightFunction weight_by_name(const std::string& name) {
  if (name == "uniform") return uniform_weight();
  if (name == "exp_decay") return exp_decay_weight();
  if (name == "squared_exp_decay") return squared_exp_decay_weight();
  throw ParseError("unknown weight function: " + name);
}

TiltedCosSqDensity tilted_new(Interval support, const WeightFunction& weight, double x) {
  const double a = weight.log_ratio(x);
  if (!std::isfinite(a)) throw Error("tilted_new: log ratio not finite at x");
  return TiltedCosSqDensity(support, a, x);
}

}  // namespace fipriv
