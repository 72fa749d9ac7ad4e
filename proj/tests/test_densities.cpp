#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fipriv/densities.hpp"
#include "fipriv/json_io.hpp"
#include "support/oracles.hpp"

using namespace fipriv;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kCosSqVar01 = 0.032672741512164448;   // (pi^2-6)/(12 pi^2)
constexpr double kCosSqQuality01 = 0.28267274151216445;  // (2 pi^2-3)/(6 pi^2)
}  // namespace

TEST_CASE("interval construction") {
  CHECK_THROWS_AS(make_interval(1.0, 1.0), Error);  // degenerate support has no density
  CHECK_THROWS_AS(make_interval(2.0, 1.0), Error);
  CHECK_THROWS_AS(make_interval(0.0, std::numeric_limits<double>::infinity()), Error);
  const Interval iv = make_interval(-1.0, 3.0);
  CHECK(iv.length() == Approx(4.0));
  CHECK(iv.mid() == Approx(1.0));
}

TEST_CASE("pdf examples") {
  const NoiseDensity cos_sq = CosSqDensity({0.0, 1.0});
  CHECK(pdf1(cos_sq, 0.5) == Approx(2.0));
  CHECK(pdf1(cos_sq, 0.0) == 0.0);
  CHECK(pdf1(cos_sq, 1.0) == 0.0);
  CHECK(pdf1(cos_sq, -0.2) == 0.0);

  const NoiseDensity laplace = LaplaceDensity(1.0);
  CHECK(pdf1(laplace, 0.0) == Approx(0.5));

  const Vec w2{0.1, 0.2};
  CHECK_THROWS_AS(pdf(cos_sq, w2), DimensionMismatchError);
}

TEST_CASE("cdf_1d examples and monotonicity") {
  const NoiseDensity cos_sq = CosSqDensity({0.0, 1.0});
  CHECK(cdf_1d(cos_sq, 0.5) == Approx(0.5).epsilon(1e-12));
  // analytic antiderivative w + sin(2 pi (w - 1/2))/(2 pi) at w = 0.25
  CHECK(cdf_1d(cos_sq, 0.25) == Approx(0.090845056908104664).epsilon(1e-12));
  CHECK(cdf_1d(cos_sq, 0.25) ==
        Approx(oracles::simpson([&](double w) { return pdf1(cos_sq, w); }, 0.0, 0.25))
            .epsilon(1e-9));
  CHECK(cdf_1d(cos_sq, 0.0) == 0.0);
  CHECK(cdf_1d(cos_sq, 1.0) == 1.0);

  const NoiseDensity laplace = LaplaceDensity(1.0);
  CHECK(cdf_1d(laplace, 0.0) == Approx(0.5));

  double prev = -1.0;
  for (double w = -0.2; w <= 1.2; w += 0.01) {
    const double c = cdf_1d(cos_sq, w);
    CHECK(c >= prev);
    prev = c;
  }

  const NoiseDensity product = ProductCosSqDensity(2, {0.0, 1.0});
  CHECK_THROWS_AS(cdf_1d(product, 0.5), NotScalarError);
}

TEST_CASE("sampling: moments of the cos^2 law at 1e5 draws") {
  const NoiseDensity d = CosSqDensity({0.0, 1.0});
  Rng rng(42);
  const std::size_t n = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Vec w(1);
    sample_into(d, rng, w);
    CHECK(w[0] > 0.0);
    CHECK(w[0] < 1.0);
    sum += w[0];
    sum_sq += w[0] * w[0];
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean - 0.5) < 0.003);
  CHECK(std::abs(var - kCosSqVar01) < 0.0005);
}

TEST_CASE("sampling: rejection acceptance rate equals the envelope ratio") {
  // proposal uniform, envelope constant 2 -> acceptance E[cos^2] = 1/2
  const CosSqDensity d({0.0, 1.0});
  Rng rng(7);
  const std::size_t proposals = 100000;
  std::size_t accepted = 0;
  for (std::size_t i = 0; i < proposals; ++i) {
    const double w = rng.uniform(0.0, 1.0);
    if (rng.uniform01() < d.pdf1(w) / 2.0) ++accepted;
  }
  const double rate = static_cast<double>(accepted) / proposals;
  CHECK(std::abs(rate - 0.5) < 0.01);
}

TEST_CASE("sampling: deterministic under a fixed seed") {
  const NoiseDensity d = TiltedCosSqDensity({0.0, 1.0}, -1.5, 0.3);
  Rng a(123);
  Rng b(123);
  const auto sa = sample(d, a, 50);
  const auto sb = sample(d, b, 50);
  CHECK(sa == sb);
}

TEST_CASE("moments") {
  const Interval iv{-1.0, 3.0};
  const NoiseDensity d = CosSqDensity(iv);
  const Moments m = moments(d);
  CHECK(m.mean[0] == Approx(1.0));
  CHECK(m.covariance(0, 0) == Approx((kPi * kPi - 6.0) * 16.0 / (12.0 * kPi * kPi)));

  const Matrix sigma{{2.0, 0.3}, {0.3, 1.0}};
  const NoiseDensity g = GaussianDensity(sigma);
  const Moments mg = moments(g);
  CHECK(mg.mean[0] == 0.0);
  CHECK(mg.mean[1] == 0.0);
  CHECK(oracles::rel_frobenius(mg.covariance, sigma) < 1e-12);

  // zero tilt reduces to the plain cos^2 moments
  const Moments mt = moments(NoiseDensity(TiltedCosSqDensity({0.0, 1.0}, 0.0, 0.7)));
  CHECK(mt.mean[0] == Approx(0.5).epsilon(1e-10));
  CHECK(mt.covariance(0, 0) == Approx(kCosSqVar01).epsilon(1e-10));
}

TEST_CASE("quality") {
  CHECK(quality(NoiseDensity(CosSqDensity({0.0, 1.0}))) ==
        Approx(kCosSqQuality01).epsilon(1e-12));
  const double theta = 1.7;
  CHECK(quality(NoiseDensity(GaussianDensity(1, theta))) == Approx(theta));
  const double b = 0.8;
  CHECK(quality(NoiseDensity(LaplaceDensity(b))) == Approx(2.0 * b * b));
}

TEST_CASE("entropy_bits") {
  // Laplace at quality theta = 1: b = sqrt(1/2), H = log2(e sqrt(2))
  CHECK(entropy_bits(NoiseDensity(LaplaceDensity(std::sqrt(0.5)))) ==
        Approx(1.9426950408889634).epsilon(1e-12));
  CHECK(entropy_bits(NoiseDensity(GaussianDensity(1, 1.0))) ==
        Approx(2.0470955851806411).epsilon(1e-12));
  CHECK(entropy_bits(NoiseDensity(GaussianDensity(1, 1.0 / (2.0 * kPi * std::numbers::e)))) ==
        Approx(0.0).epsilon(1e-12));

  // closed forms agree with direct quadrature of -Int pdf log2 pdf
  for (const NoiseDensity d :
       {NoiseDensity(GaussianDensity(1, 1.3)), NoiseDensity(LaplaceDensity(0.7))}) {
    const Interval r = effective_support(d);
    const double quad = oracles::simpson(
        [&](double w) {
          const double p = pdf1(d, w);
          return p > 0.0 ? -p * std::log2(p) : 0.0;
        },
        r.lo, r.hi, 200000);
    CHECK(entropy_bits(d) == Approx(quad).epsilon(1e-6));
  }
}

TEST_CASE("tilted_new: x-independent weight gives an x-independent policy") {
  const WeightFunction w = exp_decay_weight();  // p'(x)/p(x) = -1
  const TiltedCosSqDensity at0 = tilted_new({0.0, 1.0}, w, 0.0);
  const TiltedCosSqDensity at3 = tilted_new({0.0, 1.0}, w, 3.2);
  for (double v = 0.0; v <= 1.0; v += 0.01) {
    CHECK(at0.pdf1(v) == at3.pdf1(v));  // bitwise: the x factor cancels exactly
  }
}

TEST_CASE("tilted_new: zero log-ratio reduces to plain cos^2") {
  const TiltedCosSqDensity tilted = tilted_new({0.0, 1.0}, uniform_weight(), 0.4);
  const CosSqDensity plain({0.0, 1.0});
  for (double v = 0.0; v <= 1.0; v += 0.005) {
    CHECK(tilted.pdf1(v) == Approx(plain.pdf1(v)).epsilon(1e-12));
  }
}

TEST_CASE("tilted_new: squared-exponential weight shifts the mode upward") {
  const WeightFunction w = squared_exp_decay_weight();  // log ratio -2x
  const TiltedCosSqDensity d = tilted_new({0.0, 1.0}, w, 1.0);
  // dense-grid argmax oracle
  double best_w = 0.0, best_p = -1.0;
  for (int i = 0; i <= 100000; ++i) {
    const double v = static_cast<double>(i) / 100000.0;
    const double p = d.pdf1(v);
    if (p > best_p) {
      best_p = p;
      best_w = v;
    }
  }
  CHECK(best_w > 0.5);
  // analytic mode: tan(pi (w - 1/2)) = a/(2 pi) with a = 2x here
  CHECK(best_w == Approx(0.5 + std::atan(2.0 / (2.0 * kPi)) / kPi).epsilon(1e-4));
}

TEST_CASE("invariant: normalization within 1e-8") {
  const std::vector<NoiseDensity> all{
      NoiseDensity(CosSqDensity({0.0, 1.0})),
      NoiseDensity(CosSqDensity({-2.0, 5.0})),
      NoiseDensity(TiltedCosSqDensity({0.0, 1.0}, -1.0, 0.5)),
      NoiseDensity(TiltedCosSqDensity({0.0, 1.0}, -4.0, 1.0)),
      NoiseDensity(GaussianDensity(1, 2.5)),
      NoiseDensity(LaplaceDensity(0.6)),
  };
  for (const auto& d : all) {
    const Interval r = effective_support(d);
    const double mass = oracles::simpson([&](double w) { return pdf1(d, w); }, r.lo, r.hi, 100000);
    CHECK(mass == Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("invariant: bounded densities vanish on the boundary exactly") {
  const CosSqDensity c({0.25, 0.75});
  CHECK(c.pdf1(0.25) == 0.0);
  CHECK(c.pdf1(0.75) == 0.0);
  const TiltedCosSqDensity t({0.25, 0.75}, -2.0, 0.1);
  CHECK(t.pdf1(0.25) == 0.0);
  CHECK(t.pdf1(0.75) == 0.0);
}

TEST_CASE("invariant: Kolmogorov-Smirnov at 1e5 samples") {
  const std::vector<NoiseDensity> scalars{
      NoiseDensity(CosSqDensity({0.0, 1.0})),
      NoiseDensity(TiltedCosSqDensity({0.0, 1.0}, -2.0, 1.0)),
      NoiseDensity(GaussianDensity(1, 1.0)),
      NoiseDensity(LaplaceDensity(1.0)),
  };
  const std::size_t n = 100000;
  const double limit = 1.63 / std::sqrt(static_cast<double>(n));  // 99% confidence
  std::uint64_t seed = 1000;
  for (const auto& d : scalars) {
    Rng rng(seed++);
    std::vector<double> draws(n);
    for (auto& v : draws) {
      Vec w(1);
      sample_into(d, rng, w);
      v = w[0];
    }
    const double ks = oracles::ks_statistic(std::move(draws), [&](double w) {
      return cdf_1d(d, w);
    });
    CHECK(ks < limit);
  }
}

TEST_CASE("invariant: tilt -> 0 approaches the cos^2 density uniformly") {
  const TiltedCosSqDensity tiny = tilted_new(
      {0.0, 1.0}, WeightFunction{[](double) { return 1e-6; }, [](double) { return 1.0; }, ""},
      0.0);
  const CosSqDensity plain({0.0, 1.0});
  double sup = 0.0;
  for (double w = 0.0; w <= 1.0; w += 0.001)
    sup = std::max(sup, std::abs(tiny.pdf1(w) - plain.pdf1(w)));
  CHECK(sup < 1e-4);
}

TEST_CASE("gaussian: covariance validation and multivariate sampling") {
  const Matrix not_pd{{1.0, 2.0}, {2.0, 1.0}};  // eigenvalues 3, -1
  CHECK_THROWS_AS(GaussianDensity{not_pd}, NotPsdError);

  const Matrix sigma{{1.5, 0.4}, {0.4, 0.9}};
  const NoiseDensity g = GaussianDensity(sigma);
  Rng rng(5);
  const std::size_t n = 100000;
  Matrix acc(2, 2);
  for (std::size_t i = 0; i < n; ++i) {
    Vec w(2);
    sample_into(g, rng, w);
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t b = 0; b < 2; ++b) acc(a, b) += w[a] * w[b];
  }
  CHECK(oracles::rel_frobenius(acc.scaled(1.0 / static_cast<double>(n)), sigma) < 0.02);
}

TEST_CASE("serialization: JSON round trip preserves the density") {
  const std::vector<NoiseDensity> all{
      NoiseDensity(CosSqDensity({-0.5, 2.0})),
      NoiseDensity(ProductCosSqDensity(3, {0.0, 1.0})),
      NoiseDensity(TiltedCosSqDensity({0.0, 1.0}, -2.0, 1.3)),
      NoiseDensity(GaussianDensity(Matrix{{1.2, 0.1}, {0.1, 0.7}})),
      NoiseDensity(LaplaceDensity(1.4)),
  };
  Rng rng(17);
  for (const auto& d : all) {
    const NoiseDensity back = density_from_json(density_to_json(d));
    REQUIRE(dim(back) == dim(d));
    for (int rep = 0; rep < 200; ++rep) {
      Vec w(dim(d));
      for (auto& v : w) v = rng.uniform(-2.5, 2.5);
      CHECK(pdf(back, w) == Approx(pdf(d, w)).epsilon(1e-12));
    }
  }
}
