#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fipriv/matrix.hpp"
#include "fipriv/rng.hpp"
#include "support/oracles.hpp"

using namespace fipriv;
using doctest::Approx;

namespace {
const Matrix kSample{{4.0, 6.0}, {6.0, 14.0}};
// characteristic polynomial of kSample: tr = 18, det = 20 -> 9 +- sqrt(61)
const double kLambda1 = 9.0 + std::sqrt(61.0);
const double kLambda2 = 9.0 - std::sqrt(61.0);
}  // namespace

TEST_CASE("spectral_decompose: identity and diagonal") {
  const auto id = spectral_decompose(Matrix::identity(2));
  CHECK(id.eigenvalues[0] == Approx(1.0));
  CHECK(id.eigenvalues[1] == Approx(1.0));
  CHECK(oracles::rel_frobenius(id.reconstruct(), Matrix::identity(2)) < 1e-10);

  const Vec d{4.0, 9.0};
  const auto diag = spectral_decompose(Matrix::diagonal(d));
  CHECK(diag.eigenvalues[0] == Approx(9.0));   // descending
  CHECK(diag.eigenvalues[1] == Approx(4.0));
}

TEST_CASE("spectral_decompose: 2x2 against the characteristic polynomial") {
  const auto dec = spectral_decompose(kSample);
  CHECK(dec.eigenvalues[0] == Approx(kLambda1).epsilon(1e-12));
  CHECK(dec.eigenvalues[1] == Approx(kLambda2).epsilon(1e-12));
  CHECK(oracles::rel_frobenius(dec.reconstruct(), kSample) < 1e-10);
  // orthonormality
  const Matrix vtv = dec.eigenvectors.transpose() * dec.eigenvectors;
  CHECK(oracles::rel_frobenius(vtv, Matrix::identity(2)) < 1e-10);
}

TEST_CASE("spectral_decompose: rejects asymmetric input") {
  const Matrix bad{{1.0, 2.0}, {0.0, 1.0}};
  CHECK_THROWS_AS(spectral_decompose(bad), NonSymmetricError);
}

TEST_CASE("psd_sqrt: identity, diagonal, generic") {
  CHECK(oracles::rel_frobenius(psd_sqrt(Matrix::identity(3)), Matrix::identity(3)) < 1e-12);

  const Vec d{4.0, 9.0};
  const Vec expect{2.0, 3.0};
  CHECK(oracles::rel_frobenius(psd_sqrt(Matrix::diagonal(d)), Matrix::diagonal(expect)) < 1e-12);

  const Matrix root = psd_sqrt(kSample);
  CHECK(oracles::rel_frobenius(root * root, kSample) < 1e-8);
  CHECK(root.asymmetry() == 0.0);
}

TEST_CASE("psd_sqrt: rejects indefinite input") {
  const Matrix indef{{1.0, 0.0}, {0.0, -1.0}};
  CHECK_THROWS_AS(psd_sqrt(indef), NotPsdError);
}

TEST_CASE("psd_sqrt: clamps rounding-level negative eigenvalues") {
  Matrix tiny{{1.0, 1.0}, {1.0, 1.0}};  // eigenvalues 2 and 0
  tiny(0, 0) -= 5e-11;                  // drive the small one slightly negative
  const Matrix root = psd_sqrt(tiny);
  CHECK(oracles::rel_frobenius(root * root, tiny) < 1e-5);
}

TEST_CASE("psd_inv_sqrt: examples") {
  CHECK(oracles::rel_frobenius(psd_inv_sqrt(Matrix::identity(2)), Matrix::identity(2)) < 1e-12);

  const Vec d{4.0, 16.0};
  const Vec expect{0.5, 0.25};
  CHECK(oracles::rel_frobenius(psd_inv_sqrt(Matrix::diagonal(d)), Matrix::diagonal(expect)) <
        1e-12);

  // Tr = 1/sqrt(9+sqrt(61)) + 1/sqrt(9-sqrt(61)); the spec's display 1.16081
  // carries a rounding slip, the exact value is 1.16069531.
  const Matrix inv_root = psd_inv_sqrt(kSample);
  const double expected_trace = 1.0 / std::sqrt(kLambda1) + 1.0 / std::sqrt(kLambda2);
  CHECK(inv_root.trace() == Approx(expected_trace).epsilon(1e-12));
  CHECK(inv_root.trace() == Approx(1.1606953069173485).epsilon(1e-12));
  CHECK(inv_root.trace() == Approx(1.16081).epsilon(1e-3));

  // inverse-root times root is the identity
  CHECK(oracles::rel_frobenius(inv_root * psd_sqrt(kSample), Matrix::identity(2)) < 1e-8);

  const Vec singular{1.0, 0.0};
  CHECK_THROWS_AS(psd_inv_sqrt(Matrix::diagonal(singular)), SingularError);
}

TEST_CASE("moore_penrose_pinv: examples") {
  const Matrix one{{1.0}};
  CHECK(moore_penrose_pinv(one)(0, 0) == Approx(1.0));

  const Matrix c{{0.5, 0.5}};
  const Matrix pinv = moore_penrose_pinv(c);
  REQUIRE(pinv.rows() == 2);
  REQUIRE(pinv.cols() == 1);
  CHECK(pinv(0, 0) == Approx(1.0));
  CHECK(pinv(1, 0) == Approx(1.0));
  // C pinv = identity(m)
  CHECK((c * pinv)(0, 0) == Approx(1.0));

  CHECK(oracles::rel_frobenius(moore_penrose_pinv(Matrix::identity(2)), Matrix::identity(2)) <
        1e-12);

  const Matrix deficient{{1.0, 1.0}, {1.0, 1.0}};
  CHECK_THROWS_AS(moore_penrose_pinv(deficient), RankDeficientError);
}

TEST_CASE("property: psd_sqrt squares back on random PSD matrices") {
  Rng rng(20240811);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform01() * 6.0);
    const Matrix m = oracles::random_spd(rng, n);
    const Matrix root = psd_sqrt(m);
    CHECK(oracles::rel_frobenius(root * root, m) < 1e-8);
  }
}

TEST_CASE("property: Penrose identities for full-row-rank matrices") {
  Rng rng(7);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t m = 1 + static_cast<std::size_t>(rng.uniform01() * 3.0);
    const std::size_t n = m + static_cast<std::size_t>(rng.uniform01() * 3.0);
    Matrix c(m, n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) c(i, j) = rng.uniform(-2.0, 2.0);
    Matrix gram = c * c.transpose();
    if (spectral_decompose(gram).min_eigenvalue() < 1e-6) continue;  // skip near-singular draws

    const Matrix x = moore_penrose_pinv(c);
    CHECK(oracles::rel_frobenius(c * x * c, c) < 1e-8);
    CHECK(oracles::rel_frobenius(x * c * x, x) < 1e-8);
    const Matrix cx = c * x;
    const Matrix xc = x * c;
    CHECK(oracles::rel_frobenius(cx.transpose(), cx) < 1e-8);
    CHECK(oracles::rel_frobenius(xc.transpose(), xc) < 1e-8);
  }
}

TEST_CASE("property: eigenvalues reproduce trace and determinant") {
  Rng rng(99);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform01() * 4.0);
    const Matrix m = oracles::random_spd(rng, n);
    const auto dec = spectral_decompose(m);
    double sum = 0.0;
    double prod = 1.0;
    for (double ev : dec.eigenvalues) {
      sum += ev;
      prod *= ev;
    }
    CHECK(sum == Approx(m.trace()).epsilon(1e-8));
    CHECK(prod == Approx(oracles::determinant(m)).epsilon(1e-8));
  }
}
