#pragma once

// Independent test oracles. Everything here is deliberately implemented
// without touching the library paths it is used to check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "fipriv/matrix.hpp"
#include "fipriv/rng.hpp"

namespace oracles {

/// Determinant by Laplace expansion; fine for the n <= 6 matrices in tests.
inline double determinant(const fipriv::Matrix& m) {
  const std::size_t n = m.rows();
  if (n == 1) return m(0, 0);
  double det = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    fipriv::Matrix minor(n - 1, n - 1);
    for (std::size_t r = 1; r < n; ++r) {
      std::size_t cc = 0;
      for (std::size_t c = 0; c < n; ++c) {
        if (c == j) continue;
        minor(r - 1, cc++) = m(r, c);
      }
    }
    const double sign = j % 2 == 0 ? 1.0 : -1.0;
    det += sign * m(0, j) * determinant(minor);
  }
  return det;
}

/// Random symmetric positive definite matrix B^T B + eps I.
inline fipriv::Matrix random_spd(fipriv::Rng& rng, std::size_t n, double ridge = 1e-3) {
  fipriv::Matrix b(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) b(i, j) = rng.uniform(-1.0, 1.0);
  fipriv::Matrix m = b.transpose() * b;
  for (std::size_t i = 0; i < n; ++i) m(i, i) += ridge;
  return m;
}

/// Composite Simpson with a fixed even interval count; independent of the
/// library's adaptive integrator.
inline double simpson(const std::function<double(double)>& f, double lo, double hi,
                      std::size_t intervals = 20000) {
  if (intervals % 2 != 0) ++intervals;
  const double h = (hi - lo) / static_cast<double>(intervals);
  double sum = f(lo) + f(hi);
  for (std::size_t i = 1; i < intervals; ++i) {
    const double w = lo + h * static_cast<double>(i);
    sum += f(w) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return sum * h / 3.0;
}

/// Two-sided Kolmogorov-Smirnov statistic of samples against a cdf.
inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double c = cdf(samples[i]);
    d = std::max(d, std::abs(c - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - c));
  }
  return d;
}

/// Least-squares slope of y against x.
inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  return num / den;
}

/// Relative Frobenius distance.
inline double rel_frobenius(const fipriv::Matrix& a, const fipriv::Matrix& b) {
  return (a - b).frobenius_norm() / std::max(1e-300, b.frobenius_norm());
}

}  // namespace oracles
