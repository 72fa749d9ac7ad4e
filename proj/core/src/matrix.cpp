#include "fipriv/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fipriv {

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatchError("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2_squared(std::span<const double> a) { return dot(a, a); }

double norm2(std::span<const double> a) { return std::sqrt(norm2_squared(a)); }

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
  if (rows == 0 || cols == 0) throw DimensionMismatchError("Matrix: rows, cols must be >= 1");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, Vec entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (rows == 0 || cols == 0) throw DimensionMismatchError("Matrix: rows, cols must be >= 1");
  if (data_.size() != rows * cols)
    throw DimensionMismatchError("Matrix: entry count does not match rows*cols");
  if (!all_finite()) throw Error("Matrix: non-finite entry");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionMismatchError("Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
  if (!all_finite()) throw Error("Matrix: non-finite entry");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::row_vector(std::span<const double> r) {
  return Matrix(1, r.size(), Vec(r.begin(), r.end()));
}

Matrix Matrix::col_vector(std::span<const double> c) {
  return Matrix(c.size(), 1, Vec(c.begin(), c.end()));
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
  if (cols_ != rhs.rows_) throw DimensionMismatchError("Matrix multiply: inner dims differ");
  Matrix out(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const double a = (*this)(i, k);
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
    }
  return out;
}

Matrix Matrix::operator+(const Matrix& rhs) const {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    throw DimensionMismatchError("Matrix add: shape mismatch");
  Matrix out = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] += rhs.data_[i];
  return out;
}

Matrix Matrix::operator-(const Matrix& rhs) const {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    throw DimensionMismatchError("Matrix subtract: shape mismatch");
  Matrix out = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] -= rhs.data_[i];
  return out;
}

Matrix Matrix::scaled(double s) const {
  Matrix out = *this;
  for (double& v : out.data_) v *= s;
  return out;
}

Vec Matrix::apply(std::span<const double> x) const {
  if (x.size() != cols_) throw DimensionMismatchError("Matrix apply: size mismatch");
  Vec y(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) s += (*this)(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

double Matrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

double Matrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

double Matrix::asymmetry() const {
  if (rows_ != cols_) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i + 1; j < cols_; ++j)
      worst = std::max(worst, std::abs((*this)(i, j) - (*this)(j, i)));
  return worst / std::max(1.0, frobenius_norm());
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix SpectralDecomposition::reconstruct() const {
  const std::size_t n = eigenvalues.size();
  Matrix scaled = eigenvectors;  // columns scaled by eigenvalues
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) scaled(i, j) *= eigenvalues[j];
  return scaled * eigenvectors.transpose();
}

namespace {

// One cyclic Jacobi sweep; returns the remaining off-diagonal Frobenius mass.
double jacobi_sweep(Matrix& a, Matrix& v) {
  const std::size_t n = a.rows();
  for (std::size_t p = 0; p + 1 < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      const double apq = a(p, q);
      if (apq == 0.0) continue;
      const double app = a(p, p);
      const double aqq = a(q, q);
      const double theta = 0.5 * std::atan2(2.0 * apq, aqq - app);
      const double c = std::cos(theta);
      const double s = std::sin(theta);

      for (std::size_t k = 0; k < n; ++k) {
        const double akp = a(k, p);
        const double akq = a(k, q);
        a(k, p) = c * akp - s * akq;
        a(k, q) = s * akp + c * akq;
      }
      for (std::size_t k = 0; k < n; ++k) {
        const double apk = a(p, k);
        const double aqk = a(q, k);
        a(p, k) = c * apk - s * aqk;
        a(q, k) = s * apk + c * aqk;
      }
      a(p, q) = 0.0;
      a(q, p) = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double vkp = v(k, p);
        const double vkq = v(k, q);
        v(k, p) = c * vkp - s * vkq;
        v(k, q) = s * vkp + c * vkq;
      }
    }
  }
  double off = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * a(i, j) * a(i, j);
  return std::sqrt(off);
}

}  // namespace

SpectralDecomposition spectral_decompose(const Matrix& m) {
  if (m.rows() != m.cols()) throw NonSymmetricError("spectral_decompose: matrix not square");
  if (m.asymmetry() > kSymmetryTol)
    throw NonSymmetricError("spectral_decompose: asymmetry exceeds tolerance");

  const std::size_t n = m.rows();
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (m(i, j) + m(j, i));
  Matrix v = Matrix::identity(n);

  const double scale = std::max(1.0, a.frobenius_norm());
  for (int sweep = 0; sweep < 64; ++sweep) {
    if (jacobi_sweep(a, v) <= 1e-15 * scale) break;
  }

  SpectralDecomposition dec;
  dec.eigenvalues.resize(n);
  for (std::size_t i = 0; i < n; ++i) dec.eigenvalues[i] = a(i, i);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return dec.eigenvalues[i] > dec.eigenvalues[j];
  });

  Vec sorted(n);
  Matrix vec(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    sorted[j] = dec.eigenvalues[order[j]];
    for (std::size_t i = 0; i < n; ++i) vec(i, j) = v(i, order[j]);
  }
  dec.eigenvalues = std::move(sorted);
  dec.eigenvectors = std::move(vec);
  return dec;
}

namespace {

Matrix spectral_map(const Matrix& m, double (*f)(double), const char* what, double min_allowed) {
  SpectralDecomposition dec = spectral_decompose(m);
  Vec mapped(dec.eigenvalues.size());
  for (std::size_t i = 0; i < dec.eigenvalues.size(); ++i) {
    double lambda = dec.eigenvalues[i];
    if (lambda < min_allowed) throw NotPsdError(std::string(what) + ": eigenvalue below tolerance");
    if (lambda < 0.0) lambda = 0.0;  // clamp rounding debris on PSD products
    mapped[i] = f(lambda);
  }
  Matrix scaled = dec.eigenvectors;
  for (std::size_t j = 0; j < mapped.size(); ++j)
    for (std::size_t i = 0; i < mapped.size(); ++i) scaled(i, j) *= mapped[j];
  Matrix out = scaled * dec.eigenvectors.transpose();
  for (std::size_t i = 0; i < out.rows(); ++i)  // exact symmetry for downstream checks
    for (std::size_t j = i + 1; j < out.cols(); ++j) {
      const double avg = 0.5 * (out(i, j) + out(j, i));
      out(i, j) = avg;
      out(j, i) = avg;
    }
  return out;
}

}  // namespace

Matrix psd_sqrt(const Matrix& m) {
  return spectral_map(
      m, [](double x) { return std::sqrt(x); }, "psd_sqrt", -kPsdTol);
}

Matrix psd_inv_sqrt(const Matrix& m) {
  SpectralDecomposition dec = spectral_decompose(m);
  if (dec.min_eigenvalue() <= kPsdTol)
    throw SingularError("psd_inv_sqrt: matrix is singular or indefinite");
  return spectral_map(
      m, [](double x) { return 1.0 / std::sqrt(x); }, "psd_inv_sqrt", kPsdTol);
}

Matrix moore_penrose_pinv(const Matrix& c) {
  const Matrix gram = c * c.transpose();  // m x m
  SpectralDecomposition dec = spectral_decompose(gram);
  if (dec.min_eigenvalue() <= kPsdTol)
    throw RankDeficientError("moore_penrose_pinv: C C^T near-singular");
  // (C C^T)^{-1} through the same decomposition
  Matrix scaled = dec.eigenvectors;
  for (std::size_t j = 0; j < dec.eigenvalues.size(); ++j)
    for (std::size_t i = 0; i < dec.eigenvalues.size(); ++i) scaled(i, j) /= dec.eigenvalues[j];
  const Matrix gram_inv = scaled * dec.eigenvectors.transpose();
  return c.transpose() * gram_inv;
}

}  // namespace fipriv
