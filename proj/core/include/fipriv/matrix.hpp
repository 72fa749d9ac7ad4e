#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "fipriv/errors.hpp"

namespace fipriv {

using Vec = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);          // Euclidean norm
double norm2_squared(std::span<const double> a);

/// Dense row-major matrix of doubles. Small and symmetric/PSD in all the
/// places this library uses it (query matrices, Gramians, covariances).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);
  Matrix(std::size_t rows, std::size_t cols, Vec entries);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);
  static Matrix row_vector(std::span<const double> r);
  static Matrix col_vector(std::span<const double> c);
  static Matrix zero(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const Vec& data() const { return data_; }

  Matrix transpose() const;
  Matrix operator*(const Matrix& rhs) const;
  Matrix operator+(const Matrix& rhs) const;
  Matrix operator-(const Matrix& rhs) const;
  Matrix scaled(double s) const;

  /// Matrix-vector product.
  Vec apply(std::span<const double> x) const;

  double trace() const;
  double frobenius_norm() const;
  /// max_{ij} |a_ij - a_ji| / max(1, ||a||_F)
  double asymmetry() const;
  bool all_finite() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vec data_;
};

struct SpectralDecomposition {
  Vec eigenvalues;      // descending
  Matrix eigenvectors;  // orthonormal columns, same order as eigenvalues

  Matrix reconstruct() const;
  double min_eigenvalue() const { return eigenvalues.empty() ? 0.0 : eigenvalues.back(); }
};

inline constexpr double kSymmetryTol = 1e-12;  // relative asymmetry accepted
inline constexpr double kPsdTol = 1e-10;       // eigenvalues in [-kPsdTol, 0] clamp to 0

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Inputs are symmetrized as (m + m^T)/2 once the asymmetry passes the
/// tolerance gate; products like C C^T are symmetric only up to rounding.
SpectralDecomposition spectral_decompose(const Matrix& m);

/// Symmetric PSD square root via the spectral decomposition.
Matrix psd_sqrt(const Matrix& m);

/// Inverse square root of a positive definite matrix.
Matrix psd_inv_sqrt(const Matrix& m);

/// C^T (C C^T)^{-1} for a full-row-rank C.
Matrix moore_penrose_pinv(const Matrix& c);

}  // namespace fipriv
