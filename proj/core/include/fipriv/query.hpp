#pragma once

#include <functional>
#include <span>
#include <string>

#include "fipriv/matrix.hpp"

namespace fipriv {

enum class QueryKind { kIdentity, kWeightedAverage, kVariance, kLinear, kScalarNonlinear };

/// A database-to-response map f: R^n -> R^m together with its Jacobian.
class Query {
 public:
  Query();  // identity on R^1

  static Query identity(std::size_t n);
  /// Weights must sum to 1 (within 1e-12).
  static Query weighted_average(Vec weights);
  /// Sample variance f(x) = sum (x_i - mean)^2 / (n - 1); needs n >= 2.
  static Query variance(std::size_t n);
  /// Full-row-rank C (checked through the C C^T spectrum).
  static Query linear(Matrix c);
  static Query scalar_nonlinear(std::function<double(std::span<const double>)> f,
                                std::function<Vec(std::span<const double>)> gradient,
                                std::size_t n, std::string name);

  QueryKind kind() const { return kind_; }
  std::size_t input_dim() const { return n_; }
  std::size_t output_dim() const { return m_; }

  Vec evaluate(std::span<const double> x) const;
  Matrix jacobian(std::span<const double> x) const;

  /// The matrix view of a linear-family query (identity/average/linear).
  const Matrix& linear_matrix() const;
  std::string describe() const;

 private:
  struct Raw {};
  explicit Query(Raw) {}

  QueryKind kind_ = QueryKind::kIdentity;
  std::size_t n_ = 1;
  std::size_t m_ = 1;
  Matrix c_;  // linear families
  std::function<double(std::span<const double>)> f_;
  std::function<Vec(std::span<const double>)> grad_;
  std::string name_;
};

}  // namespace fipriv
