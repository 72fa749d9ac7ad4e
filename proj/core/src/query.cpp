#include "fipriv/query.hpp"

#include <cmath>
#include <numeric>

#include "fipriv/errors.hpp"

namespace fipriv {

Query::Query() : c_(Matrix::identity(1)) { name_ = "identity"; }

Query Query::identity(std::size_t n) {
  if (n == 0) throw DimensionMismatchError("Query::identity: n must be >= 1");
  Query q{Raw{}};
  q.kind_ = QueryKind::kIdentity;
  q.n_ = n;
  q.m_ = n;
  q.c_ = Matrix::identity(n);
  q.name_ = "identity";
  return q;
}

Query Query::weighted_average(Vec weights) {
  if (weights.empty()) throw DimensionMismatchError("weighted_average: empty weights");
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-12)
    throw Error("weighted_average: weights must sum to 1 within 1e-12");
  Query q{Raw{}};
  q.kind_ = QueryKind::kWeightedAverage;
  q.n_ = weights.size();
  q.m_ = 1;
  q.c_ = Matrix::row_vector(weights);
  q.name_ = "average";
  return q;
}

Query Query::variance(std::size_t n) {
  if (n < 2) throw DimensionMismatchError("variance query: needs n >= 2");
  Query q{Raw{}};
  q.kind_ = QueryKind::kVariance;
  q.n_ = n;
  q.m_ = 1;
  q.name_ = "variance";
  return q;
}

Query Query::linear(Matrix c) {
  // Assumption: the Jacobian has full row rank; rank-deficient C gives no
  // tangible privacy guarantee.
  const Matrix gram = c * c.transpose();
  if (spectral_decompose(gram).min_eigenvalue() <= kPsdTol)
    throw RankDeficientError("linear query: C must have full row rank");
  Query q{Raw{}};
  q.kind_ = QueryKind::kLinear;
  q.n_ = c.cols();
  q.m_ = c.rows();
  q.c_ = std::move(c);
  q.name_ = "linear";
  return q;
}

Query Query::scalar_nonlinear(std::function<double(std::span<const double>)> f,
                              std::function<Vec(std::span<const double>)> gradient, std::size_t n,
                              std::string name) {
  if (!f || !gradient) throw Error("scalar_nonlinear: callable and gradient required");
  Query q{Raw{}};
  q.kind_ = QueryKind::kScalarNonlinear;
  q.n_ = n;
  q.m_ = 1;
  q.f_ = std::move(f);
  q.grad_ = std::move(gradient);
  q.name_ = std::move(name);
  return q;
}

Vec Query::evaluate(std::span<const double> x) const {
  if (x.size() != n_) throw DimensionMismatchError("Query::evaluate: wrong input dimension");
  switch (kind_) {
    case QueryKind::kIdentity:
      return Vec(x.begin(), x.end());
    case QueryKind::kWeightedAverage:
    case QueryKind::kLinear:
      return c_.apply(x);
    case QueryKind::kVariance: {
      const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n_);
      double s = 0.0;
      for (double xi : x) s += (xi - mean) * (xi - mean);
      return {s / static_cast<double>(n_ - 1)};
    }
    case QueryKind::kScalarNonlinear:
      return {f_(x)};
  }
  throw Error("Query::evaluate: unreachable");
}

Matrix Query::jacobian(std::span<const double> x) const {
  if (x.size() != n_) throw DimensionMismatchError("Query::jacobian: wrong input dimension");
  switch (kind_) {
    case QueryKind::kIdentity:
    case QueryKind::kWeightedAverage:
    case QueryKind::kLinear:
      return c_;
    case QueryKind::kVariance: {
      const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n_);
      Matrix j(1, n_);
      for (std::size_t i = 0; i < n_; ++i)
        j(0, i) = 2.0 * (x[i] - mean) / static_cast<double>(n_ - 1);
      return j;
    }
    case QueryKind::kScalarNonlinear: {
      const Vec g = grad_(x);
      if (g.size() != n_) throw DimensionMismatchError("scalar_nonlinear gradient: wrong size");
      return Matrix::row_vector(g);
    }
  }
  throw Error("Query::jacobian: unreachable");
}

const Matrix& Query::linear_matrix() const {
  if (kind_ == QueryKind::kVariance || kind_ == QueryKind::kScalarNonlinear)
    throw Error("linear_matrix: query is not linear");
  return c_;
}

std::string Query::describe() const { return name_; }

}  // namespace fipriv
