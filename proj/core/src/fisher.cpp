#include "fipriv/fisher.hpp"

#include <cmath>
#include <limits>

#include "fipriv/errors.hpp"

namespace fipriv {

namespace {

constexpr double kSingularEig = 1e-10;
constexpr double kSingularPdf = 1e-14;

double scalar_fisher_on_interval(const NoiseDensity& d, Interval range, std::size_t grid,
                                 ScoreMode mode) {
  if (grid < 2049) throw Error("fisher_scalar_quadrature: grid must be >= 2049");
  const double h = range.length() / static_cast<double>(grid - 1);
  const double fd_step = range.length() / 65536.0;

  Vec integrand(grid, 0.0);
  for (std::size_t i = 1; i + 1 < grid; ++i) {
    const double w = range.lo + h * static_cast<double>(i);
    const double p = pdf1(d, w);
    if (p < kSingularPdf)
      throw SingularDensityError("fisher_scalar_quadrature: density vanishes on interior cell");
    double s = 0.0;
    if (mode == ScoreMode::kAuto) {
      s = analytic_score(d, w);
    } else {
      const double pl = pdf1(d, w - fd_step);
      const double pr = pdf1(d, w + fd_step);
      if (pl < kSingularPdf || pr < kSingularPdf)
        throw SingularDensityError("fisher_scalar_quadrature: density vanishes near grid point");
      s = (std::log(pr) - std::log(pl)) / (2.0 * fd_step);
    }
    integrand[i] = p * s * s;
  }
  // The integrand (gamma')^2/gamma has a removable form at vanishing
  // boundaries; extend it there by linear extrapolation from the interior.
  integrand[0] = std::max(0.0, 2.0 * integrand[1] - integrand[2]);
  integrand[grid - 1] = std::max(0.0, 2.0 * integrand[grid - 2] - integrand[grid - 3]);

  double sum = 0.5 * (integrand[0] + integrand[grid - 1]);
  for (std::size_t i = 1; i + 1 < grid; ++i) sum += integrand[i];
  return sum * h;
}

}  // namespace

FisherReport make_fisher_report(Matrix fisher) {
  FisherReport r;
  r.trace = fisher.trace();
  const std::size_t n = fisher.rows();
  const SpectralDecomposition dec = spectral_decompose(fisher);
  if (dec.min_eigenvalue() > kSingularEig) {
    double ti = 0.0;
    for (double lambda : dec.eigenvalues) ti += 1.0 / lambda;
    r.trace_inverse = ti;
  }
  const double nn = static_cast<double>(n);
  r.lower_bound = r.trace > 0.0 ? nn * nn / r.trace : std::numeric_limits<double>::infinity();
  r.worst_case_entry_bound =
      r.trace > 0.0 ? 1.0 / r.trace : std::numeric_limits<double>::infinity();
  r.matrix = std::move(fisher);
  return r;
}

double fisher_scalar_quadrature(const NoiseDensity& d, std::size_t grid, ScoreMode mode) {
  if (dim(d) != 1) throw NotScalarError("fisher_scalar_quadrature: density is not scalar");
  return scalar_fisher_on_interval(d, effective_support(d), grid, mode);
}

Matrix noise_fisher_matrix(const NoiseDensity& d, std::size_t grid) {
  if (const auto* g = std::get_if<GaussianDensity>(&d)) return g->precision();
  if (const auto* p = std::get_if<ProductCosSqDensity>(&d)) {
    const std::size_t m = p->dim();
    Matrix iw(m, m);
    for (std::size_t i = 0; i < m; ++i) {
      const NoiseDensity factor = p->factors()[i];
      iw(i, i) = fisher_scalar_quadrature(factor, grid);
    }
    return iw;
  }
  return Matrix(1, 1, {fisher_scalar_quadrature(d, grid)});
}

FisherReport fisher_matrix(const NoiseDensity& d, const Matrix& jacobian, std::size_t grid) {
  if (jacobian.rows() != dim(d))
    throw DimensionMismatchError("fisher_matrix: Jacobian rows must match noise dimension");
  const Matrix iw = noise_fisher_matrix(d, grid);
  return make_fisher_report(jacobian.transpose() * iw * jacobian);
}

double crb_unbiased(const FisherReport& report) {
  if (!report.trace_inverse)
    throw SingularFisherError("crb_unbiased: Fisher matrix singular, no finite unbiased bound");
  return *report.trace_inverse;
}

double crb_biased(const FisherReport& report, const Matrix& g_jacobian,
                  std::span<const double> bias) {
  if (!report.trace_inverse) throw SingularFisherError("crb_biased: Fisher matrix singular");
  if (g_jacobian.rows() != report.matrix.rows())
    throw DimensionMismatchError("crb_biased: G rows must match Fisher dimension");
  const SpectralDecomposition dec = spectral_decompose(report.matrix);
  Matrix scaled = dec.eigenvectors;
  for (std::size_t j = 0; j < dec.eigenvalues.size(); ++j)
    for (std::size_t i = 0; i < dec.eigenvalues.size(); ++i)
      scaled(i, j) /= dec.eigenvalues[j];
  const Matrix inv = scaled * dec.eigenvectors.transpose();
  const Matrix core = g_jacobian.transpose() * inv * g_jacobian;
  return core.trace() + norm2_squared(bias);
}

std::pair<double, double> bound_chain(const FisherReport& report) {
  if (!(report.trace > 0.0)) throw ZeroTraceError("bound_chain: Tr(I) must be positive");
  const auto chain = std::make_pair(report.lower_bound, report.worst_case_entry_bound);
  if (report.trace_inverse && *report.trace_inverse < report.lower_bound - 1e-9)
    throw Error("bound_chain: Tr(I^-1) < n^2/Tr(I), spectral computation inconsistent");
  return chain;
}

ObjectiveReport objectives(const DensityFamily& family, const Query& query,
                           const WeightFunction& weight, const WeightGrid& grid,
                           std::size_t fisher_grid) {
  ObjectiveReport report;
  const double dx = grid.spacing();
  report.grid.reserve(grid.points);
  report.weights.reserve(grid.points);
  for (std::size_t i = 0; i < grid.points; ++i) {
    const double x = grid.at(i);
    const double px = weight.value(x) * dx;
    report.grid.push_back(x);
    report.weights.push_back(px);

    const NoiseDensity d = family(x);
    Vec x_vec(query.input_dim(), x);
    const FisherReport fr = fisher_matrix(d, query.jacobian(x_vec), fisher_grid);
    report.j += fr.trace * px;
    if (fr.trace_inverse) {
      report.j_bar += *fr.trace_inverse * px;
    } else {
      report.singular_points.push_back(i);  // Eq. 7 undefined here; flagged, not fatal
    }
  }
  return report;
}

}  // namespace fipriv
