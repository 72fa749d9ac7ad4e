#include "fipriv/pde_verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fipriv/errors.hpp"

namespace fipriv {

namespace {

constexpr double kPi = std::numbers::pi;

Vec sample_u(const std::function<double(double)>& pdf, const Grid1D& grid) {
  Vec u(grid.points);
  for (std::size_t i = 0; i < grid.points; ++i) u[i] = std::sqrt(std::max(0.0, pdf(grid.at(i))));
  return u;
}

double sup_abs(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

}  // namespace

Grid1D make_grid(double lo, double hi, std::size_t points) {
  if (!(lo < hi)) throw Error("Grid1D: requires lo < hi");
  if (points < 65) throw Error("Grid1D: needs at least 65 points");
  if (points % 2 == 0) throw Error("Grid1D: point count must be odd");
  return Grid1D{lo, hi, points};
}

ResidualReport residual_from_u(std::span<const double> u, double spacing, double mu) {
  if (u.size() < 5) throw Error("residual_from_u: grid too small");
  ResidualReport report;
  report.mu_used = mu;
  report.spacing = spacing;
  report.boundary_values = {std::abs(u.front()), std::abs(u.back())};
  report.sup_u = sup_abs(u);
  const double h2 = spacing * spacing;
  for (std::size_t i = 2; i + 2 < u.size(); ++i) {  // one cell off each boundary
    const double upp = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / h2;
    report.max_abs_residual = std::max(report.max_abs_residual, std::abs(upp + mu * u[i]));
    ++report.interior_points_checked;
  }
  return report;
}

ResidualReport helmholtz_residual(const CosSqDensity& d, const Grid1D& grid) {
  if (grid.lo > d.support().lo + 1e-12 || grid.hi < d.support().hi - 1e-12)
    throw Error("helmholtz_residual: grid must span the support");
  const double l = d.support().length();
  const double mu = (kPi / l) * (kPi / l);
  const Vec u = sample_u([&](double w) { return d.pdf1(w); }, grid);
  return residual_from_u(u, grid.spacing(), mu);
}

ResidualReport theorem1_residual(const NoiseDensity& d, const Matrix& c, const Grid1D& grid,
                                 std::size_t fisher_grid) {
  if (c.rows() != 1 || c.cols() != 1)
    throw DimensionMismatchError("theorem1_residual: scalar case only");
  const FisherReport fr = fisher_matrix(d, c, fisher_grid);
  if (!fr.trace_inverse) throw SingularFisherError("theorem1_residual: Fisher is singular");
  const double fisher = fr.matrix(0, 0);
  const double coef = c(0, 0) * c(0, 0) / (fisher * fisher);  // I^{-2} C^2

  const Vec u = sample_u([&](double w) { return pdf1(d, w); }, grid);
  const double h2 = grid.spacing() * grid.spacing();
  // mu from least squares: minimize || coef u'' + mu u ||_2 over interior points.
  double num = 0.0;
  double den = 0.0;
  Vec upp(u.size(), 0.0);
  for (std::size_t i = 2; i + 2 < u.size(); ++i) {
    upp[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / h2;
    num += coef * upp[i] * u[i];
    den += u[i] * u[i];
  }
  if (den == 0.0) throw Error("theorem1_residual: u vanishes on the interior");
  const double mu = -num / den;

  ResidualReport report;
  report.mu_used = mu;
  report.spacing = grid.spacing();
  report.boundary_values = {std::abs(u.front()), std::abs(u.back())};
  report.sup_u = sup_abs(u);
  for (std::size_t i = 2; i + 2 < u.size(); ++i) {
    report.max_abs_residual =
        std::max(report.max_abs_residual, std::abs(coef * upp[i] + mu * u[i]));
    ++report.interior_points_checked;
  }
  return report;
}

ResidualReport theorem2_residual_scalar(const DensityFamily& family,
                                        const WeightFunction& weight, double x,
                                        const Grid1D& grid) {
  const NoiseDensity d = family(x);
  const auto support = bounded_support(d);
  if (!support) throw Error("theorem2_residual_scalar: family must have bounded support");
  const double a = weight.log_ratio(x);
  const double l = support->length();
  const double mu = a * a / 4.0 + (kPi / l) * (kPi / l);  // characteristic-root multiplier

  // v = x + w only shifts the abscissa, so derivatives in w equal those in v.
  const Vec u = sample_u([&](double w) { return pdf1(d, w); }, grid);
  const double h = grid.spacing();

  ResidualReport report;
  report.mu_used = mu;
  report.spacing = h;
  report.boundary_values = {std::abs(u.front()), std::abs(u.back())};
  report.sup_u = sup_abs(u);
  for (std::size_t i = 2; i + 2 < u.size(); ++i) {
    const double upp = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h);
    const double up = (u[i + 1] - u[i - 1]) / (2.0 * h);
    report.max_abs_residual =
        std::max(report.max_abs_residual, std::abs(upp + a * up + mu * u[i]));
    ++report.interior_points_checked;
  }
  return report;
}

Theorem4Report theorem4_residual(const Matrix& c, double rho, const Matrix& sigma,
                                 std::size_t points_per_axis) {
  const std::size_t m = sigma.rows();
  if (m > 2) throw DimensionMismatchError("theorem4_residual: m <= 2 only");
  if (c.rows() != m) throw DimensionMismatchError("theorem4_residual: C rows must match sigma");
  if (points_per_axis < 65 || points_per_axis % 2 == 0)
    throw Error("theorem4_residual: points per axis must be odd and >= 65");

  const Matrix gram = c * c.transpose();
  const GaussianDensity gaussian(sigma);
  const Matrix prec = gaussian.precision();
  const double mu = 0.5 * (gram * prec).trace();  // Tr(C^T Sigma^{-1} C)/2

  // u(w) = alpha exp(-w^T Sigma^{-1} w / 4): sqrt of the Gaussian pdf.
  const auto u_of = [&](const Vec& w) { return std::sqrt(gaussian.pdf(w)); };

  const SpectralDecomposition dec = spectral_decompose(sigma);
  const double radius = 8.0 * std::sqrt(dec.eigenvalues.front());
  const Grid1D axis = make_grid(-radius, radius, points_per_axis);
  const double h = axis.spacing();

  Theorem4Report out;
  out.residual.mu_used = mu;
  out.residual.spacing = h;

  const auto residual_at = [&](const Vec& w) {
    // Tr(C C^T D^2 u) by central differences, then + (mu - rho/4 |w|^2) u.
    double tr = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      Vec wp = w;
      Vec wm = w;
      wp[i] += h;
      wm[i] -= h;
      const double dii = (u_of(wp) - 2.0 * u_of(w) + u_of(wm)) / (h * h);
      tr += gram(i, i) * dii;
      for (std::size_t j = i + 1; j < m; ++j) {
        Vec wpp = w, wpm = w, wmp = w, wmm = w;
        wpp[i] += h;
        wpp[j] += h;
        wpm[i] += h;
        wpm[j] -= h;
        wmp[i] -= h;
        wmp[j] += h;
        wmm[i] -= h;
        wmm[j] -= h;
        const double dij = (u_of(wpp) - u_of(wpm) - u_of(wmp) + u_of(wmm)) / (4.0 * h * h);
        tr += 2.0 * gram(i, j) * dij;
      }
    }
    const double quad = norm2_squared(w);
    return tr + (mu - 0.25 * rho * quad) * u_of(w);
  };

  double sup_u = 0.0;
  std::size_t checked = 0;
  double max_res = 0.0;
  if (m == 1) {
    for (std::size_t i = 2; i + 2 < points_per_axis; ++i) {
      const Vec w{axis.at(i)};
      max_res = std::max(max_res, std::abs(residual_at(w)));
      sup_u = std::max(sup_u, u_of(w));
      ++checked;
    }
  } else {
    for (std::size_t i = 2; i + 2 < points_per_axis; ++i) {
      for (std::size_t j = 2; j + 2 < points_per_axis; ++j) {
        const Vec w{axis.at(i), axis.at(j)};
        max_res = std::max(max_res, std::abs(residual_at(w)));
        sup_u = std::max(sup_u, u_of(w));
        ++checked;
      }
    }
  }
  out.residual.max_abs_residual = max_res;
  out.residual.interior_points_checked = checked;
  out.residual.sup_u = sup_u;
  out.residual.boundary_values = {u_of(Vec(m, axis.lo)), u_of(Vec(m, axis.hi))};

  // Coefficient comparison: the exact residual carries
  // (1/4) w^T Sigma^{-1} C C^T Sigma^{-1} w against (rho/4) w^T w.
  const Matrix coef = prec * gram * prec;
  out.w2_mismatch_factor = rho * static_cast<double>(m) / coef.trace();
  out.vanishing_scale = 1.0 / std::sqrt(rho);
  return out;
}

bool boundary_check(const NoiseDensity& d) {
  const auto support = bounded_support(d);
  if (!support) throw Error("boundary_check: density has unbounded support");
  if (const auto* p = std::get_if<ProductCosSqDensity>(&d)) {
    for (const auto& f : p->factors())
      if (f.pdf1(f.support().lo) != 0.0 || f.pdf1(f.support().hi) != 0.0) return false;
    return true;
  }
  return pdf1(d, support->lo) == 0.0 && pdf1(d, support->hi) == 0.0;
}

bool boundary_check(const std::function<double(double)>& pdf, Interval support) {
  return pdf(support.lo) == 0.0 && pdf(support.hi) == 0.0;
}

}  // namespace fipriv
