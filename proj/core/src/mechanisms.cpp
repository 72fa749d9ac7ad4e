#include "fipriv/mechanisms.hpp"

#include <cmath>

#include "fipriv/errors.hpp"

namespace fipriv {

const NoiseDensity& Mechanism::fixed_noise() const {
  if (has_family()) throw Error("Mechanism: noise is an x-dependent family");
  return std::get<NoiseDensity>(noise);
}

NoiseDensity Mechanism::noise_at(double x) const {
  if (has_family()) return std::get<DensityFamily>(noise)(x);
  return std::get<NoiseDensity>(noise);
}

Mechanism optimal_bounded_identity(std::size_t n, Interval support) {
  Mechanism m;
  m.id = "bounded_identity";
  m.query = Query::identity(n);
  m.noise = NoiseDensity(ProductCosSqDensity(n, support));
  m.budget = BoundedBudget{support};
  return m;
}

Mechanism optimal_bounded_scalar(const Query& q, Interval support) {
  if (q.output_dim() != 1) throw DimensionMismatchError("optimal_bounded_scalar: query must be scalar");
  if (q.kind() == QueryKind::kWeightedAverage || q.kind() == QueryKind::kLinear ||
      q.kind() == QueryKind::kIdentity) {
    const Matrix& c = q.linear_matrix();
    if (c.frobenius_norm() == 0.0) throw ZeroQueryError("optimal_bounded_scalar: C must be nonzero");
  }
  Mechanism m;
  m.id = "bounded_scalar_" + q.describe();
  m.query = q;
  m.noise = NoiseDensity(CosSqDensity(support));
  m.budget = BoundedBudget{support};
  return m;
}

Mechanism optimal_output_bounded_scalar(const Query& q, Interval output_set) {
  Mechanism m = optimal_bounded_scalar(q, output_set);
  m.id = "output_bounded_scalar_" + q.describe();
  m.budget = OutputBoundedBudget{output_set};
  return m;
}

Mechanism optimal_bounded_weighted(Interval support, const WeightFunction& weight) {
  Mechanism m;
  m.id = "bounded_weighted_" + weight.description;
  m.query = Query::identity(1);
  WeightFunction w = weight;
  m.noise = DensityFamily(
      [support, w](double x) { return NoiseDensity(tilted_new(support, w, x)); });
  m.budget = BoundedBudget{support};
  m.weight_name = weight.description;
  return m;
}

Mechanism optimal_unbounded_linear(const Matrix& c, const Budget& budget) {
  const Matrix gram = c * c.transpose();
  if (spectral_decompose(gram).min_eigenvalue() <= kPsdTol)
    throw RankDeficientError("optimal_unbounded_linear: C must have full row rank");
  const Matrix root = psd_sqrt(gram);

  Matrix sigma;
  if (const auto* rho = std::get_if<RhoBudget>(&budget)) {
    if (!(rho->rho > 0.0)) throw Error("optimal_unbounded_linear: rho must be > 0");
    sigma = root.scaled(2.0 / std::sqrt(rho->rho));
  } else if (const auto* theta = std::get_if<ThetaBudget>(&budget)) {
    if (!(theta->theta > 0.0)) throw Error("optimal_unbounded_linear: theta must be > 0");
    sigma = root.scaled(theta->theta / root.trace());
  } else {
    throw Error("optimal_unbounded_linear: budget must be Rho or Theta");
  }

  Mechanism m;
  m.id = "unbounded_linear";
  m.query = Query::linear(c);
  m.noise = NoiseDensity(GaussianDensity(sigma));
  m.budget = budget;
  return m;
}

Mechanism laplace_dp(const Matrix& c, Interval entry_domain, double epsilon) {
  if (c.rows() != 1) throw DimensionMismatchError("laplace_dp: C must be a 1 x n row");
  if (!(epsilon > 0.0)) throw Error("laplace_dp: epsilon must be > 0");
  double cmax = 0.0;
  for (std::size_t j = 0; j < c.cols(); ++j) cmax = std::max(cmax, std::abs(c(0, j)));
  // Sensitivity over epsilon, per the guarantee's proof; the statement's
  // printed reciprocal does not yield exp(epsilon) ratios.
  const double b = entry_domain.length() * cmax / epsilon;
  Mechanism m;
  m.id = "laplace_dp";
  m.query = Query::linear(c);
  m.noise = NoiseDensity(LaplaceDensity(b));
  m.budget = EpsilonBudget{epsilon, entry_domain};
  m.entry_domain = entry_domain;
  return m;
}

Response respond(const Mechanism& m, std::span<const double> x, Rng& rng,
                 std::uint64_t counter) {
  if (m.entry_domain) {
    for (double xi : x)
      if (!m.entry_domain->contains(xi))
        throw DomainViolationError("respond: database value outside declared domain");
  }
  const Vec fx = m.query.evaluate(x);

  NoiseDensity noise = [&]() -> NoiseDensity {
    if (const auto* out = std::get_if<OutputBoundedBudget>(&m.budget)) {
      // family (ii): shift the support so y lands in the output set
      return NoiseDensity(
          CosSqDensity(make_interval(out->output_set.lo - fx[0], out->output_set.hi - fx[0])));
    }
    if (m.has_family()) {
      if (x.size() != 1) throw DimensionMismatchError("respond: density family needs scalar x");
      return m.noise_at(x[0]);
    }
    return m.fixed_noise();
  }();

  Vec w(dim(noise));
  sample_into(noise, rng, w);
  if (w.size() != fx.size()) throw DimensionMismatchError("respond: noise/query dim mismatch");

  Response r;
  r.value.resize(fx.size());
  for (std::size_t i = 0; i < fx.size(); ++i) r.value[i] = fx[i] + w[i];
  r.mechanism_id = m.id;
  r.timestamp = counter;

  if (const auto* bounded = std::get_if<BoundedBudget>(&m.budget)) {
    for (std::size_t i = 0; i < r.value.size(); ++i) {
      const bool inside = r.value[i] >= fx[i] + bounded->support.lo &&
                          r.value[i] <= fx[i] + bounded->support.hi;
      if (!inside) throw Error("respond: bounded response escaped {f(x)} + W");
    }
  } else if (const auto* out = std::get_if<OutputBoundedBudget>(&m.budget)) {
    if (!out->output_set.contains(r.value[0]))
      throw Error("respond: output-bounded response escaped Y");
  }
  return r;
}

MechanismReport mechanism_report(const Mechanism& m, std::optional<Vec> x) {
  Vec probe;
  if (x) {
    probe = *x;
  } else if (m.entry_domain) {
    probe = Vec(m.query.input_dim(), m.entry_domain->mid());
  } else {
    probe = Vec(m.query.input_dim(), 0.0);
  }
  if (probe.size() != m.query.input_dim())
    throw DimensionMismatchError("mechanism_report: representative x has wrong dimension");

  const NoiseDensity noise = m.has_family() ? m.noise_at(probe[0]) : m.fixed_noise();
  MechanismReport report;
  report.fisher = fisher_matrix(noise, m.query.jacobian(probe));
  report.quality = quality(noise);
  return report;
}

std::vector<std::pair<double, MechanismReport>> mechanism_report_grid(
    const Mechanism& m, std::span<const double> x_grid) {
  std::vector<std::pair<double, MechanismReport>> out;
  out.reserve(x_grid.size());
  for (double x : x_grid) out.emplace_back(x, mechanism_report(m, Vec{x}));
  return out;
}

}  // namespace fipriv
