#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "fipriv/densities.hpp"
#include "fipriv/fisher.hpp"
#include "fipriv/query.hpp"
#include "fipriv/rng.hpp"

namespace fipriv {

// Budget families from the four problem formulations.
struct BoundedBudget {
  Interval support;  // noise support, independent of x
};
struct OutputBoundedBudget {
  Interval output_set;  // y must land in this set; support shifts by -f(x)
};
struct RhoBudget {
  double rho;  // weight balancing privacy against response quality
};
struct ThetaBudget {
  double theta;  // hard cap on E||w||^2
};
struct EpsilonBudget {
  double epsilon;
  Interval entry_domain;
};
using Budget =
    std::variant<BoundedBudget, OutputBoundedBudget, RhoBudget, ThetaBudget, EpsilonBudget>;

/// A query paired with its privacy noise. The noise is either a fixed
/// density or, for the non-uniform-weight optimum, a family over the
/// (scalar) database value.
struct Mechanism {
  std::string id;
  Query query;
  std::variant<NoiseDensity, DensityFamily> noise;
  Budget budget;
  std::optional<Interval> entry_domain;  // respond() checks x against this when set
  std::optional<std::string> weight_name;  // family mechanisms: which weight built them

  bool has_family() const { return std::holds_alternative<DensityFamily>(noise); }
  const NoiseDensity& fixed_noise() const;
  NoiseDensity noise_at(double x) const;
};

struct Response {
  Vec value;
  std::string mechanism_id;
  std::uint64_t timestamp = 0;  // monotone counter, owned by the caller/ledger
};

/// Identity query over [lo,hi]^n: product of cos^2 factors.
Mechanism optimal_bounded_identity(std::size_t n, Interval support);

/// Any admissible scalar query (average, 1xn linear, variance, nonlinear):
/// the same cos^2 density regardless of weights or nonlinearity.
Mechanism optimal_bounded_scalar(const Query& q, Interval support);

/// Output-constrained variant: W(x) = {-f(x)} + Y, realized by shifting the
/// cos^2 support at response time.
Mechanism optimal_output_bounded_scalar(const Query& q, Interval output_set);

/// Non-uniform weight p(x): the tilted cos^2 family over x (scalar identity).
Mechanism optimal_bounded_weighted(Interval support, const WeightFunction& weight);

/// Unbounded support: Gaussian with Sigma = 2 (C C^T)^{1/2} / sqrt(rho), or
/// Sigma = theta (C C^T)^{1/2} / Tr((C C^T)^{1/2}) for the theta budget.
Mechanism optimal_unbounded_linear(const Matrix& c, const Budget& budget);

/// Laplace mechanism at sensitivity (x_hi - x_lo) max_i |c_i| over epsilon.
Mechanism laplace_dp(const Matrix& c, Interval entry_domain, double epsilon);

/// y = f(x) + w. Bounded mechanisms assert y in {f(x)} + W.
Response respond(const Mechanism& m, std::span<const double> x, Rng& rng,
                 std::uint64_t counter = 0);

struct MechanismReport {
  FisherReport fisher;
  double quality = 0.0;
};

/// Fisher/quality summary at a representative x (domain midpoint when a
/// domain is declared). Family mechanisms should use the grid variant.
MechanismReport mechanism_report(const Mechanism& m, std::optional<Vec> x = std::nullopt);
std::vector<std::pair<double, MechanismReport>> mechanism_report_grid(
    const Mechanism& m, std::span<const double> x_grid);

}  // namespace fipriv
