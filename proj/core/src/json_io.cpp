#include "fipriv/json_io.hpp"

#include <json.hpp>

#include "fipriv/errors.hpp"

namespace fipriv {

using Json = nlohmann::ordered_json;

namespace {

Json interval_to_json(const Interval& iv) { return Json::array({iv.lo, iv.hi}); }

Interval interval_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw ParseError("interval: expected [lo, hi]");
  return make_interval(j[0].get<double>(), j[1].get<double>());
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("matrix: expected nested arrays");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].size();
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (j[i].size() != cols) throw ParseError("matrix: ragged rows");
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

Json density_to_json_obj(const NoiseDensity& d) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        Json j;
        if constexpr (std::is_same_v<T, CosSqDensity>) {
          j["kind"] = "cos_sq";
          j["support"] = interval_to_json(v.support());
        } else if constexpr (std::is_same_v<T, ProductCosSqDensity>) {
          j["kind"] = "product_cos_sq";
          Json supports = Json::array();
          for (const auto& f : v.factors()) supports.push_back(interval_to_json(f.support()));
          j["supports"] = std::move(supports);
        } else if constexpr (std::is_same_v<T, TiltedCosSqDensity>) {
          j["kind"] = "tilted_cos_sq";
          j["support"] = interval_to_json(v.support());
          j["tilt"] = v.tilt();
          j["shift"] = v.shift();
          j["norm_const"] = v.norm_const();
        } else if constexpr (std::is_same_v<T, GaussianDensity>) {
          j["kind"] = "gaussian";
          j["covariance"] = matrix_to_json(v.covariance());
        } else {
          j["kind"] = "laplace";
          j["scale"] = v.scale();
        }
        return j;
      },
      d);
}

NoiseDensity density_from_json_obj(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "cos_sq") return CosSqDensity(interval_from_json(j.at("support")));
  if (kind == "product_cos_sq") {
    std::vector<CosSqDensity> factors;
    for (const auto& s : j.at("supports")) factors.emplace_back(interval_from_json(s));
    return ProductCosSqDensity(std::move(factors));
  }
  if (kind == "tilted_cos_sq")
    return TiltedCosSqDensity(interval_from_json(j.at("support")), j.at("tilt").get<double>(),
                              j.at("shift").get<double>());
  if (kind == "gaussian") return GaussianDensity(matrix_from_json(j.at("covariance")));
  if (kind == "laplace") return LaplaceDensity(j.at("scale").get<double>());
  throw ParseError("density: unknown kind '" + kind + "'");
}

Json query_to_json_obj(const Query& q) {
  Json j;
  switch (q.kind()) {
    case QueryKind::kIdentity:
      j["type"] = "identity";
      j["n"] = q.input_dim();
      break;
    case QueryKind::kWeightedAverage: {
      j["type"] = "average";
      Json w = Json::array();
      for (std::size_t i = 0; i < q.input_dim(); ++i) w.push_back(q.linear_matrix()(0, i));
      j["weights"] = std::move(w);
      break;
    }
    case QueryKind::kVariance:
      j["type"] = "variance";
      j["n"] = q.input_dim();
      break;
    case QueryKind::kLinear:
      j["type"] = "linear";
      j["matrix"] = matrix_to_json(q.linear_matrix());
      break;
    case QueryKind::kScalarNonlinear:
      throw ParseError("query: scalar_nonlinear queries do not serialize");
  }
  return j;
}

Query query_from_json_obj(const Json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "identity") return Query::identity(j.at("n").get<std::size_t>());
  if (type == "average") return Query::weighted_average(j.at("weights").get<Vec>());
  if (type == "variance") return Query::variance(j.at("n").get<std::size_t>());
  if (type == "linear") return Query::linear(matrix_from_json(j.at("matrix")));
  throw ParseError("query: unknown type '" + type + "'");
}

Json budget_to_json_obj(const Budget& b) {
  Json j;
  if (const auto* bounded = std::get_if<BoundedBudget>(&b)) {
    j["kind"] = "bounded";
    j["support"] = interval_to_json(bounded->support);
  } else if (const auto* out = std::get_if<OutputBoundedBudget>(&b)) {
    j["kind"] = "output_bounded";
    j["output_set"] = interval_to_json(out->output_set);
  } else if (const auto* rho = std::get_if<RhoBudget>(&b)) {
    j["kind"] = "rho";
    j["rho"] = rho->rho;
  } else if (const auto* theta = std::get_if<ThetaBudget>(&b)) {
    j["kind"] = "theta";
    j["theta"] = theta->theta;
  } else {
    const auto& eps = std::get<EpsilonBudget>(b);
    j["kind"] = "epsilon";
    j["epsilon"] = eps.epsilon;
    j["domain"] = interval_to_json(eps.entry_domain);
  }
  return j;
}

Budget budget_from_json_obj(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "bounded") return BoundedBudget{interval_from_json(j.at("support"))};
  if (kind == "output_bounded")
    return OutputBoundedBudget{interval_from_json(j.at("output_set"))};
  if (kind == "rho") return RhoBudget{j.at("rho").get<double>()};
  if (kind == "theta") return ThetaBudget{j.at("theta").get<double>()};
  if (kind == "epsilon")
    return EpsilonBudget{j.at("epsilon").get<double>(), interval_from_json(j.at("domain"))};
  throw ParseError("budget: unknown kind '" + kind + "'");
}

Json mechanism_to_json_obj(const Mechanism& m) {
  Json j;
  j["query"] = query_to_json_obj(m.query);
  if (m.has_family()) {
    const auto* bounded = std::get_if<BoundedBudget>(&m.budget);
    if (bounded == nullptr || !m.weight_name)
      throw ParseError("mechanism: family noise needs a bounded budget and weight name");
    Json noise;
    noise["kind"] = "tilted_family";
    noise["support"] = interval_to_json(bounded->support);
    noise["weight"] = *m.weight_name;
    j["noise"] = std::move(noise);
  } else {
    j["noise"] = density_to_json_obj(m.fixed_noise());
  }
  j["budget"] = budget_to_json_obj(m.budget);
  return j;
}

Mechanism mechanism_from_json_obj(const Json& j) {
  const Json& noise = j.at("noise");
  const std::string kind = noise.at("kind").get<std::string>();
  if (kind == "tilted_family") {
    const Interval support = interval_from_json(noise.at("support"));
    const std::string weight = noise.at("weight").get<std::string>();
    Mechanism m = optimal_bounded_weighted(support, weight_by_name(weight));
    if (j.contains("query")) m.query = query_from_json_obj(j.at("query"));
    return m;
  }
  Mechanism m;
  m.query = query_from_json_obj(j.at("query"));
  m.noise = density_from_json_obj(noise);
  m.budget = budget_from_json_obj(j.at("budget"));
  if (const auto* eps = std::get_if<EpsilonBudget>(&m.budget)) m.entry_domain = eps->entry_domain;
  return m;
}

}  // namespace

std::string density_to_json(const NoiseDensity& d) { return density_to_json_obj(d).dump(); }

NoiseDensity density_from_json(const std::string& text) {
  try {
    return density_from_json_obj(Json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("density: ") + e.what());
  }
}

std::string query_to_json(const Query& q) { return query_to_json_obj(q).dump(); }

Query query_from_json(const std::string& text) {
  try {
    return query_from_json_obj(Json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("query: ") + e.what());
  }
}

std::string budget_to_json(const Budget& b) { return budget_to_json_obj(b).dump(); }

Budget budget_from_json(const std::string& text) {
  try {
    return budget_from_json_obj(Json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("budget: ") + e.what());
  }
}

std::string mechanism_to_json(const Mechanism& m) { return mechanism_to_json_obj(m).dump(); }

Mechanism mechanism_from_json(const std::string& text) {
  try {
    return mechanism_from_json_obj(Json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("mechanism: ") + e.what());
  }
}

std::string fisher_report_to_json(const FisherReport& r) {
  Json j;
  j["trace"] = r.trace;
  if (r.trace_inverse)
    j["trace_inverse"] = *r.trace_inverse;
  else
    j["trace_inverse"] = nullptr;
  j["lower_bound"] = r.lower_bound;
  j["worst_case_entry_bound"] = r.worst_case_entry_bound;
  j["matrix"] = matrix_to_json(r.matrix);
  return j.dump(2);
}

std::string residual_report_to_json(const ResidualReport& r, const std::string& label) {
  Json j;
  j["label"] = label;
  j["max_abs_residual"] = r.max_abs_residual;
  j["interior_points_checked"] = r.interior_points_checked;
  j["mu_used"] = r.mu_used;
  j["boundary_values"] = Json::array({r.boundary_values[0], r.boundary_values[1]});
  j["spacing"] = r.spacing;
  j["sup_u"] = r.sup_u;
  return j.dump(2);
}

}  // namespace fipriv
