#pragma once

#include <string>

#include "fipriv/fisher.hpp"
#include "fipriv/mechanisms.hpp"
#include "fipriv/pde_verify.hpp"

namespace fipriv {

// JSON schemas shared by the server config and the CLI. Key order is fixed
// so serialized artifacts are byte-stable under a fixed seed.

std::string density_to_json(const NoiseDensity& d);
NoiseDensity density_from_json(const std::string& text);

std::string query_to_json(const Query& q);
Query query_from_json(const std::string& text);

std::string budget_to_json(const Budget& b);
Budget budget_from_json(const std::string& text);

/// {"query": {...}, "noise": {...}, "budget": {...}}
std::string mechanism_to_json(const Mechanism& m);
Mechanism mechanism_from_json(const std::string& text);

/// Flat object: trace, trace_inverse (null when singular), bounds, matrix.
std::string fisher_report_to_json(const FisherReport& r);

std::string residual_report_to_json(const ResidualReport& r, const std::string& label);

}  // namespace fipriv
