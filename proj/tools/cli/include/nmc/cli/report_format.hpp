#pragma once

#include <string>

#include <json.hpp>

#include "nmc/convergence.hpp"

namespace nmc::cli {

/// Report as JSON. Every number is stored as {"value": x, "op": name}, with
/// `name` the operation that produced it ("input" for configuration).
nlohmann::json report_to_json(const ErgodicityReport& report);

/// Inverse of report_to_json; throws InputError on a malformed document.
ErgodicityReport report_from_json(const nlohmann::json& doc);

/// Human-readable tables.
std::string report_to_markdown(const ErgodicityReport& report);

/// Decay curve: n, tv_exact, bound_2C_r_delta, uncoupled_exact, butkovsky_bound.
std::string report_to_csv(const ErgodicityReport& report);

/// {"value": v, "op": op}; null value for an empty optional.
nlohmann::json tagged(double v, const std::string& op);

}  // namespace nmc::cli
