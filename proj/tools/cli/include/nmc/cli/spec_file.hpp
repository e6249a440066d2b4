#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "nmc/errors.hpp"
#include "nmc/kernels.hpp"
#include "nmc/linalg.hpp"

namespace nmc::cli {

/// Bad user input; the message names the offending path or entry.
class InputError : public Error {
 public:
  using Error::Error;
};

struct LoadedSpec {
  NonlinearKernelSpec spec;
  /// Base entries as written: exact when every entry was a rational
  /// string or a decimal, which is always the case for JSON input.
  RationalMatrix exact_base;
  std::map<std::string, double> parameters;  // after --set overrides
};

/// Parses a kernel-spec document. Accepted keys: "states", "base",
/// "parameters", "perturbations"; anything else is rejected. The plain base
/// form {"states", "base"} is a spec without perturbations. Base entries and
/// coefficients may be numbers or strings holding rationals ("1/15");
/// coefficients may also name a parameter, optionally negated ("-kappa").
/// `overrides` replace parameter values and must name declared parameters.
/// An invalid result (row sums, infeasible vertices) throws InputError.
LoadedSpec parse_spec(const nlohmann::json& doc, const std::map<std::string, double>& overrides = {});

LoadedSpec load_spec_file(const std::filesystem::path& path, const std::map<std::string, double>& overrides = {});

/// Serialized form of a resolved spec (coefficients as numbers).
nlohmann::json spec_to_json(const LoadedSpec& loaded);

}  // namespace nmc::cli
