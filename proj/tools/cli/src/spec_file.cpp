#include "nmc/cli/spec_file.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "nmc/rational.hpp"

namespace nmc::cli {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw InputError(path + ": " + what); }

std::size_t read_index(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 0) fail(path, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

Rational read_rational(const json& j, const std::string& path) {
  try {
    if (j.is_string()) return Rational::parse(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_number_float()) return Rational::from_double(j.get<double>());
  } catch (const Error& e) {
    fail(path, e.what());
  }
  fail(path, "expected a number or a rational string");
}

double read_coefficient(const json& j, const std::map<std::string, double>& params, const std::string& path) {
  if (j.is_string()) {
    std::string text = j.get<std::string>();
    double sign = 1.0;
    std::string name = text;
    if (!name.empty() && name.front() == '-') {
      sign = -1.0;
      name.erase(0, 1);
    }
    if (auto it = params.find(name); it != params.end()) return sign * it->second;
    try {
      return Rational::parse(text).to_double();
    } catch (const Error&) {
      fail(path, "\"" + text + "\" is neither a declared parameter nor a number");
    }
  }
  if (j.is_number()) return j.get<double>();
  fail(path, "expected a number, a rational string or a parameter name");
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& path) {
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) fail(path.empty() ? key : path + "." + key, "unknown key");
}

}  // namespace

LoadedSpec parse_spec(const json& doc, const std::map<std::string, double>& overrides) {
  if (!doc.is_object()) fail("$", "expected a JSON object");
  check_keys(doc, {"states", "base", "parameters", "perturbations"}, "");
  if (!doc.contains("states")) fail("states", "missing");
  if (!doc.contains("base")) fail("base", "missing");
  const std::size_t n = read_index(doc["states"], "states");
  if (n == 0) fail("states", "must be at least 1");

  const json& rows = doc["base"];
  if (!rows.is_array() || rows.size() != n) fail("base", "expected " + std::to_string(n) + " rows");
  RationalMatrix exact(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const std::string rp = "base[" + std::to_string(i) + "]";
    if (!rows[i].is_array() || rows[i].size() != n) fail(rp, "expected " + std::to_string(n) + " entries");
    for (std::size_t j = 0; j < n; ++j)
      exact(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          read_rational(rows[i][j], rp + "[" + std::to_string(j) + "]");
  }

  std::map<std::string, double> params;
  if (doc.contains("parameters")) {
    const json& p = doc["parameters"];
    if (!p.is_object()) fail("parameters", "expected an object");
    for (const auto& [name, value] : p.items()) {
      if (name.empty() || name.front() == '-') fail("parameters." + name, "invalid parameter name");
      if (!value.is_number()) fail("parameters." + name, "expected a number");
      params[name] = value.get<double>();
    }
  }
  for (const auto& [name, value] : overrides) {
    if (!params.count(name)) fail("parameters." + name, "override for an undeclared parameter");
    params[name] = value;
  }

  std::vector<PerturbationTerm> terms;
  if (doc.contains("perturbations")) {
    const json& list = doc["perturbations"];
    if (!list.is_array()) fail("perturbations", "expected an array");
    for (std::size_t t = 0; t < list.size(); ++t) {
      const std::string tp = "perturbations[" + std::to_string(t) + "]";
      const json& e = list[t];
      if (!e.is_object()) fail(tp, "expected an object");
      check_keys(e, {"row", "col", "measure_index", "coefficient"}, tp);
      for (const char* key : {"row", "col", "measure_index", "coefficient"})
        if (!e.contains(key)) fail(tp + "." + key, "missing");
      PerturbationTerm term;
      term.row = read_index(e["row"], tp + ".row");
      term.col = read_index(e["col"], tp + ".col");
      term.measure_index = read_index(e["measure_index"], tp + ".measure_index");
      for (auto [value, key] : {std::pair{term.row, "row"}, {term.col, "col"}, {term.measure_index, "measure_index"}})
        if (value >= n) fail(tp + "." + key, std::to_string(value) + " is out of range for " + std::to_string(n) + " states");
      term.coefficient = read_coefficient(e["coefficient"], params, tp + ".coefficient");
      terms.push_back(term);
    }
  }

  std::optional<StochasticMatrix> base;
  try {
    base.emplace(to_double(exact));
  } catch (const Error& e) {
    fail("base", e.what());
  }
  std::optional<NonlinearKernelSpec> spec;
  try {
    spec.emplace(*base, std::move(terms), params);
  } catch (const Error& e) {
    fail("perturbations", e.what());
  }
  if (!spec->validation().valid()) fail("perturbations", spec->validation().summary());
  return LoadedSpec{std::move(*spec), std::move(exact), std::move(params)};
}

LoadedSpec load_spec_file(const std::filesystem::path& path, const std::map<std::string, double>& overrides) {
  std::ifstream in(path);
  if (!in) throw InputError(path.string() + ": cannot open file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": malformed JSON: " + e.what());
  }
  return parse_spec(doc, overrides);
}

json spec_to_json(const LoadedSpec& loaded) {
  const auto& spec = loaded.spec;
  json base = json::array();
  for (Eigen::Index i = 0; i < loaded.exact_base.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < loaded.exact_base.cols(); ++j) row.push_back(loaded.exact_base(i, j).str());
    base.push_back(row);
  }
  json terms = json::array();
  for (const auto& t : spec.perturbations())
    terms.push_back({{"row", t.row}, {"col", t.col}, {"measure_index", t.measure_index}, {"coefficient", t.coefficient}});
  return {{"states", spec.size()}, {"base", base}, {"parameters", loaded.parameters}, {"perturbations", terms}};
}

}  // namespace nmc::cli
