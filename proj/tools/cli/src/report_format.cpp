#include "nmc/cli/report_format.hpp"

#include <sstream>

#include <fmt/format.h>

#include "nmc/cli/spec_file.hpp"

namespace nmc::cli {
namespace {

using nlohmann::json;

json tagged_opt(const std::optional<double>& v, const std::string& op) {
  return {{"value", v ? json(*v) : json(nullptr)}, {"op", op}};
}

json tagged_count(std::size_t v, const std::string& op) { return {{"value", v}, {"op", op}}; }

json tagged_count_opt(const std::optional<std::size_t>& v, const std::string& op) {
  return {{"value", v ? json(*v) : json(nullptr)}, {"op", op}};
}

json distribution_json(const Distribution& d, const std::string& op) {
  json values = json::array();
  for (std::size_t i = 0; i < d.size(); ++i) values.push_back(d[i]);
  return {{"value", values}, {"op", op}};
}

json certificate_json(const CoefficientCertificate& c, const std::string& op) {
  json measures = json::array();
  for (const auto& m : c.achieved_at.measures) measures.push_back(distribution_json(m, op)["value"]);
  return {{"value", c.value},
          {"op", op},
          {"exact", c.exact},
          {"sample_count", c.sample_count},
          {"witness", {{"value", {{"states", c.achieved_at.states}, {"measures", measures}}}, {"op", op}}}};
}

json certificate_map_json(const std::map<std::size_t, CoefficientCertificate>& m, const std::string& op) {
  json out = json::array();
  for (const auto& [k, c] : m) {
    json e = certificate_json(c, op);
    e["k"] = k;
    out.push_back(e);
  }
  return out;
}

json value_map_json(const std::map<std::size_t, double>& m, const std::string& op) {
  json out = json::array();
  for (const auto& [k, v] : m) out.push_back({{"k", k}, {"value", v}, {"op", op}});
  return out;
}

// Readers. Every accessor names the path on failure.

const json& field(const json& j, const char* key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw InputError(path + "." + key + ": missing");
  return j.at(key);
}

template <class T>
T get(const json& j, const std::string& path) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

double value_of(const json& j, const char* key, const std::string& path) {
  return get<double>(field(field(j, key, path), "value", path + "." + key), path + "." + key);
}

std::optional<double> opt_value_of(const json& j, const char* key, const std::string& path) {
  const json& v = field(field(j, key, path), "value", path + "." + key);
  if (v.is_null()) return std::nullopt;
  return get<double>(v, path + "." + key);
}

std::size_t count_of(const json& j, const char* key, const std::string& path) {
  return get<std::size_t>(field(field(j, key, path), "value", path + "." + key), path + "." + key);
}

std::optional<std::size_t> opt_count_of(const json& j, const char* key, const std::string& path) {
  const json& v = field(field(j, key, path), "value", path + "." + key);
  if (v.is_null()) return std::nullopt;
  return get<std::size_t>(v, path + "." + key);
}

Distribution distribution_from(const json& values, const std::string& path) {
  const auto probs = get<std::vector<double>>(values, path);
  try {
    return Distribution(Eigen::Map<const Vector>(probs.data(), static_cast<Eigen::Index>(probs.size())));
  } catch (const Error& e) {
    throw InputError(path + ": " + e.what());
  }
}

CoefficientCertificate certificate_from(const json& j, const std::string& path) {
  CoefficientCertificate c;
  c.value = get<double>(field(j, "value", path), path + ".value");
  c.exact = get<bool>(field(j, "exact", path), path + ".exact");
  c.sample_count = get<std::size_t>(field(j, "sample_count", path), path + ".sample_count");
  const std::string wp = path + ".witness.value";
  const json& w = field(field(j, "witness", path), "value", path + ".witness");
  c.achieved_at.states = get<std::vector<std::size_t>>(field(w, "states", wp), wp + ".states");
  const json& ms = field(w, "measures", wp);
  for (std::size_t i = 0; i < ms.size(); ++i)
    c.achieved_at.measures.push_back(distribution_from(ms[i], wp + ".measures[" + std::to_string(i) + "]"));
  return c;
}

std::map<std::size_t, CoefficientCertificate> certificate_map_from(const json& j, const std::string& path) {
  std::map<std::size_t, CoefficientCertificate> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    out[get<std::size_t>(field(j[i], "k", p), p + ".k")] = certificate_from(j[i], p);
  }
  return out;
}

std::map<std::size_t, double> value_map_from(const json& j, const std::string& path) {
  std::map<std::size_t, double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    out[get<std::size_t>(field(j[i], "k", p), p + ".k")] = get<double>(field(j[i], "value", p), p + ".value");
  }
  return out;
}

std::string num(double v) { return fmt::format("{:.6g}", v); }

std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string("n/a"); }

const char* yes_no(bool b) { return b ? "yes" : "no"; }

}  // namespace

json tagged(double v, const std::string& op) { return {{"value", v}, {"op", op}}; }

json report_to_json(const ErgodicityReport& r) {
  json j;
  j["delta"] = tagged(r.delta, "input");
  j["n_max"] = tagged_count(r.n_max, "input");
  j["mu0"] = distribution_json(r.mu0, "input");
  j["nu0"] = distribution_json(r.nu0, "input");
  const auto& c = r.config;
  j["config"] = {{"lambda_bar", tagged(c.lambda_bar, "input")},
                 {"slack", tagged(c.slack, "input")},
                 {"n_cap", tagged_count(c.n_cap, "input")},
                 {"k_max", tagged_count(c.k_max, "input")},
                 {"samples", tagged_count(c.sampler.samples, "input")},
                 {"seed", tagged_count(c.sampler.seed, "input")},
                 {"sweep_scales", {{"value", c.sweep_scales}, {"op", "input"}}},
                 {"workers", tagged_count(c.workers, "input")}};

  j["alpha_linear_k"] = value_map_json(r.alpha_linear_k, "md_alpha_linear");
  j["alpha_nonlinear"] = certificate_json(r.alpha_nonlinear, "md_alpha_nonlinear");
  j["alpha_nonlinear_k"] = certificate_map_json(r.alpha_nonlinear_k, "md_alpha_nonlinear");
  j["lambda1"] = certificate_json(r.lambda1, "lipschitz_lambda");
  j["lambda_k_bounds"] = value_map_json(r.lambda_k_bounds, "c_k_closed_form_bound*lipschitz_lambda");
  j["lambda_k_estimates"] = certificate_map_json(r.lambda_k_estimates, "lipschitz_lambda_k_estimate");
  j["gamma"] = r.gamma ? certificate_json(*r.gamma, "gamma_perturbation")
                       : json{{"value", nullptr}, {"op", "gamma_perturbation"}, {"reason", "P_mu and base not mutually absolutely continuous"}};
  j["radius"] = tagged(r.radius, "spectral_radius");

  json comparisons = json::array();
  for (const auto& row : r.comparisons)
    comparisons.push_back({{"k", row.k},
                           {"radius_power", tagged(row.radius_power, "rate_comparison")},
                           {"one_minus_alpha", tagged(row.one_minus_alpha, "rate_comparison")},
                           {"radius_smaller", row.radius_smaller}});
  j["comparisons"] = comparisons;

  j["n_delta"] = tagged_count_opt(r.n_delta, "n_delta_surrogate");
  j["n_delta"]["label"] = "surrogate n_delta";
  j["n_delta_used"] = tagged_count(r.n_delta_used, "n_delta_surrogate");
  j["gamma_threshold"] = tagged_opt(r.gamma_threshold, "gamma_threshold");
  j["big_c"] = tagged(r.big_c, "bound_constant");
  const auto& h = r.hypotheses;
  j["hypotheses"] = {{"radius_condition", h.radius_condition}, {"n_delta_found", h.n_delta_found},
                     {"gamma_defined", h.gamma_defined},       {"gamma_small", h.gamma_small},
                     {"lambda_small", h.lambda_small},         {"met", h.met()}};

  json checks = json::array();
  for (const auto& b : r.bound_checks)
    checks.push_back({{"n", b.n},
                      {"tv_exact", tagged(b.tv_exact, "tv_decay")},
                      {"bound_value", tagged(b.bound_value, "verify_main_bound")},
                      {"uncoupled_exact", tagged(b.uncoupled_exact, "uncoupled_probability_exact")},
                      {"butkovsky", tagged(b.butkovsky, "butkovsky_bound")},
                      {"holds", b.holds}});
  j["bound_checks"] = checks;

  json triangle = json::array();
  for (const auto& t : r.triangle)
    triangle.push_back({{"n", t.n},
                        {"tv_mu", tagged(t.tv_mu, "flow")},
                        {"tv_nu", tagged(t.tv_nu, "flow")},
                        {"tv_linear", tagged(t.tv_linear, "linear_power")},
                        {"exact_form", tagged(t.perturbation.exact_form, "perturbation_bound")},
                        {"small_gamma_form", tagged(t.perturbation.small_gamma_form, "perturbation_bound")},
                        {"small_gamma_valid", t.perturbation.small_gamma_valid},
                        {"holds", t.holds}});
  j["triangle"] = triangle;

  j["empirical_onset"] = tagged_count_opt(r.empirical_onset, "verify_main_bound");
  j["bounds_hold"] = r.bounds_hold;

  json sweep = json::array();
  for (const auto& e : r.rate_sweep)
    sweep.push_back({{"scale", tagged(e.scale, "input")},
                     {"lambda", tagged(e.lambda, "lipschitz_lambda")},
                     {"empirical_rate", tagged_opt(e.empirical_rate, "tv_decay")},
                     {"log_radius", tagged_opt(e.log_radius, "spectral_radius")}});
  j["rate_sweep"] = sweep;
  j["equality_case"] = r.equality_case;
  if (r.equality_case) j["equality_note"] = "lambda equals alpha: 1/n regime, out of scope";
  j["passed"] = r.passed();
  return j;
}

ErgodicityReport report_from_json(const json& j) {
  const std::string root = "report";
  ErgodicityReport r;
  r.delta = value_of(j, "delta", root);
  r.n_max = count_of(j, "n_max", root);
  r.mu0 = distribution_from(field(field(j, "mu0", root), "value", root + ".mu0"), root + ".mu0");
  r.nu0 = distribution_from(field(field(j, "nu0", root), "value", root + ".nu0"), root + ".nu0");
  const json& c = field(j, "config", root);
  const std::string cp = root + ".config";
  r.config.lambda_bar = value_of(c, "lambda_bar", cp);
  r.config.slack = value_of(c, "slack", cp);
  r.config.n_cap = count_of(c, "n_cap", cp);
  r.config.k_max = count_of(c, "k_max", cp);
  r.config.sampler.samples = count_of(c, "samples", cp);
  r.config.sampler.seed = count_of(c, "seed", cp);
  r.config.sweep_scales = get<std::vector<double>>(field(field(c, "sweep_scales", cp), "value", cp), cp + ".sweep_scales");
  r.config.workers = count_of(c, "workers", cp);

  r.alpha_linear_k = value_map_from(field(j, "alpha_linear_k", root), root + ".alpha_linear_k");
  r.alpha_nonlinear = certificate_from(field(j, "alpha_nonlinear", root), root + ".alpha_nonlinear");
  r.alpha_nonlinear_k = certificate_map_from(field(j, "alpha_nonlinear_k", root), root + ".alpha_nonlinear_k");
  r.lambda1 = certificate_from(field(j, "lambda1", root), root + ".lambda1");
  r.lambda_k_bounds = value_map_from(field(j, "lambda_k_bounds", root), root + ".lambda_k_bounds");
  r.lambda_k_estimates = certificate_map_from(field(j, "lambda_k_estimates", root), root + ".lambda_k_estimates");
  const json& g = field(j, "gamma", root);
  if (!field(g, "value", root + ".gamma").is_null()) r.gamma = certificate_from(g, root + ".gamma");
  r.radius = value_of(j, "radius", root);

  const json& comparisons = field(j, "comparisons", root);
  for (std::size_t i = 0; i < comparisons.size(); ++i) {
    const std::string p = root + ".comparisons[" + std::to_string(i) + "]";
    RateComparison row;
    row.k = get<std::size_t>(field(comparisons[i], "k", p), p + ".k");
    row.radius_power = value_of(comparisons[i], "radius_power", p);
    row.one_minus_alpha = value_of(comparisons[i], "one_minus_alpha", p);
    row.radius_smaller = get<bool>(field(comparisons[i], "radius_smaller", p), p + ".radius_smaller");
    r.comparisons.push_back(row);
  }

  r.n_delta = opt_count_of(j, "n_delta", root);
  r.n_delta_used = count_of(j, "n_delta_used", root);
  r.gamma_threshold = opt_value_of(j, "gamma_threshold", root);
  r.big_c = value_of(j, "big_c", root);
  const json& h = field(j, "hypotheses", root);
  const std::string hp = root + ".hypotheses";
  r.hypotheses.radius_condition = get<bool>(field(h, "radius_condition", hp), hp);
  r.hypotheses.n_delta_found = get<bool>(field(h, "n_delta_found", hp), hp);
  r.hypotheses.gamma_defined = get<bool>(field(h, "gamma_defined", hp), hp);
  r.hypotheses.gamma_small = get<bool>(field(h, "gamma_small", hp), hp);
  r.hypotheses.lambda_small = get<bool>(field(h, "lambda_small", hp), hp);

  const json& checks = field(j, "bound_checks", root);
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const std::string p = root + ".bound_checks[" + std::to_string(i) + "]";
    BoundCheck b;
    b.n = get<std::size_t>(field(checks[i], "n", p), p + ".n");
    b.tv_exact = value_of(checks[i], "tv_exact", p);
    b.bound_value = value_of(checks[i], "bound_value", p);
    b.uncoupled_exact = value_of(checks[i], "uncoupled_exact", p);
    b.butkovsky = value_of(checks[i], "butkovsky", p);
    b.holds = get<bool>(field(checks[i], "holds", p), p + ".holds");
    r.bound_checks.push_back(b);
  }

  const json& triangle = field(j, "triangle", root);
  for (std::size_t i = 0; i < triangle.size(); ++i) {
    const std::string p = root + ".triangle[" + std::to_string(i) + "]";
    TriangleDiagnostic t;
    t.n = get<std::size_t>(field(triangle[i], "n", p), p + ".n");
    t.tv_mu = value_of(triangle[i], "tv_mu", p);
    t.tv_nu = value_of(triangle[i], "tv_nu", p);
    t.tv_linear = value_of(triangle[i], "tv_linear", p);
    t.perturbation.exact_form = value_of(triangle[i], "exact_form", p);
    t.perturbation.small_gamma_form = value_of(triangle[i], "small_gamma_form", p);
    t.perturbation.small_gamma_valid = get<bool>(field(triangle[i], "small_gamma_valid", p), p);
    t.holds = get<bool>(field(triangle[i], "holds", p), p + ".holds");
    r.triangle.push_back(t);
  }

  r.empirical_onset = opt_count_of(j, "empirical_onset", root);
  r.bounds_hold = get<bool>(field(j, "bounds_hold", root), root + ".bounds_hold");

  const json& sweep = field(j, "rate_sweep", root);
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    const std::string p = root + ".rate_sweep[" + std::to_string(i) + "]";
    RateSweepEntry e;
    e.scale = value_of(sweep[i], "scale", p);
    e.lambda = value_of(sweep[i], "lambda", p);
    e.empirical_rate = opt_value_of(sweep[i], "empirical_rate", p);
    e.log_radius = opt_value_of(sweep[i], "log_radius", p);
    r.rate_sweep.push_back(e);
  }
  r.equality_case = get<bool>(field(j, "equality_case", root), root + ".equality_case");
  return r;
}

std::string report_to_markdown(const ErgodicityReport& r) {
  std::ostringstream md;
  md << "## Coefficients\n\n";
  md << "| quantity | value | source |\n|---|---|---|\n";
  md << "| alpha (nonlinear, k=1) | " << num(r.alpha_nonlinear.value) << " | md_alpha_nonlinear"
     << (r.alpha_nonlinear.exact ? ", exact" : ", sampled") << " |\n";
  md << "| lambda_1 | " << num(r.lambda1.value) << " | lipschitz_lambda, exact |\n";
  md << "| gamma | " << (r.gamma ? num(r.gamma->value) : std::string("undefined")) << " | gamma_perturbation |\n";
  md << "| r(V) | " << num(r.radius) << " | spectral_radius |\n";
  md << "| surrogate n_delta | " << (r.n_delta ? std::to_string(*r.n_delta) : std::string("not found")) << " | n_delta_surrogate |\n";
  md << "| gamma threshold | " << num(r.gamma_threshold) << " | gamma_threshold |\n";
  md << "| C | " << num(r.big_c) << " | bound_constant |\n\n";

  md << "| k | 1 - alpha_k (linear) | C_k lambda_1 | lambda_k (sampled) | alpha_k (nonlinear, sampled) |\n|---|---|---|---|---|\n";
  for (const auto& [k, a] : r.alpha_linear_k) {
    const auto est = r.lambda_k_estimates.find(k);
    const auto ank = r.alpha_nonlinear_k.find(k);
    md << "| " << k << " | " << num(1.0 - a) << " | " << num(r.lambda_k_bounds.at(k)) << " | "
       << (est != r.lambda_k_estimates.end() ? num(est->second.value) : std::string("n/a")) << " | "
       << (ank != r.alpha_nonlinear_k.end() ? num(ank->second.value) : num(r.alpha_nonlinear.value)) << " |\n";
  }

  md << "\n## Spectral radius against the Markov-Dobrushin rate\n\n";
  md << "| k | r^k | 1 - alpha_k | r^k < 1 - alpha_k |\n|---|---|---|---|\n";
  for (const auto& row : r.comparisons)
    md << "| " << row.k << " | " << num(row.radius_power) << " | " << num(row.one_minus_alpha) << " | "
       << yes_no(row.radius_smaller) << " |\n";

  const auto& h = r.hypotheses;
  md << "\n## Hypotheses\n\n";
  md << "| condition | met |\n|---|---|\n";
  md << "| r + delta < 1 | " << yes_no(h.radius_condition) << " |\n";
  md << "| surrogate n_delta found | " << yes_no(h.n_delta_found) << " |\n";
  md << "| gamma defined | " << yes_no(h.gamma_defined) << " |\n";
  md << "| gamma < threshold | " << yes_no(h.gamma_small) << " |\n";
  md << "| C - 1 <= " << num(r.config.lambda_bar) << " | " << yes_no(h.lambda_small) << " |\n";
  if (r.equality_case) md << "\nlambda equals alpha: the 1/n regime is out of scope.\n";

  md << "\n## Decay against 2C(r + delta)^n\n\n";
  md << "| n | tv exact | bound | uncoupled (linear) | 2(1 - alpha + lambda)^n | holds |\n|---|---|---|---|---|---|\n";
  for (const auto& b : r.bound_checks)
    md << "| " << b.n << " | " << num(b.tv_exact) << " | " << num(b.bound_value) << " | " << num(b.uncoupled_exact)
       << " | " << num(b.butkovsky) << " | " << yes_no(b.holds) << " |\n";
  md << "\nAll checks from n = " << r.n_delta_used << " hold: " << yes_no(r.bounds_hold)
     << ". Empirical onset: " << (r.empirical_onset ? std::to_string(*r.empirical_onset) : std::string("none")) << ".\n";

  if (!r.triangle.empty()) {
    md << "\n## Distance to the linear flow\n\n";
    md << "| n | tv(mu_n, mu0 P^n) | tv(nu_n, nu0 P^n) | 2 sqrt((1+gamma)^(2n) - 1) | holds |\n|---|---|---|---|---|\n";
    for (const auto& t : r.triangle)
      md << "| " << t.n << " | " << num(t.tv_mu) << " | " << num(t.tv_nu) << " | " << num(t.perturbation.exact_form)
         << " | " << yes_no(t.holds) << " |\n";
  }

  md << "\n## Rate sweep\n\n";
  md << "| scale | lambda | log(tv(n_max)) / n_max | log r |\n|---|---|---|---|\n";
  for (const auto& e : r.rate_sweep)
    md << "| " << num(e.scale) << " | " << num(e.lambda) << " | " << num(e.empirical_rate) << " | " << num(e.log_radius)
       << " |\n";
  return md.str();
}

std::string report_to_csv(const ErgodicityReport& r) {
  std::string out = "n,tv_exact,bound_2C_r_delta,uncoupled_exact,butkovsky_bound\n";
  for (const auto& b : r.bound_checks)
    out += fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g}\n", b.n, b.tv_exact, b.bound_value, b.uncoupled_exact,
                       b.butkovsky);
  return out;
}

}  // namespace nmc::cli
