#include "nmc/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "nmc/cli/report_format.hpp"
#include "nmc/cli/spec_file.hpp"
#include "nmc/coefficients.hpp"
#include "nmc/convergence.hpp"
#include "nmc/coupling.hpp"
#include "nmc/examples.hpp"
#include "nmc/rational.hpp"
#include "nmc/spectral.hpp"

#ifndef NMC_VERSION
#define NMC_VERSION "0.0.0"
#endif

namespace nmc::cli {
namespace {

using nlohmann::json;

constexpr double kSpectralTolerance = 1e-12;
constexpr double kSigmaLimit = 4.0;

json tool_json() { return {{"name", "nmc"}, {"version", tool_version()}}; }

json tolerances_json(const VerificationConfig& c) {
  return {{"probability", kProbabilityTolerance}, {"degenerate", kDegenerateTolerance},
          {"spectral", kSpectralTolerance},      {"bound_slack", c.slack},
          {"lambda_bar", c.lambda_bar},          {"n_cap", c.n_cap},
          {"k_max", c.k_max}};
}

void emit(const std::string& content, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << content;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError(path + ": cannot open for writing");
  f << content;
  if (!f) throw InputError(path + ": write failed");
}

std::string csv_comments(const json& config) {
  std::string out;
  for (const auto& [key, value] : config.items()) out += "# " + key + " = " + value.dump() + "\n";
  return out;
}

std::string md_config(const json& config) {
  std::string out = "| setting | value |\n|---|---|\n";
  for (const auto& [key, value] : config.items()) out += "| " + key + " | `" + value.dump() + "` |\n";
  return out;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// One comparison of a computed value against a pinned reference.
struct Check {
  std::string name;
  double expected;
  double observed;
  double tolerance;
  bool relative = false;
  bool ok() const {
    const double scale = relative ? std::abs(expected) : 1.0;
    return std::abs(observed - expected) <= tolerance * scale;
  }
};

json check_json(const Check& c) {
  return {{"name", c.name},   {"expected", c.expected}, {"observed", c.observed},
          {"tolerance", c.tolerance}, {"relative", c.relative}, {"ok", c.ok()}};
}

json rational_matrix_json(const RationalMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j).str());
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

const char* tool_version() { return NMC_VERSION; }

Distribution parse_measure(const std::string& text, std::size_t states) {
  if (text == "uniform") return Distribution::uniform(states);
  if (text.rfind("dirac:", 0) == 0) {
    const std::string label = text.substr(6);
    std::size_t pos = 0;
    long long i = 0;
    try {
      i = std::stoll(label, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != label.size() || label.empty()) throw InputError("measure \"" + text + "\": expected dirac:<state>");
    if (i < 1 || static_cast<std::size_t>(i) > states)
      throw InputError("measure \"" + text + "\": state must be between 1 and " + std::to_string(states));
    return dirac(static_cast<std::size_t>(i - 1), states);
  }
  std::vector<double> probs;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      probs.push_back(Rational::parse(item).to_double());
    } catch (const Error&) {
      throw InputError("measure \"" + text + "\": \"" + item + "\" is not a number");
    }
  }
  if (probs.size() != states)
    throw InputError("measure \"" + text + "\": has " + std::to_string(probs.size()) + " entries, spec has " +
                     std::to_string(states) + " states");
  try {
    return Distribution(Eigen::Map<const Vector>(probs.data(), static_cast<Eigen::Index>(probs.size())));
  } catch (const Error& e) {
    throw InputError("measure \"" + text + "\": " + e.what());
  }
}

int cmd_analyze(const AnalyzeOptions& opts, std::ostream& out, std::ostream& err) {
  const LoadedSpec loaded = load_spec_file(opts.spec_path, opts.set);
  VerificationConfig config;
  config.sampler = SamplerConfig{opts.samples, opts.seed};
  config.workers = opts.workers;
  if (!(opts.delta > 0.0)) throw InputError("--delta: must be positive");
  if (opts.workers == 0) throw InputError("--workers: must be at least 1");
  const Distribution mu0 = parse_measure(opts.mu0, loaded.spec.size());
  const Distribution nu0 = parse_measure(opts.nu0, loaded.spec.size());
  const ErgodicityReport report = verify_main_bound(loaded.spec, opts.delta, mu0, nu0, opts.n_max, config);
  const int code = report.passed() ? kExitOk : kExitAnalytic;

  json cfg = {{"spec", opts.spec_path},   {"delta", opts.delta},     {"n_max", opts.n_max},
              {"mu0", opts.mu0}, {"nu0", opts.nu0}, {"seed", opts.seed},
              {"samples", opts.samples},  {"workers", opts.workers}, {"format", opts.format},
              {"set", opts.set},          {"parameters", loaded.parameters},
              {"tolerances", tolerances_json(config)}};
  std::string doc;
  if (opts.format == "json") {
    doc = dump({{"tool", tool_json()},
                {"command", "analyze"},
                {"config", cfg},
                {"spec", spec_to_json(loaded)},
                {"report", report_to_json(report)},
                {"exit_code", code}});
  } else if (opts.format == "md") {
    doc = fmt::format("# nmc {} analyze\n\n{}\n{}\nResult: {} (exit {}).\n", tool_version(), md_config(cfg),
                      report_to_markdown(report),
                      report.passed() ? "hypotheses met and all bound checks hold"
                                      : "hypotheses unmet or a bound check failed",
                      code);
  } else {
    json meta = cfg;
    meta["tool"] = fmt::format("nmc {}", tool_version());
    doc = csv_comments(meta) + report_to_csv(report);
  }
  emit(doc, opts.out, out);
  if (code != kExitOk) {
    const auto& h = report.hypotheses;
    err << "analyze: " << (h.met() ? "" : "hypotheses unmet") << (h.met() || report.bounds_hold ? "" : "; ")
        << (report.bounds_hold ? "" : "bound check failed") << "\n";
  }
  return code;
}

int cmd_reproduce(const ReproduceOptions& opts, std::ostream& out, std::ostream& err) {
  const bool first = opts.example == "example1";
  if (!first && opts.example != "example2")
    throw InputError("unknown example \"" + opts.example + "\" (expected example1 or example2)");
  const auto& ref = first ? examples::example1_reference() : examples::example2_reference();
  const RationalMatrix exact_base = first ? examples::example1_base_exact() : examples::example2_base_exact();
  constexpr double kappa = 0.1;
  const NonlinearKernelSpec spec = first ? examples::example1_spec(kappa) : examples::example2_spec(kappa);

  std::vector<Check> checks;
  const RationalMatrix v_exact = build_v_hat_exact(exact_base);
  checks.push_back({"v_hat_rows", static_cast<double>(ref.pair_states), static_cast<double>(v_exact.rows()), 0});
  checks.push_back({"v_hat_cols", static_cast<double>(ref.pair_states), static_cast<double>(v_exact.cols()), 0});
  if (first) {
    const RationalMatrix reference = examples::example1_v_hat_reference();
    double mismatched = 0;
    for (Eigen::Index i = 0; i < reference.rows(); ++i)
      for (Eigen::Index j = 0; j < reference.cols(); ++j)
        if (v_exact.rows() != reference.rows() || !(v_exact(i, j) == reference(i, j))) ++mismatched;
    checks.push_back({"v_hat_mismatched_entries", 0, mismatched, 0});
  }

  const Matrix v = to_double(v_exact);
  const SpectrumResult dense = eigenvalues(v);
  const SpectrumResult power = spectral_radius(v, kSpectralTolerance);
  checks.push_back({"radius", ref.radius, dense.radius, ref.radius_tolerance});
  checks.push_back({"radius_power_iteration", dense.radius, power.radius, 1e-9});
  if (first) {
    const double s5 = std::sqrt(5.0) / 20.0;
    std::vector<double> expected{0.25 + s5, 0.25 + s5, 0.2, 0.2, 0.2, 0.2, 2.0 / 15, 2.0 / 15, 0.25 - s5, 0.25 - s5, 0.1, 0.1};
    std::sort(expected.rbegin(), expected.rend());
    checks.push_back({"eigenvalue_count", 12, static_cast<double>(dense.eigenvalues.size()), 0});
    for (std::size_t i = 0; i < expected.size() && i < dense.eigenvalues.size(); ++i) {
      checks.push_back({fmt::format("eigenvalue[{}].re", i), expected[i], dense.eigenvalues[i].real(), 1e-9});
      checks.push_back({fmt::format("eigenvalue[{}].im", i), 0.0, dense.eigenvalues[i].imag(), 1e-9});
    }
  } else {
    double smallest = dense.eigenvalues.empty() ? 0.0 : std::abs(dense.eigenvalues.back());
    checks.push_back({"eigenvalues_nonzero", 1.0, smallest > 1e-9 ? 1.0 : 0.0, 0});
  }

  json alpha_table = json::array();
  for (std::size_t k = 1; k <= 5; ++k) {
    const Rational gap = Rational(1) - md_alpha_linear_exact(exact_base, k);
    const double rk = std::pow(dense.radius, static_cast<double>(k));
    checks.push_back({fmt::format("one_minus_alpha[{}]", k), ref.one_minus_alpha[k - 1], gap.to_double(), 1e-12});
    checks.push_back({fmt::format("radius_power[{}]", k), ref.radius_powers[k - 1], rk, 5e-5, true});
    const bool smaller = rk < gap.to_double();
    checks.push_back({fmt::format("radius_power_below_gap[{}]", k), 1.0, smaller ? 1.0 : 0.0, 0});
    alpha_table.push_back({{"k", k},
                           {"one_minus_alpha", {{"value", gap.to_double()}, {"exact", gap.str()}, {"op", "md_alpha_linear_exact"}}},
                           {"radius_power", tagged(rk, "eigenvalues")},
                           {"radius_smaller", smaller}});
  }

  const CoefficientCertificate alpha = md_alpha_nonlinear(spec, 1, {});
  const CoefficientCertificate lambda = lipschitz_lambda(spec);
  checks.push_back({"alpha_nonlinear", ref.alpha_nonlinear, alpha.value, 1e-12});
  checks.push_back({"lambda", kappa, lambda.value, 1e-12});

  bool all_ok = true;
  for (const auto& c : checks) all_ok = all_ok && c.ok();
  const int code = all_ok ? kExitOk : kExitAnalytic;

  json eig = json::array();
  for (const auto& e : dense.eigenvalues) eig.push_back({{"re", e.real()}, {"im", e.imag()}});
  json checks_json = json::array();
  for (const auto& c : checks) checks_json.push_back(check_json(c));
  json cfg = {{"example", opts.example}, {"kappa", kappa}, {"format", opts.format},
              {"tolerances", {{"radius", ref.radius_tolerance}, {"eigenvalue", 1e-9}, {"one_minus_alpha", 1e-12},
                              {"radius_power_relative", 5e-5}, {"spectral", kSpectralTolerance}}}};

  std::string doc;
  if (opts.format == "json") {
    doc = dump({{"tool", tool_json()},
                {"command", "reproduce"},
                {"config", cfg},
                {"v_hat", {{"rows", v_exact.rows()}, {"cols", v_exact.cols()}, {"entries", rational_matrix_json(v_exact)}, {"op", "build_v_hat_exact"}}},
                {"spectrum", {{"eigenvalues", eig}, {"op", "eigenvalues"}, {"method", to_string(dense.method)}}},
                {"radius", tagged(dense.radius, "eigenvalues")},
                {"radius_power_iteration", tagged(power.radius, "spectral_radius")},
                {"comparisons", alpha_table},
                {"alpha_nonlinear", tagged(alpha.value, "md_alpha_nonlinear")},
                {"lambda", tagged(lambda.value, "lipschitz_lambda")},
                {"checks", checks_json},
                {"exit_code", code}});
  } else if (opts.format == "md") {
    std::string md = fmt::format("# nmc {} reproduce {}\n\n{}\n", tool_version(), opts.example, md_config(cfg));
    md += fmt::format("Pair operator: {}x{}, r = {:.15g}\n\n", v_exact.rows(), v_exact.cols(), dense.radius);
    if (v_exact.rows() <= 12) {
      // Pairs labelled with 1-based states, as on the command line.
      const PairIndex pairs(static_cast<std::size_t>(exact_base.rows()));
      auto label = [&](Eigen::Index z) {
        const auto [a, b] = pairs.pair(static_cast<std::size_t>(z));
        return fmt::format("({},{})", a + 1, b + 1);
      };
      md += "| |";
      for (Eigen::Index j = 0; j < v_exact.cols(); ++j) md += " " + label(j) + " |";
      md += "\n|---|";
      for (Eigen::Index j = 0; j < v_exact.cols(); ++j) md += "---|";
      md += "\n";
      for (Eigen::Index i = 0; i < v_exact.rows(); ++i) {
        md += "| " + label(i) + " |";
        for (Eigen::Index j = 0; j < v_exact.cols(); ++j) md += " " + v_exact(i, j).str() + " |";
        md += "\n";
      }
      md += "\n";
    }
    md += "| k | r^k | 1 - alpha_k | r^k < 1 - alpha_k |\n|---|---|---|---|\n";
    for (const auto& row : alpha_table)
      md += fmt::format("| {} | {:.8g} | {} | {} |\n", row["k"].get<int>(), row["radius_power"]["value"].get<double>(),
                        row["one_minus_alpha"]["exact"].get<std::string>(), row["radius_smaller"].get<bool>() ? "yes" : "no");
    md += "\n| check | expected | observed | tolerance | ok |\n|---|---|---|---|---|\n";
    for (const auto& c : checks)
      md += fmt::format("| {} | {:.12g} | {:.12g} | {:g}{} | {} |\n", c.name, c.expected, c.observed, c.tolerance,
                        c.relative ? " (rel)" : "", c.ok() ? "yes" : "NO");
    doc = md;
  } else {
    doc = csv_comments(cfg) + "check,expected,observed,tolerance,relative,ok\n";
    for (const auto& c : checks)
      doc += fmt::format("{},{:.17g},{:.17g},{:g},{},{}\n", c.name, c.expected, c.observed, c.tolerance, c.relative,
                         c.ok());
  }
  emit(doc, opts.out, out);
  if (!all_ok) {
    err << "reproduce: mismatch\n";
    err << fmt::format("{:<28} {:>22} {:>22} {:>10}\n", "check", "expected", "observed", "tolerance");
    for (const auto& c : checks)
      if (!c.ok()) err << fmt::format("{:<28} {:>22.15g} {:>22.15g} {:>10g}\n", c.name, c.expected, c.observed, c.tolerance);
  }
  return code;
}

int cmd_couple(const CoupleOptions& opts, std::ostream& out, std::ostream& err) {
  if (opts.spec_path.empty() == opts.linear_path.empty())
    throw InputError("couple: give exactly one of a spec path or --linear");
  if (opts.trials == 0) throw InputError("--trials: must be at least 1");
  if (opts.workers == 0) throw InputError("--workers: must be at least 1");
  const std::string& path = opts.spec_path.empty() ? opts.linear_path : opts.spec_path;
  const LoadedSpec loaded = load_spec_file(path);
  if (!opts.linear_path.empty() && !loaded.spec.perturbations().empty())
    throw InputError(path + ": --linear expects a plain {\"states\", \"base\"} document");
  const StochasticMatrix& base = loaded.spec.base();
  const std::size_t n_states = base.size();
  const Distribution mu0 = parse_measure(opts.mu0, n_states);
  const Distribution nu0 = parse_measure(opts.nu0, n_states);

  const CouplingOperator op = build_v_hat(base);
  const std::vector<double> exact = uncoupled_curve(op, mu0, nu0, opts.n);
  const CouplingSimulation sim = simulate_coupled(base, mu0, nu0, opts.n, opts.trials, opts.seed, opts.workers);

  bool suspicious = false;
  json rows = json::array();
  std::vector<std::optional<double>> sigmas;
  for (std::size_t k = 0; k <= opts.n; ++k) {
    const double se = sim.standard_error(exact[k]);
    const double diff = std::abs(sim.uncoupled_frequency[k] - exact[k]);
    std::optional<double> sigma;
    bool bad = false;
    if (se > 0.0) {
      sigma = diff / se;
      bad = *sigma > kSigmaLimit;
    } else {
      bad = diff > 0.0;
    }
    suspicious = suspicious || bad;
    sigmas.push_back(sigma);
    rows.push_back({{"n", k},
                    {"uncoupled_exact", tagged(exact[k], "uncoupled_probability_exact")},
                    {"uncoupled_mc", tagged(sim.uncoupled_frequency[k], "simulate_coupled")},
                    {"standard_error", tagged(se, "simulate_coupled")},
                    {"deviation_sigma", {{"value", sigma ? json(*sigma) : json(nullptr)}, {"op", "simulate_coupled"}}},
                    {"mismatch_mc", tagged(sim.mismatch_frequency[k], "simulate_coupled")},
                    {"suspicious", bad}});
  }

  // Marginal check at the final step: coupled exact law, linear law, and the MC law.
  Vector lin1 = mu0.probs(), lin2 = nu0.probs();
  for (std::size_t k = 0; k < opts.n; ++k) {
    lin1 = base.matrix().transpose() * lin1;
    lin2 = base.matrix().transpose() * lin2;
  }
  const Distribution ex1 = marginal_law_exact(base, mu0, nu0, opts.n, 1);
  const Distribution ex2 = marginal_law_exact(base, mu0, nu0, opts.n, 2);
  auto marginal_json = [&](const Distribution& coupled, const Vector& linear, const Distribution& mc) {
    double worst_sigma = 0.0;
    for (std::size_t y = 0; y < n_states; ++y) {
      const double se = sim.standard_error(coupled[y]);
      if (se > 0.0) worst_sigma = std::max(worst_sigma, std::abs(mc[y] - coupled[y]) / se);
    }
    return json{{"coupled_exact", std::vector<double>(coupled.probs().data(), coupled.probs().data() + n_states)},
                {"linear", std::vector<double>(linear.data(), linear.data() + n_states)},
                {"mc", std::vector<double>(mc.probs().data(), mc.probs().data() + n_states)},
                {"max_coupled_linear_gap", tagged((coupled.probs() - linear).cwiseAbs().maxCoeff(), "marginal_law_exact")},
                {"max_mc_deviation_sigma", tagged(worst_sigma, "simulate_coupled")}};
  };
  json marginals = {{"step", opts.n},
                    {"observable1", marginal_json(ex1, lin1, sim.marginal1)},
                    {"observable2", marginal_json(ex2, lin2, sim.marginal2)}};

  const int code = suspicious ? kExitAnalytic : kExitOk;
  json cfg = {{"input", path},        {"linear", !opts.linear_path.empty()}, {"mu0", opts.mu0}, {"nu0", opts.nu0},
              {"n", opts.n},          {"trials", opts.trials},  {"seed", opts.seed},
              {"workers", opts.workers}, {"format", opts.format}, {"sigma_limit", kSigmaLimit},
              {"degenerate_tolerance", kDegenerateTolerance}};
  std::string doc;
  if (opts.format == "json") {
    doc = dump({{"tool", tool_json()}, {"command", "couple"}, {"config", cfg}, {"rows", rows},
                {"marginals", marginals}, {"suspicious", suspicious}, {"exit_code", code}});
  } else if (opts.format == "md") {
    doc = fmt::format("# nmc {} couple\n\n{}\n", tool_version(), md_config(cfg));
    doc += "| n | exact | Monte Carlo | std. error | deviation (sigma) |\n|---|---|---|---|---|\n";
    for (std::size_t k = 0; k <= opts.n; ++k)
      doc += fmt::format("| {} | {:.6g} | {:.6g} | {:.3g} | {} |\n", k, exact[k], sim.uncoupled_frequency[k],
                         sim.standard_error(exact[k]), sigmas[k] ? fmt::format("{:.2f}", *sigmas[k]) : std::string("n/a"));
    doc += fmt::format("\nResult: {} (exit {}).\n", suspicious ? "suspicious deviation" : "consistent", code);
  } else {
    doc = csv_comments(cfg) + "n,uncoupled_exact,uncoupled_mc,standard_error,mismatch_mc\n";
    for (std::size_t k = 0; k <= opts.n; ++k)
      doc += fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g}\n", k, exact[k], sim.uncoupled_frequency[k],
                         sim.standard_error(exact[k]), sim.mismatch_frequency[k]);
  }
  emit(doc, opts.out, out);
  if (suspicious) err << "couple: Monte Carlo estimate deviates from the exact value by more than 4 standard errors\n";
  return code;
}

}  // namespace nmc::cli
