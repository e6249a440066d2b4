#include <algorithm>
#include <iostream>

#include <CLI11.hpp>

#include "nmc/cli/commands.hpp"
#include "nmc/cli/spec_file.hpp"

namespace nmc::cli {
namespace {

std::map<std::string, double> parse_assignments(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw InputError("--set " + item + ": expected name=value");
    const std::string value = item.substr(eq + 1);
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(value, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != value.size()) throw InputError("--set " + item + ": \"" + value + "\" is not a number");
    out[item.substr(0, eq)] = v;
  }
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ergodicity analysis of nonlinear Markov chains on finite state spaces", "nmc"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);
  const auto formats = CLI::IsMember({"json", "md", "csv"});

  AnalyzeOptions a;
  std::vector<std::string> sets;
  auto* analyze = app.add_subcommand("analyze", "Verify the spectral-radius convergence bound for a kernel spec");
  analyze->add_option("spec", a.spec_path, "Kernel spec JSON file")->required();
  analyze->add_option("--delta", a.delta, "Margin added to the spectral radius")->capture_default_str();
  analyze->add_option("--n-max", a.n_max, "Last step of the decay curve")->capture_default_str();
  analyze->add_option("--mu0", a.mu0, "First initial law: dirac:i, uniform, or p1,p2,...")->capture_default_str();
  analyze->add_option("--nu0", a.nu0, "Second initial law")->capture_default_str();
  analyze->add_option("--seed", a.seed, "Seed for sampled coefficient estimates")->capture_default_str();
  analyze->add_option("--samples", a.samples, "Dirichlet draws per sampled estimate")->capture_default_str();
  analyze->add_option("--workers", a.workers, "Threads for the rate sweep")->capture_default_str();
  analyze->add_option("--format", a.format, "json, md or csv")->check(formats)->capture_default_str();
  analyze->add_option("--out", a.out, "Output file (default: stdout)");
  analyze->add_option("--set", sets, "Override a spec parameter, name=value");

  ReproduceOptions r;
  auto* reproduce = app.add_subcommand("reproduce", "Rebuild and check a bundled example");
  reproduce->add_option("example", r.example, "example1 or example2")->required();
  reproduce->add_option("--format", r.format, "json, md or csv")->check(formats)->capture_default_str();
  reproduce->add_option("--out", r.out, "Output file (default: stdout)");

  CoupleOptions c;
  auto* couple = app.add_subcommand("couple", "Compare the simulated coupling with its exact uncoupled mass");
  couple->add_option("spec", c.spec_path, "Kernel spec JSON file (its base matrix is used)");
  couple->add_option("--linear", c.linear_path, "Plain base-matrix JSON file");
  couple->add_option("--mu0", c.mu0, "First initial law")->capture_default_str();
  couple->add_option("--nu0", c.nu0, "Second initial law")->capture_default_str();
  couple->add_option("--n", c.n, "Number of steps")->capture_default_str();
  couple->add_option("--trials", c.trials, "Monte Carlo trials")->capture_default_str();
  couple->add_option("--seed", c.seed, "Simulation seed")->capture_default_str();
  couple->add_option("--workers", c.workers, "Simulation threads")->capture_default_str();
  couple->add_option("--format", c.format, "json, md or csv")->check(formats)->capture_default_str();
  couple->add_option("--out", c.out, "Output file (default: stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*analyze) {
      a.set = parse_assignments(sets);
      return cmd_analyze(a, out, err);
    }
    if (*reproduce) return cmd_reproduce(r, out, err);
    return cmd_couple(c, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

}  // namespace nmc::cli
