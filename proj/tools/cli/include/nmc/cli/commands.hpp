#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "nmc/measures.hpp"

namespace nmc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitAnalytic = 1;
inline constexpr int kExitInput = 2;

const char* tool_version();

/// "uniform", "dirac:i" with 1-based i, or a comma-separated list of
/// probabilities (decimals or p/q). Throws InputError.
Distribution parse_measure(const std::string& text, std::size_t states);

struct AnalyzeOptions {
  std::string spec_path;
  double delta = 0.05;
  std::size_t n_max = 50;
  std::string mu0 = "dirac:1";
  std::string nu0 = "dirac:2";
  std::uint64_t seed = 1;
  std::size_t samples = 500;
  std::size_t workers = 1;
  std::string format = "json";
  std::string out;
  std::map<std::string, double> set;
};

struct ReproduceOptions {
  std::string example;
  std::string format = "json";
  std::string out;
};

struct CoupleOptions {
  std::string spec_path;    // nonlinear spec; its base is used
  std::string linear_path;  // plain {"states", "base"} document
  std::string mu0 = "dirac:1";
  std::string nu0 = "dirac:2";
  std::size_t n = 10;
  std::size_t trials = 100000;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::string format = "json";
  std::string out;
};

/// Each command writes its document to `opts.out`, or to `out` when no path
/// is given, and diagnostics to `err`. Return value is the exit code.
int cmd_analyze(const AnalyzeOptions& opts, std::ostream& out, std::ostream& err);
int cmd_reproduce(const ReproduceOptions& opts, std::ostream& out, std::ostream& err);
int cmd_couple(const CoupleOptions& opts, std::ostream& out, std::ostream& err);

/// Full command line without the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nmc::cli
