#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nmc/coefficients.hpp"
#include "nmc/kernels.hpp"
#include "nmc/measures.hpp"

namespace nmc {

/// tv(mu_k, nu_k) for k = 0..n_max along the two nonlinear flows.
///
/// The difference d_k = mu_k - nu_k is propagated directly,
///   d_{k+1} = d_k P_{mu_k} + nu_k (P_{mu_k} - P_{nu_k}),
/// and kept on the zero-sum hyperplane, so the curve stays accurate long
/// after the two flows agree to machine precision.
std::vector<double> tv_decay(const NonlinearKernelSpec& spec, const Distribution& mu0,
                             const Distribution& nu0, std::size_t n_max);

/// 2 (1 - alpha + lambda)^n.
double butkovsky_bound(double alpha, double lambda, std::size_t n);

/// c_k (1 - alpha_k + lambda_k)^floor(n / k).
double shchegolev_bound(double alpha_k, double lambda_k, double c_k, std::size_t k, std::size_t n);

struct PerturbationBound {
  double exact_form = 0.0;        // 2 sqrt((1 + gamma)^(2n) - 1)
  double small_gamma_form = 0.0;  // 2 sqrt(3 n gamma)
  bool small_gamma_valid = true;  // (1 + gamma)^(2n) - 1 <= 3 n gamma
  bool operator==(const PerturbationBound&) const = default;
};

/// TV bounds on |mu_n - mu0 base^n|. Requires gamma >= 0 and n >= 1.
PerturbationBound perturbation_bound(double gamma, std::size_t n);

/// Smallest n in 1..n_cap with 2 max_{x1 != x2} P(uncoupled at n) <= 2 (r + delta)^n,
/// r the spectral radius of the pair operator of `base`. nullopt when no
/// such n exists within the cap. Throws DomainError unless delta > 0 and
/// r + delta < 1.
std::optional<std::size_t> n_delta_surrogate(const StochasticMatrix& base, double delta, std::size_t n_cap);

/// (1 / (48 n_delta)) (1 - 2 (radius + delta)^n_delta)^2. Throws DomainError
/// unless 2 (radius + delta)^n_delta < 1.
double gamma_threshold(double delta, std::size_t n_delta, double radius);

/// 1 + max(lambda_1, C_i lambda_1 for 2 <= i <= n_delta), with the exact
/// lambda_1 and C_i = c_k_closed_form_bound(i).
double bound_constant(const NonlinearKernelSpec& spec, std::size_t n_delta);

/// prod_i base[x_i, x_{i+1}] / P_{mu_i}[x_i, x_{i+1}] with mu_i the flow of
/// mu0. Throws DomainError if a step has zero probability under P_{mu_i}.
double density_ratio_trajectory(const NonlinearKernelSpec& spec, const std::vector<std::size_t>& trajectory,
                                const Distribution& mu0);

struct RateComparison {
  std::size_t k = 0;
  double radius_power = 0.0;      // r^k
  double one_minus_alpha = 0.0;   // 1 - alpha_k of base
  bool radius_smaller = false;    // r^k < 1 - alpha_k
  bool operator==(const RateComparison&) const = default;
};

std::vector<RateComparison> rate_comparison(const StochasticMatrix& base, std::size_t k_max);

struct VerificationConfig {
  double lambda_bar = 0.1;    // hypothesis: (C - 1) <= lambda_bar
  double slack = 1e-9;        // relative slack for bound checks
  std::size_t n_cap = 500;    // search cap for the surrogate n_delta
  std::size_t k_max = 5;      // coefficient and comparison tables
  SamplerConfig sampler{};
  std::vector<double> sweep_scales{1.0, 0.5, 0.1, 0.0};  // perturbation scales for the rate sweep
  std::size_t workers = 1;    // threads for the rate sweep
  bool operator==(const VerificationConfig&) const = default;
};

struct BoundCheck {
  std::size_t n = 0;
  double tv_exact = 0.0;
  double bound_value = 0.0;     // 2 C (r + delta)^n
  double uncoupled_exact = 0.0; // P(uncoupled at n) for the base coupling of (mu0, nu0)
  double butkovsky = 0.0;       // 2 (1 - alpha + lambda)^n
  bool holds = false;
  bool operator==(const BoundCheck&) const = default;
};

struct TriangleDiagnostic {
  std::size_t n = 0;
  double tv_mu = 0.0;   // tv(mu_n, mu0 base^n)
  double tv_nu = 0.0;   // tv(nu_n, nu0 base^n)
  double tv_linear = 0.0;  // tv(mu0 base^n, nu0 base^n)
  PerturbationBound perturbation;
  bool holds = false;   // tv_mu and tv_nu <= perturbation.exact_form
  bool operator==(const TriangleDiagnostic&) const = default;
};

struct RateSweepEntry {
  double scale = 0.0;
  double lambda = 0.0;
  std::optional<double> empirical_rate;  // log(tv(n_max)) / n_max; empty if tv(n_max) = 0
  std::optional<double> log_radius;  // empty when r = 0
  bool operator==(const RateSweepEntry&) const = default;
};

struct Hypotheses {
  bool radius_condition = false;    // r + delta < 1
  bool n_delta_found = false;
  bool gamma_defined = false;       // base and P_mu mutually absolutely continuous
  bool gamma_small = false;         // gamma < gamma_threshold
  bool lambda_small = false;        // C - 1 <= lambda_bar
  bool met() const { return radius_condition && n_delta_found && gamma_defined && gamma_small && lambda_small; }
  bool operator==(const Hypotheses&) const = default;
};

struct ErgodicityReport {
  double delta = 0.0;
  std::size_t n_max = 0;
  VerificationConfig config;
  Distribution mu0;
  Distribution nu0;

  std::map<std::size_t, double> alpha_linear_k;
  CoefficientCertificate alpha_nonlinear;
  CoefficientCertificate lambda1;
  std::map<std::size_t, double> lambda_k_bounds;  // C_k lambda_1
  std::map<std::size_t, CoefficientCertificate> alpha_nonlinear_k;  // sampled, k = 2..k_max
  std::map<std::size_t, CoefficientCertificate> lambda_k_estimates;  // sampled, k = 1..k_max
  std::optional<CoefficientCertificate> gamma;
  double radius = 0.0;
  std::vector<RateComparison> comparisons;

  std::optional<std::size_t> n_delta;
  std::size_t n_delta_used = 1;  // n_delta, or 1 when the surrogate failed
  std::optional<double> gamma_threshold;
  double big_c = 1.0;
  Hypotheses hypotheses;

  std::vector<BoundCheck> bound_checks;  // n = 0..n_max
  std::vector<TriangleDiagnostic> triangle;  // n = 1..n_max
  std::optional<std::size_t> empirical_onset;  // smallest n0 with all checks n >= n0 holding
  bool bounds_hold = false;                    // all checks with n >= n_delta_used hold
  std::vector<RateSweepEntry> rate_sweep;
  bool equality_case = false;  // lambda_1 == alpha: 1/n regime, not covered

  bool passed() const { return hypotheses.met() && bounds_hold; }
  bool operator==(const ErgodicityReport&) const = default;
};

/// Assembles the full report for the main bound
///   tv(mu_n, nu_n) <= 2 C (r + delta)^n  (n >= n_delta).
/// Unmet hypotheses are recorded, never thrown; the empirical decay is always
/// computed. Throws ValidationError for an invalid spec and DomainError for
/// delta <= 0.
ErgodicityReport verify_main_bound(const NonlinearKernelSpec& spec, double delta, const Distribution& mu0,
                                   const Distribution& nu0, std::size_t n_max,
                                   const VerificationConfig& config = {});

}  // namespace nmc
