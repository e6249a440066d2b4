#include "nmc/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "nmc/coupling.hpp"
#include "nmc/errors.hpp"
#include "nmc/spectral.hpp"

namespace nmc {
namespace {

Eigen::Index ix(std::size_t i) { return static_cast<Eigen::Index>(i); }

void check_same_size(const NonlinearKernelSpec& spec, const Distribution& mu0, const Distribution& nu0,
                     const char* where) {
  if (mu0.size() != spec.size() || nu0.size() != spec.size())
    throw DimensionError(std::string(where) + ": initial laws must have " + std::to_string(spec.size()) +
                         " states, got " + std::to_string(mu0.size()) + " and " + std::to_string(nu0.size()));
}

double pair_radius(const StochasticMatrix& base) { return spectral_radius(build_v_hat(base).v_hat).radius; }

}  // namespace

std::vector<double> tv_decay(const NonlinearKernelSpec& spec, const Distribution& mu0, const Distribution& nu0,
                             std::size_t n_max) {
  check_same_size(spec, mu0, nu0, "tv_decay");
  std::vector<double> out{tv_distance(mu0, nu0)};
  out.reserve(n_max + 1);
  const auto ns = static_cast<double>(spec.size());
  Vector mu = mu0.probs();
  Vector nu = nu0.probs();
  Vector d = mu - nu;
  for (std::size_t k = 1; k <= n_max; ++k) {
    const Matrix p_mu = evaluate(spec, Distribution(mu)).matrix();
    const Matrix p_nu = evaluate(spec, Distribution(nu)).matrix();
    Vector next = p_mu.transpose() * d;
    for (const auto& t : spec.perturbations())
      next[ix(t.col)] += nu[ix(t.row)] * t.coefficient * d[ix(t.measure_index)];
    next.array() -= next.sum() / ns;
    d = std::move(next);
    mu = p_mu.transpose() * mu;
    nu = p_nu.transpose() * nu;
    // Keep the flows on the simplex against rounding drift.
    mu /= mu.sum();
    nu /= nu.sum();
    out.push_back(d.cwiseAbs().sum());
  }
  return out;
}

double butkovsky_bound(double alpha, double lambda, std::size_t n) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("butkovsky_bound: alpha must lie in [0, 1]");
  if (!(lambda >= 0.0)) throw DomainError("butkovsky_bound: lambda must be nonnegative");
  return 2.0 * std::pow(1.0 - alpha + lambda, static_cast<double>(n));
}

double shchegolev_bound(double alpha_k, double lambda_k, double c_k, std::size_t k, std::size_t n) {
  if (k == 0) throw DomainError("shchegolev_bound: k must be at least 1");
  if (!(alpha_k >= 0.0 && alpha_k <= 1.0)) throw DomainError("shchegolev_bound: alpha_k must lie in [0, 1]");
  if (!(lambda_k >= 0.0)) throw DomainError("shchegolev_bound: lambda_k must be nonnegative");
  if (!(c_k > 0.0)) throw DomainError("shchegolev_bound: c_k must be positive");
  return c_k * std::pow(1.0 - alpha_k + lambda_k, static_cast<double>(n / k));
}

PerturbationBound perturbation_bound(double gamma, std::size_t n) {
  if (!(gamma >= 0.0)) throw DomainError("perturbation_bound: gamma must be nonnegative");
  if (n == 0) throw DomainError("perturbation_bound: n must be at least 1");
  const double nn = static_cast<double>(n);
  const double growth = std::expm1(2.0 * nn * std::log1p(gamma));  // (1 + gamma)^(2n) - 1
  PerturbationBound b;
  b.exact_form = 2.0 * std::sqrt(growth);
  b.small_gamma_form = 2.0 * std::sqrt(3.0 * nn * gamma);
  b.small_gamma_valid = growth <= 3.0 * nn * gamma;
  return b;
}

std::optional<std::size_t> n_delta_surrogate(const StochasticMatrix& base, double delta, std::size_t n_cap) {
  if (!(delta > 0.0)) throw DomainError("n_delta_surrogate: delta must be positive");
  const CouplingOperator op = build_v_hat(base);
  const double r = spectral_radius(op.v_hat).radius;
  if (!(r + delta < 1.0))
    throw DomainError("n_delta_surrogate: r + delta = " + std::to_string(r + delta) + " is not below 1");
  const std::vector<double> worst = worst_case_uncoupled_curve(op, n_cap);
  for (std::size_t n = 1; n <= n_cap; ++n)
    if (2.0 * worst[n] <= 2.0 * std::pow(r + delta, static_cast<double>(n))) return n;
  return std::nullopt;
}

double gamma_threshold(double delta, std::size_t n_delta, double radius) {
  if (n_delta == 0) throw DomainError("gamma_threshold: n_delta must be at least 1");
  const double tail = 2.0 * std::pow(radius + delta, static_cast<double>(n_delta));
  if (!(tail < 1.0))
    throw DomainError("gamma_threshold: 2 (r + delta)^n_delta = " + std::to_string(tail) + " is not below 1");
  const double gap = 1.0 - tail;
  return gap * gap / (48.0 * static_cast<double>(n_delta));
}

double bound_constant(const NonlinearKernelSpec& spec, std::size_t n_delta) {
  if (n_delta == 0) throw DomainError("bound_constant: n_delta must be at least 1");
  const double lambda1 = lipschitz_lambda(spec).value;
  double worst = lambda1;
  for (std::size_t i = 2; i <= n_delta; ++i) worst = std::max(worst, c_k_closed_form_bound(i) * lambda1);
  return 1.0 + worst;
}

double density_ratio_trajectory(const NonlinearKernelSpec& spec, const std::vector<std::size_t>& trajectory,
                                const Distribution& mu0) {
  if (mu0.size() != spec.size()) throw DimensionError("density_ratio_trajectory: initial law has wrong size");
  for (std::size_t x : trajectory)
    if (x >= spec.size()) throw DomainError("density_ratio_trajectory: state " + std::to_string(x) + " out of range");
  if (trajectory.size() < 2) return 1.0;
  const auto laws = flow(spec, mu0, trajectory.size() - 2);
  double rho = 1.0;
  for (std::size_t i = 0; i + 1 < trajectory.size(); ++i) {
    const std::size_t a = trajectory[i];
    const std::size_t b = trajectory[i + 1];
    const double p = evaluate(spec, laws[i])(a, b);
    if (!(p > 0.0))
      throw DomainError("density_ratio_trajectory: step " + std::to_string(i) + " (" + std::to_string(a) + " -> " +
                        std::to_string(b) + ") has zero probability");
    rho *= spec.base()(a, b) / p;
  }
  return rho;
}

std::vector<RateComparison> rate_comparison(const StochasticMatrix& base, std::size_t k_max) {
  if (k_max == 0) throw DomainError("rate_comparison: k_max must be at least 1");
  const double r = pair_radius(base);
  std::vector<RateComparison> rows;
  for (std::size_t k = 1; k <= k_max; ++k) {
    RateComparison row;
    row.k = k;
    row.radius_power = std::pow(r, static_cast<double>(k));
    row.one_minus_alpha = 1.0 - md_alpha_linear(base, k).value;
    row.radius_smaller = row.radius_power < row.one_minus_alpha;
    rows.push_back(row);
  }
  return rows;
}

ErgodicityReport verify_main_bound(const NonlinearKernelSpec& spec, double delta, const Distribution& mu0,
                                   const Distribution& nu0, std::size_t n_max, const VerificationConfig& config) {
  if (!spec.validation().valid()) throw ValidationError("verify_main_bound: " + spec.validation().summary());
  if (!(delta > 0.0)) throw DomainError("verify_main_bound: delta must be positive");
  if (config.k_max == 0) throw DomainError("verify_main_bound: k_max must be at least 1");
  check_same_size(spec, mu0, nu0, "verify_main_bound");

  ErgodicityReport rep;
  rep.delta = delta;
  rep.n_max = n_max;
  rep.config = config;
  rep.mu0 = mu0;
  rep.nu0 = nu0;

  const StochasticMatrix& base = spec.base();
  rep.alpha_nonlinear = md_alpha_nonlinear(spec, 1, config.sampler);
  rep.lambda1 = lipschitz_lambda(spec);
  for (std::size_t k = 1; k <= config.k_max; ++k) {
    rep.alpha_linear_k[k] = md_alpha_linear(base, k).value;
    rep.lambda_k_bounds[k] = c_k_closed_form_bound(k) * rep.lambda1.value;
    rep.lambda_k_estimates[k] = lipschitz_lambda_k_estimate(spec, k, config.sampler);
    if (k >= 2) rep.alpha_nonlinear_k[k] = md_alpha_nonlinear(spec, k, config.sampler);
  }
  try {
    rep.gamma = gamma_perturbation(spec);
  } catch (const AssumptionViolation&) {
    rep.gamma.reset();
  }
  rep.hypotheses.gamma_defined = rep.gamma.has_value();

  const CouplingOperator op = build_v_hat(base);
  rep.radius = spectral_radius(op.v_hat).radius;
  rep.comparisons = rate_comparison(base, config.k_max);

  rep.hypotheses.radius_condition = rep.radius + delta < 1.0;
  if (rep.hypotheses.radius_condition) rep.n_delta = n_delta_surrogate(base, delta, config.n_cap);
  rep.hypotheses.n_delta_found = rep.n_delta.has_value();
  rep.n_delta_used = rep.n_delta.value_or(1);
  if (rep.n_delta) {
    try {
      rep.gamma_threshold = gamma_threshold(delta, *rep.n_delta, rep.radius);
    } catch (const DomainError&) {
      rep.gamma_threshold.reset();
    }
  }
  rep.big_c = bound_constant(spec, rep.n_delta_used);
  rep.hypotheses.gamma_small = rep.gamma && rep.gamma_threshold && rep.gamma->value < *rep.gamma_threshold;
  rep.hypotheses.lambda_small = rep.big_c - 1.0 <= config.lambda_bar;

  const std::vector<double> tv = tv_decay(spec, mu0, nu0, n_max);
  const std::vector<double> unc = uncoupled_curve(op, mu0, nu0, n_max);
  const double alpha = std::clamp(rep.alpha_nonlinear.value, 0.0, 1.0);
  rep.bounds_hold = true;
  for (std::size_t n = 0; n <= n_max; ++n) {
    BoundCheck c;
    c.n = n;
    c.tv_exact = tv[n];
    c.bound_value = 2.0 * rep.big_c * std::pow(rep.radius + delta, static_cast<double>(n));
    c.uncoupled_exact = unc[n];
    c.butkovsky = butkovsky_bound(alpha, rep.lambda1.value, n);
    c.holds = c.tv_exact <= c.bound_value * (1.0 + config.slack);
    if (n >= rep.n_delta_used && !c.holds) rep.bounds_hold = false;
    rep.bound_checks.push_back(c);
  }
  for (std::size_t n = n_max + 1; n-- > 0;) {
    if (!rep.bound_checks[n].holds) break;
    rep.empirical_onset = n;
  }

  if (rep.gamma && n_max >= 1) {
    const auto mu_flow = flow(spec, mu0, n_max);
    const auto nu_flow = flow(spec, nu0, n_max);
    const Matrix pt = base.matrix().transpose();
    Vector mu_bar = mu0.probs();
    Vector nu_bar = nu0.probs();
    for (std::size_t n = 1; n <= n_max; ++n) {
      mu_bar = pt * mu_bar;
      nu_bar = pt * nu_bar;
      TriangleDiagnostic t;
      t.n = n;
      t.tv_mu = (mu_flow[n].probs() - mu_bar).cwiseAbs().sum();
      t.tv_nu = (nu_flow[n].probs() - nu_bar).cwiseAbs().sum();
      t.tv_linear = (mu_bar - nu_bar).cwiseAbs().sum();
      t.perturbation = perturbation_bound(rep.gamma->value, n);
      const double cap = t.perturbation.exact_form * (1.0 + config.slack) + 1e-15;
      t.holds = t.tv_mu <= cap && t.tv_nu <= cap;
      rep.triangle.push_back(t);
    }
  }

  rep.rate_sweep.resize(config.sweep_scales.size());
  auto sweep_one = [&](std::size_t i) {
    const double scale = config.sweep_scales[i];
    const NonlinearKernelSpec scaled = scale_perturbations(spec, scale);
    RateSweepEntry e;
    e.scale = scale;
    e.lambda = lipschitz_lambda(scaled).value;
    const std::vector<double> curve = tv_decay(scaled, mu0, nu0, n_max);
    if (n_max > 0 && curve.back() > 0.0) e.empirical_rate = std::log(curve.back()) / static_cast<double>(n_max);
    if (rep.radius > 0.0) e.log_radius = std::log(rep.radius);
    rep.rate_sweep[i] = e;
  };
  const std::size_t workers = std::clamp<std::size_t>(config.workers, 1, std::max<std::size_t>(1, config.sweep_scales.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < config.sweep_scales.size(); ++i) sweep_one(i);
  } else {
    // Entries are written by index, so the result does not depend on scheduling.
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < config.sweep_scales.size(); i += workers) sweep_one(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  rep.equality_case = rep.lambda1.value > 0.0 && std::abs(rep.lambda1.value - rep.alpha_nonlinear.value) <= 1e-12;
  return rep;
}

}  // namespace nmc
