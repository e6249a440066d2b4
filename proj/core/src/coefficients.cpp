#include "nmc/coefficients.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "nmc/errors.hpp"

namespace nmc {
namespace {

Eigen::Index ix(std::size_t i) { return static_cast<Eigen::Index>(i); }

double row_overlap(const Matrix& a, std::size_t ra, const Matrix& b, std::size_t rb) {
  return a.row(ix(ra)).cwiseMin(b.row(ix(rb))).sum();
}

void check_state(const StochasticMatrix& m, std::size_t x) {
  if (x >= m.size())
    throw DomainError("state " + std::to_string(x) + " out of range for " + std::to_string(m.size()) +
                      " states");
}

std::vector<Matrix> k_step_matrices(const NonlinearKernelSpec& spec, const std::vector<Distribution>& measures,
                                    std::size_t k) {
  std::vector<Matrix> out;
  out.reserve(measures.size());
  for (const auto& mu : measures) out.push_back(k_step_matrix(spec, mu, k));
  return out;
}

}  // namespace

double dobrushin_kappa(const StochasticMatrix& base, std::size_t x1, std::size_t x2) {
  check_state(base, x1);
  check_state(base, x2);
  return row_overlap(base.matrix(), x1, base.matrix(), x2);
}

CoefficientCertificate md_alpha_linear(const StochasticMatrix& base, std::size_t k) {
  const StochasticMatrix power = linear_power(base, k);
  const std::size_t n = base.size();
  CoefficientCertificate cert;
  cert.exact = true;
  cert.value = 1.0;
  bool found = false;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      double v = row_overlap(power.matrix(), a, power.matrix(), b);
      if (!found || v < cert.value) {
        cert.value = v;
        cert.achieved_at.states = {a, b};
        found = true;
      }
    }
  return cert;
}

Rational md_alpha_linear_exact(const RationalMatrix& base, std::size_t k) {
  if (base.rows() != base.cols()) throw DimensionError("md_alpha_linear_exact: matrix must be square");
  if (k == 0) throw DomainError("md_alpha_linear_exact: k must be at least 1");
  RationalMatrix power = base;
  for (std::size_t i = 1; i < k; ++i) power = power * base;
  const Eigen::Index n = base.rows();
  Rational best = 1;
  bool found = false;
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      if (a == b) continue;
      Rational v = 0;
      for (Eigen::Index j = 0; j < n; ++j) v += min(power(a, j), power(b, j));
      if (!found || v < best) {
        best = v;
        found = true;
      }
    }
  return best;
}

std::vector<Distribution> measure_candidates(std::size_t n, const SamplerConfig& sampler) {
  std::vector<Distribution> out;
  out.reserve(n + n * (n - 1) / 2 + sampler.samples);
  for (std::size_t i = 0; i < n; ++i) out.push_back(dirac(i, n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out.push_back(Distribution::mixture(dirac(i, n), dirac(j, n), 0.5));
  Rng rng(sampler.seed);
  for (std::size_t s = 0; s < sampler.samples; ++s) out.push_back(sample_simplex(n, rng));
  return out;
}

CoefficientCertificate md_alpha_nonlinear(const NonlinearKernelSpec& spec, std::size_t k,
                                          const SamplerConfig& sampler) {
  if (k == 0) throw DomainError("md_alpha_nonlinear: k must be at least 1");
  const std::size_t n = spec.size();
  const bool exact = k == 1;
  const auto measures = exact ? measure_candidates(n, SamplerConfig{0, sampler.seed})
                              : measure_candidates(n, sampler);
  // For k = 1 only the vertices are needed.
  const std::size_t used = exact ? n : measures.size();
  const auto kernels = k_step_matrices(spec, {measures.begin(), measures.begin() + static_cast<std::ptrdiff_t>(used)}, k);

  CoefficientCertificate cert;
  cert.exact = exact;
  cert.sample_count = exact ? 0 : used;
  cert.value = std::numeric_limits<double>::infinity();
  std::size_t best_mu = 0, best_nu = 0;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      for (std::size_t i = 0; i < used; ++i)
        for (std::size_t j = 0; j < used; ++j) {
          double v = row_overlap(kernels[i], x, kernels[j], y);
          if (v < cert.value) {
            cert.value = v;
            cert.achieved_at.states = {x, y};
            best_mu = i;
            best_nu = j;
          }
        }
  cert.achieved_at.measures = {measures[best_mu], measures[best_nu]};
  return cert;
}

CoefficientCertificate lipschitz_lambda(const NonlinearKernelSpec& spec) {
  const std::size_t n = spec.size();
  std::vector<Matrix> shifts;
  shifts.reserve(n);
  for (std::size_t m = 0; m < n; ++m) shifts.push_back(spec.vertex_shift(m));

  CoefficientCertificate cert;
  cert.exact = true;
  cert.value = 0.0;
  cert.achieved_at.states = {0};
  if (n > 1) cert.achieved_at.measures = {dirac(0, n), dirac(1, n)};
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        if (a == b) continue;
        // |P_{delta_a}(x,.) - P_{delta_b}(x,.)|_TV / |delta_a - delta_b|_TV
        double v = 0.5 * (shifts[a].row(ix(x)) - shifts[b].row(ix(x))).cwiseAbs().sum();
        if (v > cert.value) {
          cert.value = v;
          cert.achieved_at.states = {x};
          cert.achieved_at.measures = {dirac(a, n), dirac(b, n)};
        }
      }
  return cert;
}

CoefficientCertificate lipschitz_lambda_k_estimate(const NonlinearKernelSpec& spec, std::size_t k,
                                                   const SamplerConfig& sampler) {
  if (k == 0) throw DomainError("lipschitz_lambda_k_estimate: k must be at least 1");
  const std::size_t n = spec.size();
  const auto measures = measure_candidates(n, sampler);
  const auto kernels = k_step_matrices(spec, measures, k);

  CoefficientCertificate cert;
  cert.exact = false;
  cert.sample_count = measures.size();
  cert.value = 0.0;
  cert.achieved_at.states = {0};
  for (std::size_t i = 0; i < measures.size(); ++i)
    for (std::size_t j = 0; j < measures.size(); ++j) {
      if (i == j) continue;
      const double denom = tv_distance(measures[i], measures[j]);
      if (denom <= 1e-9) continue;
      for (std::size_t x = 0; x < n; ++x) {
        double v = (kernels[i].row(ix(x)) - kernels[j].row(ix(x))).cwiseAbs().sum() / denom;
        if (v > cert.value) {
          cert.value = v;
          cert.achieved_at.states = {x};
          cert.achieved_at.measures = {measures[i], measures[j]};
        }
      }
    }
  if (cert.achieved_at.measures.empty() && measures.size() > 1)
    cert.achieved_at.measures = {measures[0], measures[1]};
  return cert;
}

double c_k_closed_form_bound(std::size_t k) {
  if (k == 0) throw DomainError("c_k_closed_form_bound: k must be at least 1");
  return 5.0 / 3.0 * std::pow(4.0, static_cast<double>(k)) - 2.0 / 3.0;
}

double c_k_recursion_bound(std::size_t k) {
  if (k == 0) throw DomainError("c_k_recursion_bound: k must be at least 1");
  return 5.0 / 3.0 * std::pow(4.0, static_cast<double>(k - 1)) - 2.0 / 3.0;
}

CoefficientCertificate gamma_perturbation(const NonlinearKernelSpec& spec) {
  const std::size_t n = spec.size();
  const Matrix& base = spec.base().matrix();
  std::vector<Matrix> vertex_kernels;
  vertex_kernels.reserve(n);
  for (std::size_t m = 0; m < n; ++m) vertex_kernels.push_back(base + spec.vertex_shift(m));

  CoefficientCertificate cert;
  cert.exact = true;
  cert.value = 0.0;
  cert.achieved_at.states = {0, 0, 0};
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      const double b = base(ix(x), ix(y));
      for (std::size_t m = 0; m < n; ++m) {
        const double p = vertex_kernels[m](ix(x), ix(y));
        if (b == 0.0) {
          if (p != 0.0)
            throw AssumptionViolation("entry (" + std::to_string(x) + "," + std::to_string(y) +
                                      ") is zero in the base kernel but positive at vertex delta_" +
                                      std::to_string(m));
          continue;
        }
        if (p <= 0.0)
          throw AssumptionViolation("entry (" + std::to_string(x) + "," + std::to_string(y) +
                                    ") is positive in the base kernel but vanishes at vertex delta_" +
                                    std::to_string(m));
        const double ratio = b / p - 1.0;
        if (ratio > cert.value) {
          cert.value = ratio;
          cert.achieved_at.states = {x, y, m};
        }
      }
    }
  return cert;
}

}  // namespace nmc
