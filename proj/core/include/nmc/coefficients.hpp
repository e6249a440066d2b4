#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "nmc/kernels.hpp"
#include "nmc/linalg.hpp"
#include "nmc/measures.hpp"

namespace nmc {

/// Controls the measure set used for sampled extremum searches.
struct SamplerConfig {
  std::size_t samples = 500;  // Dirichlet draws added after vertices and midpoints
  std::uint64_t seed = 1;
  bool operator==(const SamplerConfig&) const = default;
};

/// Argument tuple at which an extremum was found. `states` holds the state
/// indices (pair of states, or (x, y, m) for gamma), `measures` the measure
/// arguments when the coefficient depends on them.
struct Witness {
  std::vector<std::size_t> states;
  std::vector<Distribution> measures;
  bool operator==(const Witness&) const = default;
};

struct CoefficientCertificate {
  double value = 0.0;
  Witness achieved_at;
  bool exact = false;
  std::size_t sample_count = 0;  // number of measure candidates examined (0 when exact by enumeration)
  bool operator==(const CoefficientCertificate&) const = default;
};

/// Overlap sum_j min(base[x1, j], base[x2, j]).
double dobrushin_kappa(const StochasticMatrix& base, std::size_t x1, std::size_t x2);

/// Markov-Dobrushin coefficient of base^k: minimal overlap over ordered
/// pairs x1 != x2. Equals 1 on a one-state space.
CoefficientCertificate md_alpha_linear(const StochasticMatrix& base, std::size_t k);

/// md_alpha_linear in exact arithmetic; `base` must be square, k >= 1.
Rational md_alpha_linear_exact(const RationalMatrix& base, std::size_t k);

/// Estimate of the nonlinear coefficient alpha_k (minimal overlap of k-step
/// kernels over state pairs and measure pairs).
///
/// For k = 1 each overlap term is the minimum of two affine functions of
/// (mu, nu), so the overlap is concave and its minimum over the product of
/// simplices sits at a pair of vertices: enumeration is exact. For k >= 2 the
/// minimum is taken over all ordered pairs from the candidate set (vertices,
/// vertex midpoints, Dirichlet draws) and is an upper estimate.
CoefficientCertificate md_alpha_nonlinear(const NonlinearKernelSpec& spec, std::size_t k,
                                          const SamplerConfig& sampler);

/// Exact Lipschitz constant of mu -> P_mu(x, .) in total variation,
/// attained on differences of Dirac measures.
CoefficientCertificate lipschitz_lambda(const NonlinearKernelSpec& spec);

/// Lower estimate of lambda_k: largest ratio
/// |P^(k)_mu(x,.) - P^(k)_nu(x,.)|_TV / |mu - nu|_TV over candidate pairs.
CoefficientCertificate lipschitz_lambda_k_estimate(const NonlinearKernelSpec& spec, std::size_t k,
                                                   const SamplerConfig& sampler);

/// Upper bound constant C_k = (5/3) 4^k - 2/3 with lambda_k <= C_k lambda_1.
double c_k_closed_form_bound(std::size_t k);

/// Solution of C_{k+1} = 4 C_k + 2 from C_1 = 1, i.e. (5/3) 4^(k-1) - 2/3.
double c_k_recursion_bound(std::size_t k);

/// Smallest gamma with base[x,y] / P_mu[x,y] <= 1 + gamma for all x, y, mu.
/// Throws AssumptionViolation when base and P_mu are not mutually
/// absolutely continuous for some vertex measure.
CoefficientCertificate gamma_perturbation(const NonlinearKernelSpec& spec);

/// Vertices, then midpoints of vertex pairs (lexicographic), then
/// `sampler.samples` Dirichlet draws from Rng(sampler.seed).
std::vector<Distribution> measure_candidates(std::size_t n, const SamplerConfig& sampler);

}  // namespace nmc
