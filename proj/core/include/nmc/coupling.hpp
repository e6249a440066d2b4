#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "nmc/kernels.hpp"
#include "nmc/linalg.hpp"
#include "nmc/measures.hpp"

namespace nmc {

/// Overlaps closer than this to 0 or 1 are treated as the degenerate cases
/// (floating-point path only; the rational path is exact).
inline constexpr double kDegenerateTolerance = 1e-12;

/// Ordered off-diagonal pairs (x1, x2), x1 != x2, in row-major lexicographic
/// order: (0,1), (0,2), ..., (0,n-1), (1,0), (1,2), ...
class PairIndex {
 public:
  explicit PairIndex(std::size_t n) : n_(n) {}

  std::size_t states() const { return n_; }
  std::size_t size() const { return n_ * (n_ - (n_ > 0 ? 1 : 0)); }
  std::size_t index(std::size_t x1, std::size_t x2) const;
  std::pair<std::size_t, std::size_t> pair(std::size_t index) const;

 private:
  std::size_t n_;
};

enum class Degeneracy { none, kappa_zero, kappa_one };

/// One step of the coupling from a pair of laws p1, p2 with overlap kappa.
///
/// Non-degenerate: phi3 = (p1 ^ p2) / kappa, phi_i = (p_i - p1 ^ p2) / (1 - kappa),
/// so kappa phi3 + (1 - kappa) phi_i = p_i. For kappa = 0, phi3 := p1; for
/// kappa = 1, phi1 := p1 and phi2 := p2. In both degenerate cases kappa is
/// snapped to exactly 0 or 1.
struct CouplingStep {
  Distribution phi1;
  Distribution phi2;
  Distribution phi3;
  double kappa;
  Degeneracy degenerate;
};

/// Coupled-chain state: residual copies (x1, x2), common copy x3, and the
/// flag x4 (true while uncoupled). The observable pair is (x1, x2) when the
/// flag is set and (x3, x3) once coupled.
struct ExtendedState {
  std::size_t x1 = 0;
  std::size_t x2 = 0;
  std::size_t x3 = 0;
  bool uncoupled = true;

  std::size_t observable1() const { return uncoupled ? x1 : x3; }
  std::size_t observable2() const { return uncoupled ? x2 : x3; }
};

/// Survival-weighted residual operator on off-diagonal pairs.
struct CouplingOperator {
  PairIndex index;
  /// v_hat(z, z') = survival(z) * residual_transition(z, full index of z').
  Matrix v_hat;
  /// 1 - kappa(z) per off-diagonal pair.
  Vector survival;
  /// Law phi1(y1) phi2(y2) of the next residual pair, over all n^2 ordered
  /// pairs with flat index y1 * n + y2 (diagonal targets included).
  Matrix residual_transition;
};

CouplingStep residual_densities(const StochasticMatrix& base, std::size_t x1, std::size_t x2);

/// Step-zero coupling of the initial laws mu0 and nu0.
CouplingStep initial_coupling(const Distribution& mu0, const Distribution& nu0);

CouplingOperator build_v_hat(const StochasticMatrix& base);

/// The same operator in exact arithmetic. `base` must be row-stochastic.
RationalMatrix build_v_hat_exact(const RationalMatrix& base);

/// P(coupling has not happened by step n)
///   = (1 - kappa_0) <psi_0, V^(n-1) s>   (n >= 1),   1 - kappa_0 (n = 0),
/// with psi_0 the step-zero residual pair law and s the survival vector.
double uncoupled_probability_exact(const StochasticMatrix& base, const Distribution& mu0,
                                   const Distribution& nu0, std::size_t n);

/// uncoupled_probability_exact for n = 0..n_max in one pass.
std::vector<double> uncoupled_curve(const CouplingOperator& op, const Distribution& mu0,
                                    const Distribution& nu0, std::size_t n_max);

/// max over Dirac pairs (x1 != x2) of the uncoupled probability, n = 0..n_max.
std::vector<double> worst_case_uncoupled_curve(const CouplingOperator& op, std::size_t n_max);

struct CouplingSimulation {
  std::size_t steps = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  /// Empirical P(flag still set at step k), k = 0..steps.
  std::vector<double> uncoupled_frequency;
  /// Empirical P(observables differ at step k), k = 0..steps.
  std::vector<double> mismatch_frequency;
  /// Empirical laws of the two observables at the final step.
  Distribution marginal1;
  Distribution marginal2;

  /// sqrt(p (1 - p) / trials) for the frequency p.
  double standard_error(double p) const;
};

/// Monte Carlo run of the extended chain. Trials are split evenly across
/// `workers` threads, worker w drawing from Rng::substream(seed, w); the
/// result depends only on (inputs, seed, workers).
CouplingSimulation simulate_coupled(const StochasticMatrix& base, const Distribution& mu0,
                                    const Distribution& nu0, std::size_t n, std::size_t trials,
                                    std::uint64_t seed, std::size_t workers = 1);

/// Exact law of observable `which` (1 or 2) at step n, obtained by
/// propagating the extended chain on {uncoupled pairs} u {coupled states}.
Distribution marginal_law_exact(const StochasticMatrix& base, const Distribution& mu0,
                                const Distribution& nu0, std::size_t n, int which);

}  // namespace nmc
