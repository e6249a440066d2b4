#pragma once

#include <cstddef>
#include <initializer_list>

#include "nmc/linalg.hpp"
#include "nmc/rng.hpp"

namespace nmc {

/// Absolute tolerance for normalization and for the [0, 1] entry bounds of
/// probability vectors and stochastic matrices. Inputs outside it are
/// rejected, never renormalized.
inline constexpr double kProbabilityTolerance = 1e-12;

/// Probability vector over the states 0..n-1.
class Distribution {
 public:
  /// Empty distribution on zero states.
  Distribution() = default;

  /// Throws ValidationError unless every entry is in [0, 1] and the entries
  /// sum to one (both within kProbabilityTolerance).
  explicit Distribution(Vector probs);
  Distribution(std::initializer_list<double> probs);

  static Distribution uniform(std::size_t n);

  /// (1 - w) a + w b.
  static Distribution mixture(const Distribution& a, const Distribution& b, double w);

  std::size_t size() const { return static_cast<std::size_t>(probs_.size()); }
  double operator[](std::size_t i) const { return probs_[static_cast<Eigen::Index>(i)]; }
  const Vector& probs() const { return probs_; }

  friend bool operator==(const Distribution& a, const Distribution& b) {
    return a.probs_.size() == b.probs_.size() && a.probs_ == b.probs_;
  }

 private:
  Vector probs_;
};

/// Sum of absolute differences, in [0, 2]. This is twice the largest
/// difference of probabilities over events.
double tv_distance(const Distribution& a, const Distribution& b);

/// Unit mass at state i (0-based).
Distribution dirac(std::size_t i, std::size_t n);

/// Draw from the flat Dirichlet law on the n-point simplex (normalized
/// standard exponentials).
Distribution sample_simplex(std::size_t n, Rng& rng);

}  // namespace nmc
