#include "nmc/measures.hpp"

#include <cmath>
#include <string>

#include "nmc/errors.hpp"

namespace nmc {

Distribution::Distribution(Vector probs) : probs_(std::move(probs)) {
  if (probs_.size() == 0) throw DimensionError("distribution over an empty state space");
  double total = 0.0;
  for (Eigen::Index i = 0; i < probs_.size(); ++i) {
    double p = probs_[i];
    if (!std::isfinite(p) || p < -kProbabilityTolerance || p > 1.0 + kProbabilityTolerance)
      throw ValidationError("probability entry " + std::to_string(i) + " = " + std::to_string(p) +
                            " outside [0,1]");
    total += p;
  }
  if (std::abs(total - 1.0) > kProbabilityTolerance)
    throw ValidationError("probabilities sum to " + std::to_string(total) + ", not 1");
}

Distribution::Distribution(std::initializer_list<double> probs)
    : Distribution([&] {
        Vector v(static_cast<Eigen::Index>(probs.size()));
        Eigen::Index i = 0;
        for (double p : probs) v[i++] = p;
        return v;
      }()) {}

Distribution Distribution::uniform(std::size_t n) {
  if (n == 0) throw DimensionError("uniform distribution needs at least one state");
  return Distribution(Vector::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n)));
}

Distribution Distribution::mixture(const Distribution& a, const Distribution& b, double w) {
  if (a.size() != b.size()) throw DimensionError("mixture of distributions of different length");
  return Distribution((1.0 - w) * a.probs_ + w * b.probs_);
}

double tv_distance(const Distribution& a, const Distribution& b) {
  if (a.size() != b.size())
    throw DimensionError("tv_distance: lengths " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()));
  return (a.probs() - b.probs()).cwiseAbs().sum();
}

Distribution dirac(std::size_t i, std::size_t n) {
  if (i >= n)
    throw DomainError("dirac: state " + std::to_string(i) + " out of range for " + std::to_string(n) +
                      " states");
  Vector v = Vector::Zero(static_cast<Eigen::Index>(n));
  v[static_cast<Eigen::Index>(i)] = 1.0;
  return Distribution(std::move(v));
}

Distribution sample_simplex(std::size_t n, Rng& rng) {
  if (n == 0) throw DimensionError("sample_simplex: empty state space");
  Vector v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.exponential();
  v /= v.sum();
  return Distribution(std::move(v));
}

}  // namespace nmc
