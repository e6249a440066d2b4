#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "nmc/linalg.hpp"
#include "nmc/measures.hpp"

namespace nmc {

/// Row-stochastic n x n matrix; entry (i, j) is the one-step probability i -> j.
class StochasticMatrix {
 public:
  /// Throws DimensionError for non-square input and ValidationError for an
  /// entry outside [0, 1] or a row not summing to one.
  explicit StochasticMatrix(Matrix entries);

  static StochasticMatrix identity(std::size_t n);

  std::size_t size() const { return static_cast<std::size_t>(m_.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  const Matrix& matrix() const { return m_; }
  Distribution row(std::size_t i) const;

 private:
  Matrix m_;
};

/// One affine term of a measure-dependent kernel:
/// P_mu[row, col] += coefficient * mu[measure_index].
struct PerturbationTerm {
  std::size_t row = 0;
  std::size_t col = 0;
  std::size_t measure_index = 0;
  double coefficient = 0.0;
};

struct ValidationIssue {
  enum class Kind {
    /// Coefficients of one (row, measure_index) do not sum to zero over columns.
    row_sum,
    /// At the vertex measure delta_{measure_index} entry (row, col) leaves [0, 1].
    vertex_infeasible,
  };
  Kind kind;
  std::size_t row;
  std::size_t col;  // unused for row_sum
  std::size_t measure_index;
  double value;  // coefficient sum, or the offending entry

  std::string describe() const;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool valid() const { return issues.empty(); }
  std::string summary() const;
};

/// Base stochastic matrix plus terms affine in the current marginal law.
///
/// The constructor only checks shapes and index ranges; invariant checks are
/// reported by validate_spec, and evaluate refuses specs that fail them.
class NonlinearKernelSpec {
 public:
  NonlinearKernelSpec(StochasticMatrix base, std::vector<PerturbationTerm> perturbations,
                      std::map<std::string, double> parameters = {});

  std::size_t size() const { return base_.size(); }
  const StochasticMatrix& base() const { return base_; }
  const std::vector<PerturbationTerm>& perturbations() const { return perturbations_; }
  const std::map<std::string, double>& parameters() const { return parameters_; }
  const ValidationReport& validation() const { return validation_; }

  /// True when no term has a non-zero coefficient.
  bool is_linear() const;

  /// Perturbation contribution to the kernel at the vertex measure delta_m.
  Matrix vertex_shift(std::size_t m) const;

 private:
  StochasticMatrix base_;
  std::vector<PerturbationTerm> perturbations_;
  std::map<std::string, double> parameters_;
  ValidationReport validation_;
};

ValidationReport validate_spec(const NonlinearKernelSpec& spec);

/// P_mu. Throws ValidationError if the spec is invalid and DimensionError on
/// a length mismatch.
StochasticMatrix evaluate(const NonlinearKernelSpec& spec, const Distribution& mu);

/// mu_0, ..., mu_steps with mu_k = mu_{k-1} P_{mu_{k-1}}.
std::vector<Distribution> flow(const NonlinearKernelSpec& spec, const Distribution& mu0,
                               std::size_t steps);

/// Product P_{mu_0} P_{mu_1} ... P_{mu_{k-1}} along the flow started at mu0;
/// row x is the k-step kernel from x. Identity for k = 0.
Matrix k_step_matrix(const NonlinearKernelSpec& spec, const Distribution& mu0, std::size_t k);

/// Law of X_k started at delta_x while the marginal flow starts at mu0.
Distribution k_step_kernel(const NonlinearKernelSpec& spec, const Distribution& mu0, std::size_t x,
                           std::size_t k);

/// base^k for k >= 1.
StochasticMatrix linear_power(const StochasticMatrix& base, std::size_t k);

/// Same spec with every coefficient multiplied by `factor`.
NonlinearKernelSpec scale_perturbations(const NonlinearKernelSpec& spec, double factor);

}  // namespace nmc
