#include "nmc/kernels.hpp"

#include <cmath>
#include <sstream>

#include "nmc/errors.hpp"

namespace nmc {
namespace {

Eigen::Index ix(std::size_t i) { return static_cast<Eigen::Index>(i); }

void check_row_stochastic(const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double total = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      double p = m(i, j);
      if (!std::isfinite(p) || p < -kProbabilityTolerance || p > 1.0 + kProbabilityTolerance) {
        std::ostringstream os;
        os << "entry (" << i << "," << j << ") = " << p << " outside [0,1]";
        throw ValidationError(os.str());
      }
      total += p;
    }
    if (std::abs(total - 1.0) > kProbabilityTolerance) {
      std::ostringstream os;
      os.precision(17);
      os << "row " << i << " sums to " << total << ", not 1";
      throw ValidationError(os.str());
    }
  }
}

}  // namespace

StochasticMatrix::StochasticMatrix(Matrix entries) : m_(std::move(entries)) {
  if (m_.rows() != m_.cols())
    throw DimensionError("stochastic matrix must be square, got " + std::to_string(m_.rows()) + "x" +
                         std::to_string(m_.cols()));
  if (m_.rows() == 0) throw DimensionError("stochastic matrix over an empty state space");
  check_row_stochastic(m_);
}

StochasticMatrix StochasticMatrix::identity(std::size_t n) {
  return StochasticMatrix(Matrix::Identity(ix(n), ix(n)));
}

Distribution StochasticMatrix::row(std::size_t i) const {
  if (i >= size()) throw DomainError("row " + std::to_string(i) + " out of range");
  return Distribution(m_.row(ix(i)).transpose());
}

std::string ValidationIssue::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (kind == Kind::row_sum) {
    os << "perturbation coefficients for row " << row << ", measure_index " << measure_index
       << " sum to " << value << " over columns (must be 0)";
  } else {
    os << "entry (" << row << "," << col << ") equals " << value << " at vertex measure delta_"
       << measure_index << " (must lie in [0,1])";
  }
  return os.str();
}

std::string ValidationReport::summary() const {
  std::string out;
  for (const auto& issue : issues) {
    if (!out.empty()) out += "; ";
    out += issue.describe();
  }
  return out;
}

NonlinearKernelSpec::NonlinearKernelSpec(StochasticMatrix base,
                                         std::vector<PerturbationTerm> perturbations,
                                         std::map<std::string, double> parameters)
    : base_(std::move(base)), perturbations_(std::move(perturbations)), parameters_(std::move(parameters)) {
  const std::size_t n = base_.size();
  for (std::size_t t = 0; t < perturbations_.size(); ++t) {
    const auto& term = perturbations_[t];
    if (term.row >= n || term.col >= n || term.measure_index >= n)
      throw DomainError("perturbation term " + std::to_string(t) + " indexes outside " +
                        std::to_string(n) + " states");
    if (!std::isfinite(term.coefficient))
      throw NumericalError("perturbation term " + std::to_string(t) + " has a non-finite coefficient");
  }
  validation_ = validate_spec(*this);
}

bool NonlinearKernelSpec::is_linear() const {
  for (const auto& t : perturbations_)
    if (t.coefficient != 0.0) return false;
  return true;
}

Matrix NonlinearKernelSpec::vertex_shift(std::size_t m) const {
  const auto n = ix(size());
  Matrix shift = Matrix::Zero(n, n);
  for (const auto& t : perturbations_)
    if (t.measure_index == m) shift(ix(t.row), ix(t.col)) += t.coefficient;
  return shift;
}

ValidationReport validate_spec(const NonlinearKernelSpec& spec) {
  ValidationReport report;
  const std::size_t n = spec.size();

  // Coefficient sums per (row, measure_index).
  Matrix sums = Matrix::Zero(ix(n), ix(n));
  Matrix touched = Matrix::Zero(ix(n), ix(n));
  for (const auto& t : spec.perturbations()) {
    sums(ix(t.row), ix(t.measure_index)) += t.coefficient;
    touched(ix(t.row), ix(t.measure_index)) = 1.0;
  }
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t m = 0; m < n; ++m)
      if (touched(ix(r), ix(m)) != 0.0 && std::abs(sums(ix(r), ix(m))) > kProbabilityTolerance)
        report.issues.push_back({ValidationIssue::Kind::row_sum, r, 0, m, sums(ix(r), ix(m))});

  // Affine entries reach their extremes over the simplex at vertices.
  for (std::size_t m = 0; m < n; ++m) {
    Matrix at_vertex = spec.base().matrix() + spec.vertex_shift(m);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        double p = at_vertex(ix(r), ix(c));
        if (p < -kProbabilityTolerance || p > 1.0 + kProbabilityTolerance)
          report.issues.push_back({ValidationIssue::Kind::vertex_infeasible, r, c, m, p});
      }
  }
  return report;
}

StochasticMatrix evaluate(const NonlinearKernelSpec& spec, const Distribution& mu) {
  if (mu.size() != spec.size())
    throw DimensionError("evaluate: measure of length " + std::to_string(mu.size()) + " for " +
                         std::to_string(spec.size()) + " states");
  if (!spec.validation().valid()) throw ValidationError("invalid kernel spec: " + spec.validation().summary());
  Matrix p = spec.base().matrix();
  for (const auto& t : spec.perturbations()) p(ix(t.row), ix(t.col)) += t.coefficient * mu[t.measure_index];
  return StochasticMatrix(std::move(p));
}

std::vector<Distribution> flow(const NonlinearKernelSpec& spec, const Distribution& mu0, std::size_t steps) {
  if (mu0.size() != spec.size()) throw DimensionError("flow: initial measure has wrong length");
  std::vector<Distribution> out;
  out.reserve(steps + 1);
  out.push_back(mu0);
  for (std::size_t k = 0; k < steps; ++k) {
    const Distribution& mu = out.back();
    Vector next = (mu.probs().transpose() * evaluate(spec, mu).matrix()).transpose();
    out.emplace_back(std::move(next));
  }
  return out;
}

Matrix k_step_matrix(const NonlinearKernelSpec& spec, const Distribution& mu0, std::size_t k) {
  const auto path = flow(spec, mu0, k == 0 ? 0 : k - 1);
  Matrix product = Matrix::Identity(ix(spec.size()), ix(spec.size()));
  for (std::size_t j = 0; j < k; ++j) product = product * evaluate(spec, path[j]).matrix();
  return product;
}

Distribution k_step_kernel(const NonlinearKernelSpec& spec, const Distribution& mu0, std::size_t x,
                           std::size_t k) {
  if (x >= spec.size()) throw DomainError("k_step_kernel: state " + std::to_string(x) + " out of range");
  if (mu0.size() != spec.size()) throw DimensionError("k_step_kernel: initial measure has wrong length");
  // Propagate the single row instead of the whole product.
  const auto path = flow(spec, mu0, k == 0 ? 0 : k - 1);
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(ix(spec.size()));
  row[ix(x)] = 1.0;
  for (std::size_t j = 0; j < k; ++j) row = row * evaluate(spec, path[j]).matrix();
  return Distribution(row.transpose());
}

StochasticMatrix linear_power(const StochasticMatrix& base, std::size_t k) {
  if (k == 0) throw DomainError("linear_power: k must be at least 1");
  Matrix result = base.matrix();
  for (std::size_t j = 1; j < k; ++j) result = result * base.matrix();
  return StochasticMatrix(std::move(result));
}

NonlinearKernelSpec scale_perturbations(const NonlinearKernelSpec& spec, double factor) {
  auto terms = spec.perturbations();
  for (auto& t : terms) t.coefficient *= factor;
  return NonlinearKernelSpec(spec.base(), std::move(terms), spec.parameters());
}

}  // namespace nmc
