#include "nmc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "nmc/errors.hpp"

namespace nmc {
namespace {

void check_square_finite(const Matrix& m, const char* where) {
  if (m.rows() != m.cols())
    throw DimensionError(std::string(where) + ": matrix must be square, got " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  if (!m.allFinite()) throw NumericalError(std::string(where) + ": matrix has NaN or Inf entries");
}

bool nonnegative(const Matrix& m) { return m.size() == 0 || m.minCoeff() >= 0.0; }

double inf_norm(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff(); }

void sort_spectrum(std::vector<std::complex<double>>& ev) {
  std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
}

struct PowerState {
  bool converged = false;
  double estimate = 0.0;
  double residual = 0.0;
  std::size_t iterations = 0;
  Vector v;
};

PowerState power_iterate(const Matrix& m, double tol, const PowerIterationConfig& config) {
  PowerState st;
  st.v = Vector::Ones(m.rows());
  double previous = -1.0;
  std::size_t stable = 0;
  for (std::size_t it = 1; it <= config.max_iterations; ++it) {
    Vector w = m * st.v;
    const double norm = w.cwiseAbs().maxCoeff();
    st.iterations = it;
    if (norm == 0.0) {
      // Nonnegative m with m^it * 1 = 0 is nilpotent.
      st.converged = true;
      st.estimate = 0.0;
      st.residual = 0.0;
      st.v = Vector::Zero(m.rows());
      return st;
    }
    st.v = w / norm;
    st.estimate = norm;
    if (std::abs(norm - previous) <= tol * std::max(1.0, norm)) {
      if (++stable >= config.stable_window) {
        st.residual = (m * st.v - norm * st.v).cwiseAbs().maxCoeff();
        st.converged = st.residual <= 100.0 * tol * std::max(1.0, norm);
        return st;
      }
    } else {
      stable = 0;
    }
    previous = norm;
  }
  st.residual = (m * st.v - st.estimate * st.v).cwiseAbs().maxCoeff();
  return st;
}

}  // namespace

const char* to_string(SpectrumMethod m) {
  switch (m) {
    case SpectrumMethod::power_iteration: return "power_iteration";
    case SpectrumMethod::dense_eigensolve: return "dense_eigensolve";
    case SpectrumMethod::gelfand_fallback: return "gelfand_fallback";
  }
  return "unknown";
}

SpectrumResult eigenvalues(const Matrix& m) {
  check_square_finite(m, "eigenvalues");
  SpectrumResult result;
  result.method = SpectrumMethod::dense_eigensolve;
  if (m.rows() == 0) return result;
  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    // QR iteration did not converge; keep only a Gelfand estimate of the radius.
    result.method = SpectrumMethod::gelfand_fallback;
    result.radius = gelfand_sequence(m, 1024).back();
    return result;
  }
  const auto& values = solver.eigenvalues();
  result.eigenvalues.assign(values.data(), values.data() + values.size());
  sort_spectrum(result.eigenvalues);
  result.radius = std::abs(result.eigenvalues.front());
  return result;
}

SpectrumResult spectral_radius(const Matrix& m, double tol, const PowerIterationConfig& config) {
  check_square_finite(m, "spectral_radius");
  if (!(tol > 0.0)) throw DomainError("spectral_radius: tolerance must be positive");
  if (m.rows() == 0) return SpectrumResult{};
  if (nonnegative(m)) {
    PowerState st = power_iterate(m, tol, config);
    if (st.converged) {
      SpectrumResult result;
      result.radius = st.estimate;
      result.method = SpectrumMethod::power_iteration;
      result.residual = st.residual;
      result.iterations = st.iterations;
      return result;
    }
  }
  return eigenvalues(m);
}

std::vector<double> gelfand_sequence(const Matrix& m, std::size_t max_n) {
  check_square_finite(m, "gelfand_sequence");
  if (max_n == 0) throw DomainError("gelfand_sequence: max_n must be at least 1");
  std::vector<double> seq;
  seq.reserve(max_n);
  if (m.rows() == 0) {
    seq.assign(max_n, 0.0);
    return seq;
  }
  // m^k = exp(log_scale[k]) * unit[k] with |unit[k]|_inf = 1.
  std::vector<Matrix> unit(max_n + 1);
  std::vector<double> log_scale(max_n + 1, 0.0);
  bool vanished = false;
  for (std::size_t k = 1; k <= max_n; ++k) {
    if (vanished) {
      seq.push_back(0.0);
      continue;
    }
    Matrix raw;
    double carried = 0.0;
    if (k == 1) {
      raw = m;
    } else if ((k & (k - 1)) == 0) {
      raw = unit[k / 2] * unit[k / 2];
      carried = 2.0 * log_scale[k / 2];
    } else {
      raw = unit[k - 1] * m;
      carried = log_scale[k - 1];
    }
    if (!raw.allFinite()) throw NumericalError("gelfand_sequence: non-finite power at k=" + std::to_string(k));
    const double norm = inf_norm(raw);
    if (norm == 0.0) {
      vanished = true;
      seq.push_back(0.0);
      continue;
    }
    unit[k] = raw / norm;
    log_scale[k] = carried + std::log(norm);
    seq.push_back(std::exp(log_scale[k] / static_cast<double>(k)));
    // Only the previous power and the powers of two are needed later.
    if (k >= 2 && ((k - 1) & (k - 2)) != 0) unit[k - 1].resize(0, 0);
  }
  return seq;
}

std::optional<FrobeniusConstant> frobenius_constant(const Matrix& m) {
  check_square_finite(m, "frobenius_constant");
  if (!nonnegative(m)) throw DomainError("frobenius_constant: matrix has negative entries");
  if (m.rows() == 0) return std::nullopt;

  constexpr double kVectorTol = 1e-15;
  constexpr double kPositivity = 1e-12;
  constexpr std::size_t kBudget = 100000;
  Vector v = Vector::Ones(m.rows());
  double value = 0.0;
  for (std::size_t it = 0; it < kBudget; ++it) {
    Vector w = m * v;
    const double norm = w.maxCoeff();
    if (norm == 0.0) return std::nullopt;
    w /= norm;
    const double change = (w - v).cwiseAbs().maxCoeff();
    v = std::move(w);
    value = norm;
    if (change <= kVectorTol) {
      if (v.minCoeff() <= kPositivity) return std::nullopt;
      return FrobeniusConstant{v, value, v.maxCoeff() / v.minCoeff()};
    }
  }
  return std::nullopt;
}

}  // namespace nmc
