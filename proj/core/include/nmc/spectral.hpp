#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "nmc/linalg.hpp"

namespace nmc {

enum class SpectrumMethod { power_iteration, dense_eigensolve, gelfand_fallback };

const char* to_string(SpectrumMethod m);

struct SpectrumResult {
  double radius = 0.0;
  /// Full spectrum when computed densely; empty for power iteration. Sorted
  /// by decreasing modulus, then decreasing real part, then imaginary part.
  std::vector<std::complex<double>> eigenvalues;
  SpectrumMethod method = SpectrumMethod::power_iteration;
  /// Power iteration: |M v - r v|_inf for the final max-normalized v.
  /// Dense solve: |max modulus - radius| (zero).
  double residual = 0.0;
  std::size_t iterations = 0;
};

struct PowerIterationConfig {
  std::size_t max_iterations = 100000;
  std::size_t stable_window = 10;
};

/// Spectral radius. Nonnegative matrices go through power iteration from the
/// all-ones vector with max-norm normalization; convergence requires the
/// estimate to move by at most `tol` over `stable_window` consecutive steps
/// and a small eigen-residual. Anything else (negative entries, oscillating
/// or slowly converging iterates) falls back to the dense eigensolver.
/// Throws DimensionError for non-square input and NumericalError for
/// non-finite entries.
SpectrumResult spectral_radius(const Matrix& m, double tol = 1e-12,
                               const PowerIterationConfig& config = {});

/// Complete eigenvalue multiset via Hessenberg reduction and shifted QR.
SpectrumResult eigenvalues(const Matrix& m);

/// |m^k|_inf^(1/k), k = 1..max_n, with powers of two formed by squaring.
/// Powers are carried with a separate log-scale so they never overflow.
std::vector<double> gelfand_sequence(const Matrix& m, std::size_t max_n);

struct FrobeniusConstant {
  Vector eigenvector;  // positive, max entry 1
  double eigenvalue = 0.0;
  double constant = 1.0;  // max e / min e
};

/// Positive dominant eigenvector of a nonnegative matrix and the ratio
/// max e / min e. Returns nullopt when power iteration does not settle on a
/// vector whose entries all exceed 1e-12 (reducible or degenerate cases).
/// Throws DomainError for negative entries.
std::optional<FrobeniusConstant> frobenius_constant(const Matrix& m);

}  // namespace nmc
