#pragma once

#include <string>
#include <vector>

#include "nmc/kernels.hpp"
#include "nmc/linalg.hpp"

namespace nmc::examples {

/// Four-state chain; row 0 moves mass kappa * mu[0] from column 0 to
/// column 2. Valid for 0 <= kappa < 0.3.
NonlinearKernelSpec example1_spec(double kappa);

/// Six-state chain; row i moves kappa * mu[i] between the diagonal and
/// its right neighbour (left neighbour for the last row).
NonlinearKernelSpec example2_spec(double kappa);

/// Exact base matrices, entries given as tenths.
RationalMatrix example1_base_exact();
RationalMatrix example2_base_exact();

/// Reference 12x12 coupled-pair operator of example 1, in pair order
/// (0,1), (0,2), ..., (3,2).
RationalMatrix example1_v_hat_reference();

/// Pinned constants of the two examples.
struct ReferenceValues {
  std::string name;
  std::size_t states;
  std::size_t pair_states;
  double radius;
  double radius_tolerance;
  std::vector<double> one_minus_alpha;  // k = 1..5
  std::vector<double> radius_powers;    // reference r^k to four digits, k = 1..5
  double alpha_nonlinear;
};

const ReferenceValues& example1_reference();
const ReferenceValues& example2_reference();

}  // namespace nmc::examples
