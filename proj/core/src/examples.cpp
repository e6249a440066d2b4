#include "nmc/examples.hpp"

#include <cmath>

namespace nmc::examples {
namespace {

RationalMatrix tenths(std::initializer_list<std::initializer_list<int>> rows) {
  RationalMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (int v : row) m(i, j++) = Rational(v, 10);
    ++i;
  }
  return m;
}

}  // namespace

RationalMatrix example1_base_exact() {
  return tenths({{4, 2, 2, 2}, {3, 4, 2, 1}, {2, 2, 4, 2}, {2, 1, 2, 5}});
}

RationalMatrix example2_base_exact() {
  return tenths({{4, 2, 1, 1, 1, 1},
                 {2, 3, 2, 1, 1, 1},
                 {1, 2, 3, 2, 1, 1},
                 {1, 1, 2, 3, 2, 1},
                 {1, 1, 1, 2, 3, 2},
                 {1, 1, 1, 1, 2, 4}});
}

NonlinearKernelSpec example1_spec(double kappa) {
  std::vector<PerturbationTerm> terms{{0, 0, 0, -kappa}, {0, 2, 0, kappa}};
  return NonlinearKernelSpec(StochasticMatrix(to_double(example1_base_exact())), std::move(terms),
                             {{"kappa", kappa}});
}

NonlinearKernelSpec example2_spec(double kappa) {
  std::vector<PerturbationTerm> terms;
  for (std::size_t i = 0; i < 6; ++i) {
    const std::size_t neighbour = i < 5 ? i + 1 : 4;
    terms.push_back({i, i, i, -kappa});
    terms.push_back({i, neighbour, i, kappa});
  }
  return NonlinearKernelSpec(StochasticMatrix(to_double(example2_base_exact())), std::move(terms),
                             {{"kappa", kappa}});
}

RationalMatrix example1_v_hat_reference() {
  // Nonzero entries as (row, col, numerator, denominator).
  struct Entry {
    int row, col, num, den;
  };
  static constexpr Entry entries[] = {
      {0, 0, 1, 10},  {0, 10, 1, 10}, {1, 1, 1, 5},   {2, 2, 1, 5},   {2, 5, 1, 10},  {3, 3, 1, 10},
      {3, 5, 1, 10},  {4, 1, 1, 15},  {4, 2, 1, 30},  {4, 4, 2, 15},  {4, 5, 1, 15},  {5, 2, 1, 10},
      {5, 5, 3, 10},  {6, 6, 1, 5},   {7, 6, 1, 15},  {7, 7, 2, 15},  {7, 9, 1, 30},  {7, 10, 1, 15},
      {8, 5, 1, 10},  {8, 8, 1, 5},   {9, 9, 1, 5},   {9, 10, 1, 10}, {10, 9, 1, 10}, {10, 10, 3, 10},
      {11, 10, 1, 10}, {11, 11, 1, 5},
  };
  RationalMatrix m = RationalMatrix::Constant(12, 12, Rational(0));
  for (const auto& e : entries) m(e.row, e.col) = Rational(e.num, e.den);
  return m;
}

const ReferenceValues& example1_reference() {
  static const ReferenceValues ref{"example1",
                                   4,
                                   12,
                                   0.25 + std::sqrt(5.0) / 20.0,
                                   1e-9,
                                   {0.4, 0.15, 0.055, 0.02, 0.00725},
                                   {0.3618, 0.1309, 0.04736, 0.017135, 0.0061996},
                                   0.6};
  return ref;
}

const ReferenceValues& example2_reference() {
  static const ReferenceValues ref{"example2",
                                   6,
                                   30,
                                   0.3732,
                                   5e-5,
                                   {0.4, 0.16, 0.062, 0.0236, 0.0089},
                                   {0.3732, 0.139282, 0.05198, 0.019399, 0.007239986},
                                   0.6};
  return ref;
}

}  // namespace nmc::examples
