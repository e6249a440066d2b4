#pragma once

#include <Eigen/Core>

#include "nmc/rational.hpp"

namespace nmc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RationalMatrix = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;

RationalMatrix to_rational(const Matrix& m);
Matrix to_double(const RationalMatrix& m);

}  // namespace nmc
