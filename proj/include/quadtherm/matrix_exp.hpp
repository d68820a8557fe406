#pragma once

#include <Eigen/Dense>

namespace quadtherm {

/// Computes exp(x) - I for a square matrix without forming exp(x) first.
///
/// Scaling-and-squaring applied directly to the shifted exponential:
/// with E(y) = exp(y) - I, the doubling identity is E(2y) = E(y)^2 + 2 E(y),
/// so the subtraction of the identity never happens and small-norm inputs
/// keep full relative precision. The truncated series on the scaled matrix
/// stops once a term drops below `term_tol` relative to the running sum.
[[nodiscard]] Eigen::MatrixXd matrix_expm1(const Eigen::MatrixXd& x, double term_tol = 1e-13);

/// exp(x) via matrix_expm1(x) + I.
[[nodiscard]] Eigen::MatrixXd matrix_exp(const Eigen::MatrixXd& x, double term_tol = 1e-13);

}  // namespace quadtherm
