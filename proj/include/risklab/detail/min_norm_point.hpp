#pragma once

#include <Eigen/Dense>

namespace risklab::detail {

struct MinNormResult {
    Eigen::VectorXd point;   // minimum-norm element of the hull
    Eigen::VectorXd weights; // convex weights, one per input column
    int iterations = 0;
};

// Wolfe's minimum-norm-point algorithm over conv(columns of `points`).
// Finite and exact up to the tolerance on the optimality test.
MinNormResult min_norm_point(const Eigen::MatrixXd& points, double tol = 1e-12);

} // namespace risklab::detail
