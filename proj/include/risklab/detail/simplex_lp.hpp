#pragma once

#include <Eigen/Dense>

namespace risklab::detail {

// maximize c.x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0
struct LpProblem {
    Eigen::VectorXd objective;
    Eigen::MatrixXd a_ub;
    Eigen::VectorXd b_ub;
    Eigen::MatrixXd a_eq;
    Eigen::VectorXd b_eq;
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpResult {
    LpStatus status = LpStatus::iteration_limit;
    double objective = 0.0;
    Eigen::VectorXd x;
};

// Dense two-phase tableau simplex with Bland's rule. Meant for the small
// allocation LPs of max-min agents, not for general use.
LpResult solve_lp(const LpProblem& problem);

} // namespace risklab::detail
