#include "risklab/detail/simplex_lp.hpp"

#include "risklab/error.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace risklab::detail {

namespace {

constexpr double kPivotTol = 1e-11;

struct Tableau {
    Eigen::MatrixXd t; // rows: constraints then objective; last column: rhs
    std::vector<Eigen::Index> basis;
    Eigen::Index rows() const { return static_cast<Eigen::Index>(basis.size()); }
    Eigen::Index rhs() const { return t.cols() - 1; }

    void pivot(Eigen::Index r, Eigen::Index c) {
        t.row(r) /= t(r, c);
        for (Eigen::Index i = 0; i < t.rows(); ++i) {
            if (i != r && t(i, c) != 0.0)
                t.row(i) -= t(i, c) * t.row(r);
        }
        basis[static_cast<std::size_t>(r)] = c;
    }
};

// Runs Bland-rule iterations on the objective row `obj`, restricted to the
// first `allowed` columns.
LpStatus iterate(Tableau& tab, Eigen::Index obj, Eigen::Index allowed) {
    const int cap = 50000;
    for (int it = 0; it < cap; ++it) {
        Eigen::Index entering = -1;
        for (Eigen::Index j = 0; j < allowed; ++j) {
            if (tab.t(obj, j) < -1e-10) {
                entering = j;
                break;
            }
        }
        if (entering < 0)
            return LpStatus::optimal;
        Eigen::Index leaving = -1;
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < tab.rows(); ++i) {
            const double a = tab.t(i, entering);
            if (a > kPivotTol) {
                const double ratio = tab.t(i, tab.rhs()) / a;
                if (ratio < best - 1e-13 ||
                    (std::abs(ratio - best) <= 1e-13 && leaving >= 0 &&
                     tab.basis[static_cast<std::size_t>(i)] < tab.basis[static_cast<std::size_t>(leaving)])) {
                    best = ratio;
                    leaving = i;
                }
            }
        }
        if (leaving < 0)
            return LpStatus::unbounded;
        tab.pivot(leaving, entering);
    }
    return LpStatus::iteration_limit;
}

} // namespace

LpResult solve_lp(const LpProblem& p) {
    const Eigen::Index n = p.objective.size();
    const Eigen::Index m_ub = p.a_ub.rows();
    const Eigen::Index m_eq = p.a_eq.rows();
    require(m_ub == 0 || p.a_ub.cols() == n, "lp: inequality width mismatch");
    require(m_eq == 0 || p.a_eq.cols() == n, "lp: equality width mismatch");
    const Eigen::Index m = m_ub + m_eq;

    // columns: structural | slacks | artificials | rhs
    const Eigen::Index art0 = n + m_ub;
    const Eigen::Index cols = art0 + m + 1;
    Tableau tab;
    tab.t = Eigen::MatrixXd::Zero(m + 2, cols); // two objective rows: phase 2 then phase 1
    tab.basis.resize(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
        Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(cols);
        double b = 0.0;
        if (i < m_ub) {
            row.head(n) = p.a_ub.row(i);
            row(n + i) = 1.0;
            b = p.b_ub(i);
        } else {
            row.head(n) = p.a_eq.row(i - m_ub);
            b = p.b_eq(i - m_ub);
        }
        if (b < 0.0) {
            row = -row;
            b = -b;
        }
        row(art0 + i) = 1.0;
        row(cols - 1) = b;
        tab.t.row(i) = row;
        tab.basis[static_cast<std::size_t>(i)] = art0 + i;
    }
    const Eigen::Index obj2 = m;
    const Eigen::Index obj1 = m + 1;
    tab.t.row(obj2).head(n) = -p.objective.transpose();
    for (Eigen::Index i = 0; i < m; ++i)
        tab.t.row(obj1) -= tab.t.row(i);
    tab.t.row(obj1).segment(art0, m).setZero();

    LpResult result;
    LpStatus phase1 = iterate(tab, obj1, art0 + m);
    if (phase1 == LpStatus::iteration_limit) {
        result.status = phase1;
        return result;
    }
    const double scale = 1.0 + (m > 0 ? tab.t.col(cols - 1).head(m).cwiseAbs().maxCoeff() : 0.0);
    if (tab.t(obj1, cols - 1) < -1e-9 * scale) {
        result.status = LpStatus::infeasible;
        return result;
    }
    // Drive remaining artificials out of the basis.
    for (Eigen::Index i = 0; i < m; ++i) {
        if (tab.basis[static_cast<std::size_t>(i)] < art0)
            continue;
        for (Eigen::Index j = 0; j < art0; ++j) {
            if (std::abs(tab.t(i, j)) > 1e-9) {
                tab.pivot(i, j);
                break;
            }
        }
    }
    LpStatus phase2 = iterate(tab, obj2, art0);
    result.status = phase2;
    if (phase2 != LpStatus::optimal)
        return result;
    result.x = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Index b = tab.basis[static_cast<std::size_t>(i)];
        if (b < n)
            result.x(b) = tab.t(i, cols - 1);
    }
    result.objective = p.objective.dot(result.x);
    return result;
}

} // namespace risklab::detail
