#include "risklab/economy.hpp"
#include "risklab/error.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace risklab;

namespace {

Vec v(std::initializer_list<double> xs) {
    Vec out(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index k = 0;
    for (double x : xs)
        out(k++) = x;
    return out;
}

EconomySpec misallocated() {
    return EconomySpec({{PreferenceSpec::cobb_douglas(v({0.5, 0.5})), v({0.5, 0.5})},
                        {PreferenceSpec::cobb_douglas(v({0.5, 0.5})), v({0.5, 0.5})}});
}

Allocation bets() {
    Allocation f(2, 2);
    f << 0.8, 0.2, 0.2, 0.8;
    return f;
}

} // namespace

TEST(Economy, Aggregates) {
    const EconomySpec e({{PreferenceSpec::cobb_douglas(v({0.5, 0.5})), v({1, 3})},
                         {PreferenceSpec::cobb_douglas(v({0.5, 0.5})), v({2, 0.5})}});
    EXPECT_TRUE(e.aggregate().isApprox(v({3, 3.5})));
    EXPECT_FALSE(e.no_aggregate_uncertainty());
    EXPECT_DOUBLE_EQ(e.tau(), 0.5);
    EXPECT_THROW(e.omega_bar(), Error);
    EXPECT_DOUBLE_EQ(misallocated().omega_bar(), 1.0);
}

TEST(Economy, CommonPriorEquilibriumClosedForm) {
    // identical priors: p_s proportional to mu_s / omega_s
    const Vec mu = v({0.2, 0.5, 0.3});
    const EconomySpec e({{PreferenceSpec::cobb_douglas(mu), v({1, 2, 0.5})},
                         {PreferenceSpec::cobb_douglas(mu), v({3, 1, 2})},
                         {PreferenceSpec::cobb_douglas(mu), v({0.5, 0.5, 4})}});
    const auto eq = tatonnement_equilibrium(e);
    Vec p = mu.cwiseQuotient(e.aggregate());
    p /= p.sum();
    EXPECT_TRUE(eq.price.isApprox(p, 1e-9));
    EXPECT_LT(eq.residual, 1e-10);
}

TEST(Economy, EquilibriumWithCornerEndowments) {
    const EconomySpec e({{PreferenceSpec::cobb_douglas(v({0.6, 0.4})), v({2, 0})},
                         {PreferenceSpec::cobb_douglas(v({0.3, 0.7})), v({0, 1})}});
    const auto eq = tatonnement_equilibrium(e);
    // clearing state 1: 1.2 + 0.3 p2 / p1 = 2
    EXPECT_NEAR(eq.price(1) / eq.price(0), 8.0 / 3.0, 1e-9);
    EXPECT_TRUE(act_of(eq.allocation, 0).isApprox(v({1.2, 0.3}), 1e-9));
    EXPECT_TRUE(act_of(eq.allocation, 1).isApprox(v({0.8, 0.7}), 1e-9));
    const Vec excess = eq.allocation.colwise().sum().transpose() - e.aggregate();
    EXPECT_NEAR(eq.price.dot(excess), 0.0, 1e-12);
}

TEST(Economy, EquilibriumClearsAndIsBudgetOptimal) {
    const EconomySpec e({{PreferenceSpec::cobb_douglas(v({0.6, 0.3, 0.1})), v({2, 1, 1})},
                         {PreferenceSpec::cobb_douglas(v({0.1, 0.2, 0.7})), v({1, 1, 3})}});
    const auto eq = tatonnement_equilibrium(e);
    EXPECT_NEAR(eq.price.sum(), 1.0, 1e-14);
    EXPECT_TRUE(eq.allocation.colwise().sum().transpose().isApprox(e.aggregate(), 1e-9));
    for (std::size_t i = 0; i < 2; ++i) {
        const Vec f = act_of(eq.allocation, i);
        const Vec w = e.agent(i).endowment;
        EXPECT_NEAR(eq.price.dot(f), eq.price.dot(w), 1e-12);
        // first-order condition of log utility: mu_s / f_s proportional to p_s
        const Vec ratio = e.agent(i).preference.prior().cwiseQuotient(f).cwiseQuotient(eq.price);
        EXPECT_NEAR(ratio.maxCoeff() - ratio.minCoeff(), 0.0, 1e-8);
    }
}

TEST(Economy, ImprovementEvent) {
    const auto cd = PreferenceSpec::cobb_douglas(v({0.5, 0.5}));
    EXPECT_TRUE(individual_improvement_event(cd, v({1, 1}), v({0.5, 0.5}), 0.1));
    EXPECT_FALSE(individual_improvement_event(cd, v({1, 1}), v({0.1, 0.1}), 0.1));
    EXPECT_FALSE(individual_improvement_event(cd, v({1, 1}), v({-2, 5}), 0.0));  // leaves the domain
}

TEST(Economy, PlannerSharesForCommonPrior) {
    const EconomySpec e({{PreferenceSpec::cobb_douglas(v({0.3, 0.7})), v({0.5, 0.5})},
                         {PreferenceSpec::cobb_douglas(v({0.3, 0.7})), v({0.5, 0.5})}});
    const auto f = planner_allocation(e, v({1, 3}));
    EXPECT_TRUE(act_of(f, 0).isApprox(v({0.25, 0.25}), 1e-9));
    EXPECT_TRUE(act_of(f, 1).isApprox(v({0.75, 0.75}), 1e-9));
    EXPECT_TRUE(supporting_price(e, f).isApprox(v({0.3, 0.7}), 1e-9));
}

TEST(Economy, PlannerFirstOrderConditions) {
    const EconomySpec e({{PreferenceSpec::cobb_douglas(v({0.6, 0.4})), v({0.5, 0.5})},
                         {PreferenceSpec::crra(v({0.3, 0.7}), 2.0), v({0.5, 0.5})}});
    const Vec lambda = v({1.0, 0.5});
    const auto f = planner_allocation(e, lambda);
    const Vec g0 = lambda(0) * utility_gradient(e.agent(0).preference, act_of(f, 0));
    const Vec g1 = lambda(1) * utility_gradient(e.agent(1).preference, act_of(f, 1));
    EXPECT_TRUE(g0.isApprox(g1, 1e-7));
}

TEST(Economy, ScitovskyScaling) {
    const EconomySpec e({{PreferenceSpec::cobb_douglas(v({0.3, 0.7})), v({0.5, 0.5})},
                         {PreferenceSpec::cobb_douglas(v({0.6, 0.4})), v({0.5, 0.5})}});
    const auto f = planner_allocation(e, v({1, 1}));
    // scaling the aggregate by c improves everybody iff (1 - eps) c > 1
    EXPECT_TRUE(scitovsky_member(e, f, 1.2 * e.aggregate(), 0.1));
    EXPECT_FALSE(scitovsky_member(e, f, 1.05 * e.aggregate(), 0.1));
    EXPECT_THROW(scitovsky_member(e, f, e.aggregate(), 0.0), BoundaryIndeterminate);
    EXPECT_NEAR(scitovsky_solve(e, f, 1.2 * e.aggregate(), 0.1).value, std::log(1.08), 1e-7);
}

TEST(Economy, ScitovskyNegativeShockNeverMember) {
    const EconomySpec e({{PreferenceSpec::cobb_douglas(v({0.3, 0.5, 0.2})), Vec::Constant(3, 0.5)},
                         {PreferenceSpec::cobb_douglas(v({0.6, 0.2, 0.2})), Vec::Constant(3, 0.5)}});
    const auto f = planner_allocation(e, v({1, 2}));
    CounterRng rng({2, 2}, 0);
    for (int k = 0; k < 200; ++k) {
        Vec z(3);
        for (int s = 0; s < 3; ++s)
            z(s) = -0.3 * rng.uniform();
        EXPECT_FALSE(scitovsky_solve(e, f, e.aggregate() + z, 0.0).member);
    }
}

TEST(Economy, ScitovskyLinearAgents) {
    // risk-neutral agents with different priors at the equal split: trade on beliefs
    const EconomySpec e({{PreferenceSpec::risk_neutral(v({0.8, 0.2})), v({0.5, 0.5})},
                         {PreferenceSpec::risk_neutral(v({0.2, 0.8})), v({0.5, 0.5})}});
    const auto f = endowment_allocation(e);
    const auto r = scitovsky_solve(e, f, e.aggregate(), 0.1);
    EXPECT_EQ(r.method, ScitovskyMethod::linear_program);
    EXPECT_TRUE(r.member);
    // give agent 0 state 1 and agent 1 state 2: each gets 0.9 * 0.8 = 0.72 > 0.5
    EXPECT_NEAR(r.value, 0.72 - 0.5, 1e-9);
}

TEST(Economy, CruMisallocation) {
    const auto e = misallocated();
    // certainty equivalent of (0.8, 0.2) under equal log weights is 0.4
    const double ce = std::exp(0.5 * std::log(0.8) + 0.5 * std::log(0.2));
    EXPECT_NEAR(ce, 0.4, 1e-15);
    EXPECT_NEAR(cru(e, bets()), 2 * ce / e.omega_bar(), 1e-6);
}

TEST(Economy, CruOfParetoOptimumIsOne) {
    const auto e = misallocated();
    EXPECT_NEAR(cru(e, endowment_allocation(e)), 1.0, 1e-6);
}

TEST(Economy, EpsDomination) {
    const auto e = misallocated();
    EXPECT_TRUE(pareto_dominated_eps(e, bets(), 0.1));
    EXPECT_FALSE(pareto_dominated_eps(e, bets(), 0.3));
    EXPECT_FALSE(pareto_dominated_eps(e, endowment_allocation(e), 0.01));
}

TEST(Economy, RhoEnumeration) {
    const EconomySpec two({{PreferenceSpec::risk_neutral(Vec::Constant(5, 0.2)), Vec::Constant(5, 0.5)},
                           {PreferenceSpec::risk_neutral(Vec::Constant(5, 0.2)), Vec::Constant(5, 0.5)}});
    double best = 0.0;
    for (int n = 0; n <= 5; ++n)
        best = std::max(best, std::sqrt(n) + std::sqrt(5.0 - n));
    const auto r = rho(two);
    EXPECT_NEAR(r.definitional, 2 * best, 1e-14);
    EXPECT_NEAR(r.sqrt_mode, 2 * std::sqrt(5.0), 1e-14);
}

TEST(Economy, AllocationChecks) {
    const auto e = misallocated();
    Allocation bad(2, 2);
    bad << 0.8, 0.2, 0.3, 0.8;
    EXPECT_THROW(check_allocation(e, bad), Error);
    Allocation neg(2, 2);
    neg << 1.2, 0.2, -0.2, 0.8;
    EXPECT_THROW(check_allocation(e, neg), Error);
    EXPECT_NO_THROW(check_allocation(e, bets()));
}

TEST(Economy, BeliefVolumeSplitWithSingleton) {
    // a smooth agent has a singleton belief set: zero volume
    const EconomySpec e({{PreferenceSpec::cobb_douglas(v({0.3, 0.3, 0.4})), Vec::Constant(3, 0.5)},
                         {PreferenceSpec::meu(simplex_polytope(3)), Vec::Constant(3, 0.5)}});
    const auto split = belief_volume_split(e, endowment_allocation(e), {0}, VolumeMethod::mc(10000, {1, 1}));
    EXPECT_EQ(split.min_rel_vol, 0.0);
}

TEST(Economy, BeliefVolumeSplitCaps) {
    const int d = 4;
    const EconomySpec e({{PreferenceSpec::meu(simplex_cap_above(d, 0, 0.5)), Vec::Constant(d, 0.5)},
                         {PreferenceSpec::meu(simplex_cap_below(d, 0, 0.2)), Vec::Constant(d, 0.5)}});
    const auto split = belief_volume_split(e, endowment_allocation(e), {0}, VolumeMethod::mc(200000, {3, 3}));
    EXPECT_NEAR(split.vol_j, std::pow(0.5, d - 1), 1e-12);
    const double below = 1.0 - std::pow(0.8, d - 1);
    EXPECT_NEAR(split.vol_jc, below, 0.01);
    EXPECT_NEAR(split.min_rel_vol, std::pow(0.5, d - 1), 1e-12);
}

TEST(Economy, ConstantWidthOfSimplexBall) {
    const SimplexBall s{Vec::Constant(5, 0.2), 0.05};
    const auto w = width_report(s, 200, {4, 4});
    EXPECT_TRUE(w.constant_width);
    EXPECT_NEAR(w.theta_min, 0.1, 1e-12);
    const auto cap = width_report(simplex_polytope(4), 200, {4, 4});
    EXPECT_FALSE(cap.constant_width);
}
