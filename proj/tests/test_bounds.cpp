#include "risklab/bounds.hpp"
#include "risklab/error.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace risklab;

TEST(Bounds, Thm1MatchesDirectFormula) {
    for (int d : {1, 7, 100, 4000})
        for (double eps : {0.0, 0.05, 0.3})
            for (double tau : {0.5, 1.0, 2.0})
                for (double r : {0.5, 1.0, 3.0}) {
                    const double expected = 1.7 * std::exp(-eps * eps * tau * tau * d / (8.0 * r * r));
                    EXPECT_NEAR(bound_thm1(eps, tau, r, d, 1.7), expected, 1e-13 * expected + 1e-300);
                }
}

TEST(Bounds, LargeStateAnchors) {
    // e^{-5} and e^{-500/81}
    EXPECT_NEAR(bound_thm1(0.1, 1.0, 1.0, 4000, 1.0), 0.006737946999085467, 1e-17);
    EXPECT_NEAR(bound_thm2(0.1, 1.0, 4000, 1.0), 0.006737946999085467, 1e-17);
    EXPECT_NEAR(bound_cru(0.9, 1.0, 4000), std::exp(-500.0 / 81.0), 1e-17);
    EXPECT_NEAR(bound_cru(0.9, 1.0, 4000), 0.0021, 0.00005);
}

TEST(Bounds, EpsZeroGivesKappa) {
    EXPECT_DOUBLE_EQ(bound_thm1(0.0, 1.0, 1.0, 500, 1.25), 1.25);
    EXPECT_DOUBLE_EQ(bound_thm2(0.0, 1.0, 500, 1.25), 1.25);
    const auto rep = report_thm1(0.0, 1.0, 1.0, 500, 1.25);
    EXPECT_DOUBLE_EQ(rep.value, 1.25);
    EXPECT_DOUBLE_EQ(rep.clipped_value, 1.0);
}

TEST(Bounds, CruAtBetaOneIsOne) { EXPECT_DOUBLE_EQ(bound_cru(1.0, 1.0, 4000), 1.0); }

TEST(Bounds, CruEqualsThm2AtImpliedEps) {
    for (double beta : {0.6, 0.8, 0.95})
        for (int d : {2, 50, 999}) {
            const double e = (1.0 - beta) / beta;
            EXPECT_NEAR(bound_cru(beta, 1.3, d), bound_thm2(e, 1.3, d, 1.0), 1e-15);
        }
}

TEST(Bounds, MonotoneInDimensionAndEps) {
    double prev = 2.0;
    for (int d = 1; d <= 2048; d *= 2) {
        const double v = bound_thm2(0.2, 1.0, d, 1.0);
        EXPECT_LT(v, prev);
        prev = v;
    }
    prev = 2.0;
    for (double eps = 0.05; eps < 1.0; eps += 0.05) {
        const double v = bound_thm1(eps, 1.0, 1.0, 100, 1.0);
        EXPECT_LT(v, prev);
        prev = v;
    }
}

TEST(Bounds, Thm4AndCor16) {
    EXPECT_NEAR(bound_thm4(1.0, 0.1, 100), 0.5 * std::exp(-1.0), 1e-16);
    EXPECT_NEAR(bound_cor16(2.0, 0.01, 50), 1.0 - 0.5 * std::exp(-1.0), 1e-16);
    EXPECT_LE(bound_thm4(0.5, 0.3, 1), 0.5);
}

TEST(Bounds, Lemma1) { EXPECT_NEAR(bound_lemma1(0.4, 2.0, 512), std::exp(-0.16 * 512 / 32.0), 1e-16); }

TEST(Bounds, Prop7AgainstLogFactorialOracle) {
    for (int d : {1, 2, 5, 20, 170, 5000}) {
        // (d!)^{-1/2d} by direct summation of logs
        double logfact = 0.0;
        for (int k = 2; k <= d; ++k)
            logfact += std::log(static_cast<double>(k));
        const double expected = 4.0 * std::exp(-0.7 * 0.2 / std::sqrt(d)) * std::exp(-logfact / (2.0 * d));
        EXPECT_NEAR(bound_prop7(0.7, 0.2, d), expected, 1e-13 * expected) << d;
    }
}

TEST(Bounds, WidthPrefactorAtMostFour) {
    const double alpha = std::sqrt(std::numbers::pi) * (std::sqrt(3.0) - 1.0);
    EXPECT_NEAR(width_alpha(), alpha, 1e-15);
    for (int d : {1, 2, 3, 10, 1000, 1000000}) {
        const double expected = (2.0 / alpha) * std::pow(alpha * d / 2.0, 1.0 / d);
        EXPECT_NEAR(prop7_prefactor(d), expected, 1e-14);
        EXPECT_LE(prop7_prefactor(d), 4.0);
    }
    EXPECT_LE(prop7_sharp(1.0, 0.1, 30), bound_prop7(1.0, 0.1, 30));
}

TEST(Bounds, ConstantWidthFactor) {
    EXPECT_DOUBLE_EQ(constant_width_factor(1), 1.0);
    EXPECT_NEAR(constant_width_factor(2), std::sqrt(4.0) - 1.0, 1e-15);
    EXPECT_NEAR(constant_width_factor(3), std::pow(std::sqrt(3.0 + 2.0 / 3.0) - 1.0, 2), 1e-15);
    // d = 2: a segment of length theta, so the lower bound is exactly theta.
    EXPECT_NEAR(constant_width_volume_lower_bound(2, 0.3), 0.3, 1e-15);
}

TEST(Bounds, DomainErrors) {
    EXPECT_THROW(bound_thm1(-0.1, 1.0, 1.0, 10, 1.0), Error);
    EXPECT_THROW(bound_thm1(0.1, 1.0, 0.0, 10, 1.0), Error);
    EXPECT_THROW(bound_thm2(0.1, 1.0, 0, 1.0), Error);
    EXPECT_THROW(bound_thm2(0.1, 1.0, 10, 0.5), Error);
    EXPECT_THROW(bound_cru(0.0, 1.0, 10), Error);
    EXPECT_THROW(bound_cru(1.5, 1.0, 10), Error);
}

TEST(Bounds, ReportCsv) {
    const auto rep = report_cru(0.9, 1.0, 4000);
    EXPECT_EQ(rep.theorem_id, "cru");
    EXPECT_NE(rep.csv_row().find(format_double(rep.value)), std::string::npos);
    EXPECT_EQ(std::stod(format_double(rep.value)), rep.value);
}
