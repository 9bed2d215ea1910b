#include "risklab/error.hpp"
#include "risklab/geometry.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace risklab;

namespace {

Vec v(std::initializer_list<double> xs) {
    Vec out(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index k = 0;
    for (double x : xs)
        out(k++) = x;
    return out;
}

double factorial(int n) { return std::tgamma(n + 1.0); }

} // namespace

TEST(Geometry, UnitBallVolumes) {
    EXPECT_NEAR(unit_ball_volume(1), 2.0, 1e-15);
    EXPECT_NEAR(unit_ball_volume(2), std::numbers::pi, 1e-15);
    EXPECT_NEAR(unit_ball_volume(3), 4.0 * std::numbers::pi / 3.0, 1e-14);
    EXPECT_NEAR(unit_ball_volume(4), std::numbers::pi * std::numbers::pi / 2.0, 1e-14);
}

TEST(Geometry, SimplexVolume) {
    for (int d = 2; d <= 8; ++d)
        EXPECT_NEAR(simplex_volume(d), std::sqrt(d) / factorial(d - 1), 1e-14);
    // d = 2: segment from (1,0) to (0,1)
    EXPECT_NEAR(volume(simplex_polytope(2)).value, std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(volume(simplex_polytope(5)).value, simplex_volume(5), 1e-13);
}

TEST(Geometry, ScaledSimplexAndCaps) {
    // cap {mu_k >= a} is a copy of the simplex scaled by 1 - a
    for (int d : {3, 5, 7})
        for (double a : {0.1, 0.5}) {
            const double expected = std::pow(1.0 - a, d - 1) * simplex_volume(d);
            EXPECT_NEAR(volume(simplex_cap_above(d, 0, a)).value, expected, 1e-12 * expected);
            EXPECT_NEAR(volume(ScaledSimplex{a * Vec::Unit(d, 0), 1.0 - a}).value, expected, 1e-12 * expected);
        }
}

TEST(Geometry, BoxVolumeAndContains) {
    const Box b{v({0, 0, 0}), v({1, 2, 3})};
    EXPECT_DOUBLE_EQ(volume(b).value, 6.0);
    EXPECT_TRUE(contains(b, v({1, 2, 3})));
    EXPECT_FALSE(contains(b, v({1.1, 0, 0})));
}

TEST(Geometry, DegeneratePolytopeHasZeroVolume) {
    const auto p = Polytope::from_vertices({v({0, 0, 0}), v({1, 0, 0}), v({0, 1, 0}), v({1, 1, 0})});
    EXPECT_EQ(volume(p).value, 0.0);
}

TEST(Geometry, TetrahedronVolume) {
    const auto p = Polytope::from_vertices({v({0, 0, 0}), v({1, 0, 0}), v({0, 1, 0}), v({0, 0, 1})});
    EXPECT_NEAR(volume(p).value, 1.0 / 6.0, 1e-15);
}

TEST(Geometry, MonteCarloVolumeBracketsExact) {
    const Ball b{v({0.2, -0.1, 0.3}), 0.7};
    const auto mc = volume(Intersection{{b, Box{v({0, -1, -1}), v({1, 1, 1})}}}, VolumeMethod::mc(200000, {4, 4}));
    // ball center is inside the box slab x >= 0 at offset 0.2 along the first axis
    const double exact = unit_ball_volume(3) * std::pow(0.7, 3) * signed_cap_fraction(3, 0.7, -0.2);
    EXPECT_LE(mc.ci_lo, exact);
    EXPECT_GE(mc.ci_hi, exact);
}

TEST(Geometry, CapFractionClosedForms) {
    for (double t : {0.0, 0.2, 0.5, 0.9}) {
        EXPECT_NEAR(cap_fraction(1, 1.0, t).value, (1.0 - t) / 2.0, 1e-14);
        EXPECT_NEAR(cap_fraction(3, 1.0, t).value, (1 - t) * (1 - t) * (2 + t) / 4.0, 1e-14);
        EXPECT_NEAR(cap_fraction(3, 2.0, 2 * t).value, cap_fraction(3, 1.0, t).value, 1e-14);
    }
    // d = 2: segment area (acos(t) - t sqrt(1 - t^2)) / pi
    EXPECT_NEAR(cap_fraction(2, 1.0, 0.3).value, (std::acos(0.3) - 0.3 * std::sqrt(0.91)) / std::numbers::pi, 1e-14);
    EXPECT_TRUE(cap_fraction(3, 1.0, 1.5).degenerate);
    EXPECT_EQ(cap_fraction(3, 1.0, 1.5).value, 0.0);
    EXPECT_THROW(cap_fraction(3, 1.0, -0.1), Error);
}

TEST(Geometry, CapFractionSymmetryProperty) {
    for (int d = 1; d <= 40; ++d)
        for (double t = 0.0; t <= 1.0; t += 0.125)
            EXPECT_NEAR(signed_cap_fraction(d, 1.0, t) + signed_cap_fraction(d, 1.0, -t), 1.0, 1e-13);
}

TEST(Geometry, ProjectToSimplexKnown) {
    EXPECT_TRUE(project_to_simplex(v({0.5, 0.5, 2.0})).isApprox(v({0, 0, 1}), 1e-14));
    EXPECT_TRUE(project_to_simplex(v({1, 1})).isApprox(v({0.5, 0.5}), 1e-14));
    EXPECT_TRUE(project_to_simplex(v({0.2, 0.3, 0.5})).isApprox(v({0.2, 0.3, 0.5}), 1e-14));
}

TEST(Geometry, ProjectionIsNearestProperty) {
    // Variational inequality (x - P x).(y - P x) <= 0 for y in the body.
    const auto simplex = simplex_polytope(5);
    CounterRng rng({8, 8}, 0);
    std::normal_distribution<double> normal;
    for (int k = 0; k < 200; ++k) {
        Vec x(5);
        for (int s = 0; s < 5; ++s)
            x(s) = normal(rng);
        const Vec px = project(simplex, x);
        ASSERT_NEAR(px.sum(), 1.0, 1e-12);
        for (int s = 0; s < 5; ++s)
            EXPECT_LE((x - px).dot(Vec::Unit(5, s) - px), 1e-10);
    }
}

TEST(Geometry, PolytopeDistanceSquares) {
    const auto a = Polytope::from_vertices({v({0, 0}), v({1, 0}), v({1, 1}), v({0, 1})});
    const auto b = Polytope::from_vertices({v({3, 4}), v({4, 4}), v({4, 5}), v({3, 5})});
    const auto res = polytope_distance(a, b);
    EXPECT_NEAR(res.value, std::sqrt(4.0 + 9.0), 1e-10);
    EXPECT_TRUE(res.a.isApprox(v({1, 1}), 1e-9));
    EXPECT_TRUE(res.b.isApprox(v({3, 4}), 1e-9));
    const auto c = Polytope::from_vertices({v({0.5, 0.5}), v({2, 2}), v({2, 0.5})});
    EXPECT_NEAR(polytope_distance(a, c).value, 0.0, 1e-12);
}

TEST(Geometry, SimplexCapDistance) {
    // {mu_1 >= a} and {mu_1 <= b}, b < a: distance is (a - b) sqrt(d / (d - 1))
    for (int d : {3, 6}) {
        const double expected = 0.3 * std::sqrt(d / (d - 1.0));
        EXPECT_NEAR(polytope_distance(simplex_cap_above(d, 0, 0.5), simplex_cap_below(d, 0, 0.2)).value, expected,
                    1e-9);
    }
}

TEST(Geometry, BodyDistanceBallHalfSpace) {
    const Ball ball{v({0, 0, 0}), 1.0};
    const HalfSpace h{v({0, 0, 2}), 6.0, Orientation::upper};  // z >= 3
    EXPECT_NEAR(body_distance(ball, h).value, 2.0, 1e-7);
    const Ball other{v({3, 4, 0}), 1.0};
    EXPECT_NEAR(body_distance(ball, other).value, 3.0, 1e-7);
}

TEST(Geometry, HalfSpaceGap) {
    const HalfSpace up{v({1, 1}), 2.0, Orientation::upper};
    const HalfSpace lo{v({2, 2}), 1.0, Orientation::lower};
    EXPECT_NEAR(halfspace_gap(up, lo), (2.0 - 0.5) / std::sqrt(2.0), 1e-14);
    EXPECT_THROW(halfspace_gap(up, HalfSpace{v({1, 0}), 0.0, Orientation::lower}), Error);
    EXPECT_THROW(halfspace_gap(up, HalfSpace{v({1, 1}), 3.0, Orientation::lower}), Error);
}

TEST(Geometry, DeltaExtensionIsStrict) {
    const Box b{v({0, 0}), v({1, 1})};
    EXPECT_TRUE(delta_extension_contains(b, 0.5, v({1.4, 0.5})));
    EXPECT_FALSE(delta_extension_contains(b, 0.5, v({1.5, 0.5})));
}

TEST(Geometry, SupportFunction) {
    EXPECT_NEAR(support(Ball{v({1, 0}), 2.0}, v({0, 1})), 2.0, 1e-14);
    EXPECT_NEAR(support(simplex_polytope(4), v({0.1, 0.7, 0.3, 0.2})), 0.7, 1e-12);
    EXPECT_NEAR(support(simplex_cap_below(3, 0, 0.2), v({1, 0, 0})), 0.2, 1e-12);
}

TEST(Geometry, RepresentationsAgreeOnCaps) {
    for (int d : {3, 4, 6}) {
        EXPECT_TRUE(representations_agree(simplex_cap_above(d, 1, 0.4), 2000, {1, 1}));
        EXPECT_TRUE(representations_agree(simplex_cap_below(d, 0, 0.3), 2000, {1, 2}));
    }
}

TEST(Geometry, EmptyDescriptorsRejected) {
    EXPECT_THROW(validate(Polytope::from_vertices({})), Error);
    EXPECT_THROW(validate(Box{v({1, 0}), v({0, 1})}), Error);
}

TEST(Geometry, BrunnMinkowskiBoxProperty) {
    CounterRng rng({13, 13}, 0);
    for (int k = 0; k < 300; ++k) {
        const int d = 1 + k % 6;
        Vec la(d), lb(d), sa(d), sb(d);
        for (int s = 0; s < d; ++s) {
            la(s) = rng.uniform();
            lb(s) = rng.uniform();
            sa(s) = 0.05 + rng.uniform();
            sb(s) = 0.05 + rng.uniform();
        }
        const double lambda = rng.uniform();
        const auto rep = bm_check(Box{la, la + sa}, Box{lb, lb + sb}, lambda);
        // box oracle: the combination is a box with side lambda sa + (1 - lambda) sb
        const double lhs = (lambda * sa + (1 - lambda) * sb).prod();
        EXPECT_NEAR(rep.lhs, lhs, 1e-12 * lhs);
        EXPECT_NEAR(rep.rhs, std::pow(sa.prod(), lambda) * std::pow(sb.prod(), 1 - lambda), 1e-12 * lhs);
        EXPECT_TRUE(rep.holds);
        EXPECT_TRUE(rep.holds_root);
    }
}

TEST(Geometry, BrunnMinkowskiEqualityCases) {
    const Box a{v({0, 0, 0}), v({1, 2, 3})};
    const Box translate{v({5, -1, 2}), v({6, 1, 5})};
    const Box homothetic{v({1, 1, 1}), v({3.5, 6, 8.5})};
    const auto t = bm_check(a, translate, 0.3);
    EXPECT_TRUE(t.equality);
    EXPECT_TRUE(t.equality_root);
    const auto h = bm_check(a, homothetic, 0.3);
    EXPECT_TRUE(h.equality_root);
    EXPECT_FALSE(h.equality);
    const auto n = bm_check(a, Box{v({0, 0, 0}), v({3, 2, 1})}, 0.5);
    EXPECT_FALSE(n.equality_root);
    EXPECT_GT(n.lhs, n.rhs);
}

TEST(Geometry, MinkowskiCombinePolytopes) {
    const auto tri = Polytope::from_vertices({v({0, 0}), v({1, 0}), v({0, 1})});
    const auto sq = Polytope::from_vertices({v({0, 0}), v({1, 0}), v({1, 1}), v({0, 1})});
    const auto sum = minkowski_combine(tri, sq, 0.5);
    // hull of (0,0), (1,0), (1,0.5), (0.5,1), (0,1)
    EXPECT_NEAR(volume(sum).value, 0.875, 1e-12);
}

TEST(Geometry, SeparationExactCaps) {
    for (int d : {2, 16, 512}) {
        const Ball ball{Vec::Zero(d), 1.0};
        const Vec e1 = Vec::Unit(d, 0);
        const Intersection a{{ball, HalfSpace{e1, 0.1, Orientation::upper}}};
        const Intersection b{{ball, HalfSpace{e1, -0.1, Orientation::lower}}};
        const auto rep = separation_bound_check(a, b, ball, 0.2);
        EXPECT_NEAR(rep.distance, 0.2, 1e-7);
        EXPECT_NEAR(rep.min_fraction, cap_fraction(d, 1.0, 0.1).value, 1e-15);
        EXPECT_TRUE(rep.holds);
    }
}

TEST(Geometry, SeparationNeedsDistance) {
    const Ball ball{Vec::Zero(3), 1.0};
    const Intersection a{{ball, HalfSpace{Vec::Unit(3, 0), 0.0, Orientation::upper}}};
    const Intersection b{{ball, HalfSpace{Vec::Unit(3, 0), 0.0, Orientation::lower}}};
    EXPECT_THROW(separation_bound_check(a, b, ball, 0.1), HypothesisViolated);
}

TEST(Geometry, SimplexBallVolume) {
    // radius rho ball inside the (d-1)-dimensional hyperplane
    const int d = 4;
    const SimplexBall s{Vec::Constant(d, 0.25), 0.1};
    EXPECT_NEAR(volume(s).value, unit_ball_volume(d - 1) * std::pow(0.1, d - 1), 1e-15);
    EXPECT_TRUE(ConvexBody(s).in_simplex_hyperplane());
}
