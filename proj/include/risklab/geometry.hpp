#pragma once

#include "risklab/sampling.hpp"

#include <Eigen/Dense>

#include <string>
#include <variant>
#include <vector>

namespace risklab {

/// Open Euclidean ball; membership tests accept the closure.
struct Ball {
    Vec center;
    double radius = 1.0;
};

enum class Orientation { upper, lower };

/// upper: {x : p.x >= b}; lower: {x : p.x <= b}.
struct HalfSpace {
    Vec normal;
    double offset = 0.0;
    Orientation orientation = Orientation::upper;
};

/// Axis-aligned box [lower, upper].
struct Box {
    Vec lower;
    Vec upper;
};

/// normal.x <= offset
struct LinearConstraint {
    Vec normal;
    double offset = 0.0;
};

enum class Ambient { full_space, simplex };

/// Convex polytope in V-rep, H-rep, or both. With `Ambient::simplex` the
/// constraints are understood to be intersected with the probability simplex.
struct Polytope {
    std::vector<Vec> vertices;
    std::vector<LinearConstraint> constraints;
    Ambient ambient = Ambient::full_space;
    int dim = 0;

    static Polytope from_vertices(std::vector<Vec> vertices, Ambient ambient = Ambient::full_space);
    static Polytope from_constraints(int dimension, std::vector<LinearConstraint> constraints,
                                     Ambient ambient = Ambient::full_space);

    int dimension() const { return dim; }
    bool has_vertices() const { return !vertices.empty(); }
    bool has_constraints() const { return !constraints.empty() || ambient == Ambient::simplex; }
    Eigen::MatrixXd vertex_matrix() const;
};

/// The probability simplex in R^d (both representations).
Polytope simplex_polytope(int dimension);
/// {mu in simplex : mu_k >= a}, 0 <= a <= 1.
Polytope simplex_cap_above(int dimension, int k, double a);
/// {mu in simplex : mu_k <= b}, 0 <= b <= 1.
Polytope simplex_cap_below(int dimension, int k, double b);
/// Segment between two points.
Polytope segment(const Vec& a, const Vec& b, Ambient ambient = Ambient::full_space);

/// shift + scale * simplex. With shift on the simplex face it lies in the
/// hyperplane sum = shift.sum() + scale.
struct ScaledSimplex {
    Vec shift;
    double scale = 1.0;
};

/// Ball of the given radius inside the hyperplane {x : sum x = 1}.
struct SimplexBall {
    Vec center;
    double radius = 0.0;
};

class ConvexBody;

struct Intersection {
    std::vector<ConvexBody> parts;
};

class ConvexBody {
public:
    using Shape = std::variant<Ball, HalfSpace, Box, Polytope, ScaledSimplex, SimplexBall, Intersection>;

    ConvexBody(Ball b) : shape_(std::move(b)) {}
    ConvexBody(HalfSpace h) : shape_(std::move(h)) {}
    ConvexBody(Box b) : shape_(std::move(b)) {}
    ConvexBody(Polytope p) : shape_(std::move(p)) {}
    ConvexBody(ScaledSimplex s) : shape_(std::move(s)) {}
    ConvexBody(SimplexBall s) : shape_(std::move(s)) {}
    ConvexBody(Intersection i) : shape_(std::move(i)) {}

    const Shape& shape() const { return shape_; }
    template <class T>
    const T* as() const { return std::get_if<T>(&shape_); }

    int dimension() const;
    /// True if the body lies in the simplex hyperplane (volumes measured there).
    bool in_simplex_hyperplane() const;
    std::string describe() const;

private:
    Shape shape_;
};

/// Checks structural validity; throws `Error("empty set")` for empty descriptors.
void validate(const ConvexBody& body);

/// Nearest point of the closure of `body` to `x`.
Vec project(const ConvexBody& body, const Vec& x);

double distance_point_to_convex(const Vec& x, const ConvexBody& body);

bool contains(const ConvexBody& body, const Vec& x, double tol = 1e-12);

/// sup_{x in body} u.x; throws for unbounded directions.
double support(const ConvexBody& body, const Vec& u);

/// Distance between an upper and a lower half-space with parallel normals.
double halfspace_gap(const HalfSpace& upper, const HalfSpace& lower);

struct PairDistance {
    double value = 0.0;
    Vec a;
    Vec b;
    int iterations = 0;
};

PairDistance polytope_distance(const Polytope& p, const Polytope& q);
PairDistance body_distance(const ConvexBody& a, const ConvexBody& b);

/// dist(x, body) < delta, strict, with boundary tolerance 1e-12.
bool delta_extension_contains(const ConvexBody& body, double delta, const Vec& x);

/// lambda * A + (1 - lambda) * B. Boxes give a box; V-rep polytopes give the
/// pairwise vertex sums (not reduced to the hull), limited to d <= 6.
ConvexBody minkowski_combine(const ConvexBody& a, const ConvexBody& b, double lambda);

enum class VolumeKind { exact, monte_carlo };

struct VolumeMethod {
    VolumeKind kind = VolumeKind::exact;
    std::size_t n = 0;
    SeedSpec seed{};

    static VolumeMethod exact() { return {}; }
    static VolumeMethod mc(std::size_t n, SeedSpec seed) { return {VolumeKind::monte_carlo, n, seed}; }
};

struct VolumeResult {
    double value = 0.0;
    VolumeKind method = VolumeKind::exact;
    double ci_halfwidth = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    MCEstimate counts{};
};

double unit_ball_volume(int dimension);
/// (d-1)-dimensional measure of the probability simplex: sqrt(d)/Gamma(d).
double simplex_volume(int dimension);

bool has_exact_volume(const ConvexBody& body);
/// Volume in R^d, or (d-1)-measure for bodies in the simplex hyperplane.
VolumeResult volume(const ConvexBody& body, const VolumeMethod& method = VolumeMethod::exact());

struct BmReport {
    double lhs = 0.0;  // Vol(lambda A + (1-lambda) B)
    double rhs = 0.0;  // Vol(A)^lambda Vol(B)^(1-lambda)
    bool holds = false;
    bool equality = false;
    double lhs_root = 0.0;  // Vol(.)^(1/d) form
    double rhs_root = 0.0;
    bool holds_root = false;
    bool equality_root = false;
    VolumeKind method = VolumeKind::exact;
};

BmReport bm_check(const ConvexBody& a, const ConvexBody& b, double lambda,
                  const VolumeMethod& method = VolumeMethod::exact());

struct SeparationReport {
    double distance = 0.0;
    double fraction_a = 0.0;
    double fraction_b = 0.0;
    double min_fraction = 0.0;
    double min_fraction_ci_lo = 0.0;
    double min_fraction_ci_hi = 0.0;
    double bound = 1.0;
    bool holds = false;
    VolumeKind method = VolumeKind::exact;
};

/// Compares min relative volume of A, B inside `enclosing` against
/// exp(-delta^2 d / 8 r^2). Throws HypothesisViolated if dist(A, B) < delta.
SeparationReport separation_bound_check(const ConvexBody& a, const ConvexBody& b, const Ball& enclosing,
                                        double delta, const VolumeMethod& method = VolumeMethod::exact());

struct CapFraction {
    double value = 0.0;
    bool degenerate = false;
};

/// Fraction of a d-ball of radius r with u.z >= t, for 0 <= t.
CapFraction cap_fraction(int dimension, double radius, double t);
/// Same for any real t (t < 0 gives the complement of the opposite cap).
double signed_cap_fraction(int dimension, double radius, double t);

/// Projection onto the probability simplex.
Vec project_to_simplex(const Vec& x);

/// Cross-validates a polytope carrying both representations: every vertex
/// satisfies the constraints, every constraint is tight at some vertex, and
/// random points agree on membership.
bool representations_agree(const Polytope& p, std::size_t samples, const SeedSpec& seed, double tol = 1e-9);

} // namespace risklab
