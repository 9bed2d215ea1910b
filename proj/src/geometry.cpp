#include "risklab/geometry.hpp"

#include "risklab/bounds.hpp"
#include "risklab/detail/min_norm_point.hpp"
#include "risklab/detail/simplex_lp.hpp"
#include "risklab/error.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

namespace risklab {

namespace {

constexpr int kMaxIterations = 100000;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_dim(const Vec& x, int d, const char* what) {
    if (x.size() != d) {
        std::ostringstream msg;
        msg << what << ": dimension mismatch (" << x.size() << " vs " << d << ")";
        throw Error(msg.str());
    }
}

bool on_simplex(const Vec& x, double tol) {
    return std::abs(x.sum() - 1.0) <= tol * std::max<double>(1.0, static_cast<double>(x.size())) &&
           x.minCoeff() >= -tol;
}

Vec project_halfspace(const HalfSpace& h, const Vec& x) {
    const double s = h.normal.dot(x);
    const bool inside = h.orientation == Orientation::upper ? s >= h.offset : s <= h.offset;
    if (inside)
        return x;
    return x + ((h.offset - s) / h.normal.squaredNorm()) * h.normal;
}

Vec project_constraint(const LinearConstraint& c, const Vec& x) {
    const double s = c.normal.dot(x);
    if (s <= c.offset)
        return x;
    return x - ((s - c.offset) / c.normal.squaredNorm()) * c.normal;
}

Vec project_simplex_ball(const SimplexBall& b, const Vec& x) {
    const double d = static_cast<double>(x.size());
    Vec y = x.array() - (x.sum() - 1.0) / d;
    const Vec diff = y - b.center;
    const double n = diff.norm();
    if (n <= b.radius)
        return y;
    return b.center + (b.radius / n) * diff;
}

using Projector = std::function<Vec(const Vec&)>;

// Dykstra's alternating projections onto an intersection of closed convex sets.
Vec dykstra(const std::vector<Projector>& sets, const Vec& x0) {
    if (sets.size() == 1)
        return sets.front()(x0);
    Vec x = x0;
    std::vector<Vec> incr(sets.size(), Vec::Zero(x0.size()));
    for (int it = 0; it < kMaxIterations; ++it) {
        const Vec start = x;
        for (std::size_t i = 0; i < sets.size(); ++i) {
            const Vec shifted = x + incr[i];
            const Vec y = sets[i](shifted);
            incr[i] = shifted - y;
            x = y;
        }
        if ((x - start).norm() <= 1e-14 * (1.0 + x.norm()))
            return x;
    }
    throw ConvergenceError("projection onto intersection did not converge", x.norm(), 0.0);
}

Vec project_polytope(const Polytope& p, const Vec& x) {
    if (p.has_vertices()) {
        Eigen::MatrixXd shifted = p.vertex_matrix();
        shifted.colwise() -= x;
        return detail::min_norm_point(shifted).point + x;
    }
    std::vector<Projector> sets;
    if (p.ambient == Ambient::simplex)
        sets.emplace_back([](const Vec& y) { return project_to_simplex(y); });
    for (const auto& c : p.constraints)
        sets.emplace_back([&c](const Vec& y) { return project_constraint(c, y); });
    return dykstra(sets, x);
}

bool polytope_contains(const Polytope& p, const Vec& x, double tol) {
    if (p.ambient == Ambient::simplex && !on_simplex(x, tol))
        return false;
    if (!p.constraints.empty() || !p.has_vertices()) {
        for (const auto& c : p.constraints)
            if (c.normal.dot(x) > c.offset + tol * std::max(1.0, c.normal.lpNorm<Eigen::Infinity>()))
                return false;
        return true;
    }
    return (project_polytope(p, x) - x).norm() <= std::max(tol, 1e-10);
}

// Linear description of a body, when one exists.
bool collect_linear(const ConvexBody& body, std::vector<LinearConstraint>& out, bool& simplex) {
    return std::visit(
        overloaded{
            [&](const HalfSpace& h) {
                if (h.orientation == Orientation::upper)
                    out.push_back({-h.normal, -h.offset});
                else
                    out.push_back({h.normal, h.offset});
                return true;
            },
            [&](const Box& b) {
                const auto d = b.lower.size();
                for (Eigen::Index k = 0; k < d; ++k) {
                    Vec e = Vec::Zero(d);
                    e(k) = 1.0;
                    out.push_back({e, b.upper(k)});
                    out.push_back({-e, -b.lower(k)});
                }
                return true;
            },
            [&](const Polytope& p) {
                if (!p.has_constraints())
                    return false;
                out.insert(out.end(), p.constraints.begin(), p.constraints.end());
                simplex = simplex || p.ambient == Ambient::simplex;
                return true;
            },
            [&](const Intersection& i) {
                for (const auto& part : i.parts)
                    if (!collect_linear(part, out, simplex))
                        return false;
                return true;
            },
            [](const auto&) { return false; },
        },
        body.shape());
}

double linear_support(int d, const std::vector<LinearConstraint>& cons, bool simplex, const Vec& u) {
    detail::LpProblem lp;
    const auto m = static_cast<Eigen::Index>(cons.size());
    if (simplex) {
        lp.objective = u;
        lp.a_ub.resize(m, d);
        lp.b_ub.resize(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            lp.a_ub.row(i) = cons[static_cast<std::size_t>(i)].normal.transpose();
            lp.b_ub(i) = cons[static_cast<std::size_t>(i)].offset;
        }
        lp.a_eq = Eigen::MatrixXd::Ones(1, d);
        lp.b_eq = Eigen::VectorXd::Ones(1);
    } else {
        lp.objective.resize(2 * d);
        lp.objective << u, -u;
        lp.a_ub.resize(m, 2 * d);
        lp.b_ub.resize(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            const Vec& n = cons[static_cast<std::size_t>(i)].normal;
            lp.a_ub.row(i) << n.transpose(), -n.transpose();
            lp.b_ub(i) = cons[static_cast<std::size_t>(i)].offset;
        }
        lp.a_eq.resize(0, 2 * d);
        lp.b_eq.resize(0);
    }
    const auto res = detail::solve_lp(lp);
    switch (res.status) {
    case detail::LpStatus::optimal:
        return res.objective;
    case detail::LpStatus::infeasible:
        throw Error("empty set");
    case detail::LpStatus::unbounded:
        throw Error("support: body is unbounded in the requested direction");
    default:
        throw Error("support: linear program hit its iteration limit");
    }
}

double affine_rank(const std::vector<Vec>& v) {
    if (v.size() <= 1)
        return 0;
    Eigen::MatrixXd e(v.front().size(), static_cast<Eigen::Index>(v.size() - 1));
    for (std::size_t j = 1; j < v.size(); ++j)
        e.col(static_cast<Eigen::Index>(j - 1)) = v[j] - v.front();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(e);
    lu.setThreshold(1e-12);
    return static_cast<double>(lu.rank());
}

// Area of the convex hull of planar points (monotone chain + shoelace).
double hull_area(std::vector<std::pair<double, double>> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3)
        return 0.0;
    auto cross = [](const auto& o, const auto& a, const auto& b) {
        return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
    };
    std::vector<std::pair<double, double>> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0)
            --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0)
            --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    double area = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const auto& a = hull[i];
        const auto& b = hull[(i + 1) % hull.size()];
        area += a.first * b.second - b.first * a.second;
    }
    return 0.5 * std::abs(area);
}

enum class PolyVolume { zero, gram, det, planar, none };

PolyVolume polytope_volume_kind(const Polytope& p) {
    if (!p.has_vertices())
        return PolyVolume::none;
    const int d = p.dim;
    const int full = p.ambient == Ambient::simplex ? d - 1 : d;
    const double rank = affine_rank(p.vertices);
    if (rank < full)
        return PolyVolume::zero;
    if (static_cast<int>(p.vertices.size()) == full + 1)
        return p.ambient == Ambient::simplex ? PolyVolume::gram : PolyVolume::det;
    if (full == 2)
        return PolyVolume::planar;
    return PolyVolume::none;
}

double polytope_volume(const Polytope& p, PolyVolume kind) {
    const int d = p.dim;
    switch (kind) {
    case PolyVolume::zero:
        return 0.0;
    case PolyVolume::gram: {
        Eigen::MatrixXd e(d, d - 1);
        for (int j = 1; j < d; ++j)
            e.col(j - 1) = p.vertices[static_cast<std::size_t>(j)] - p.vertices.front();
        const double g = (e.transpose() * e).determinant();
        return std::sqrt(std::max(0.0, g)) / std::tgamma(static_cast<double>(d));
    }
    case PolyVolume::det: {
        Eigen::MatrixXd e(d, d);
        for (int j = 1; j <= d; ++j)
            e.col(j - 1) = p.vertices[static_cast<std::size_t>(j)] - p.vertices.front();
        return std::abs(e.determinant()) / std::tgamma(d + 1.0);
    }
    case PolyVolume::planar: {
        std::vector<std::pair<double, double>> pts;
        if (p.ambient == Ambient::simplex) {
            // orthonormal basis of the sum-zero plane in R^3
            const Vec b1 = (Vec(3) << 1.0, -1.0, 0.0).finished() / std::sqrt(2.0);
            const Vec b2 = (Vec(3) << 1.0, 1.0, -2.0).finished() / std::sqrt(6.0);
            for (const auto& v : p.vertices)
                pts.emplace_back(v.dot(b1), v.dot(b2));
        } else {
            for (const auto& v : p.vertices)
                pts.emplace_back(v(0), v(1));
        }
        return hull_area(std::move(pts));
    }
    case PolyVolume::none:
        break;
    }
    throw Error("volume: no exact formula for " + ConvexBody(p).describe());
}

// Ball intersected with one half-space, in either order.
bool as_ball_cap(const Intersection& i, const Ball*& ball, const HalfSpace*& half) {
    if (i.parts.size() != 2)
        return false;
    for (int k = 0; k < 2; ++k) {
        ball = i.parts[static_cast<std::size_t>(k)].as<Ball>();
        half = i.parts[static_cast<std::size_t>(1 - k)].as<HalfSpace>();
        if (ball && half)
            return true;
    }
    return false;
}

// Share of the ball kept by the half-space.
double cap_share(const Ball& b, const HalfSpace& h) {
    const double n = h.normal.norm();
    // signed distance of the cutting plane from the center, measured along
    // the direction pointing into the kept side
    double t = (h.offset - h.normal.dot(b.center)) / n;
    if (h.orientation == Orientation::lower)
        t = -t;
    return signed_cap_fraction(static_cast<int>(b.center.size()), b.radius, t);
}

double cap_volume(const Ball& b, const HalfSpace& h) {
    const int d = static_cast<int>(b.center.size());
    return unit_ball_volume(d) * std::pow(b.radius, d) * cap_share(b, h);
}

bool same_ball(const Ball& a, const Ball& b) { return a.radius == b.radius && a.center == b.center; }

// Vol(body) / Vol(enclosing), without forming volumes that under- or overflow
// in high dimension.
double relative_volume(const ConvexBody& body, const Ball& enclosing) {
    if (const auto* ball = body.as<Ball>(); ball && same_ball(*ball, enclosing))
        return 1.0;
    if (const auto* inter = body.as<Intersection>()) {
        const Ball* ball = nullptr;
        const HalfSpace* half = nullptr;
        if (as_ball_cap(*inter, ball, half) && same_ball(*ball, enclosing))
            return cap_share(*ball, *half);
    }
    return volume(body).value / volume(ConvexBody(enclosing)).value;
}

bool bounding_ball(const ConvexBody& body, Ball& out) {
    return std::visit(overloaded{
                          [&](const Ball& b) {
                              out = b;
                              return true;
                          },
                          [&](const Box& b) {
                              out.center = 0.5 * (b.lower + b.upper);
                              out.radius = 0.5 * (b.upper - b.lower).norm() * (1.0 + 1e-12) + 1e-300;
                              return true;
                          },
                          [&](const Polytope& p) {
                              if (!p.has_vertices())
                                  return false;
                              Vec c = Vec::Zero(p.dim);
                              for (const auto& v : p.vertices)
                                  c += v;
                              c /= static_cast<double>(p.vertices.size());
                              double r = 0.0;
                              for (const auto& v : p.vertices)
                                  r = std::max(r, (v - c).norm());
                              out.center = c;
                              out.radius = r * (1.0 + 1e-12) + 1e-300;
                              return true;
                          },
                          [&](const Intersection& i) {
                              bool found = false;
                              for (const auto& part : i.parts) {
                                  Ball cand;
                                  if (bounding_ball(part, cand) && (!found || cand.radius < out.radius)) {
                                      out = cand;
                                      found = true;
                                  }
                              }
                              return found;
                          },
                          [](const auto&) { return false; },
                      },
                      body.shape());
}

VolumeResult mc_result(std::uint64_t hits, std::uint64_t trials, double reference) {
    VolumeResult r;
    r.method = VolumeKind::monte_carlo;
    r.counts = {hits, trials};
    const auto [lo, hi] = r.counts.interval();
    r.value = r.counts.p_hat() * reference;
    r.ci_lo = lo * reference;
    r.ci_hi = hi * reference;
    r.ci_halfwidth = 0.5 * (hi - lo) * reference;
    return r;
}

VolumeResult mc_volume(const ConvexBody& body, const VolumeMethod& m) {
    require(m.n > 0, "volume: Monte Carlo needs n > 0");
    const int d = body.dimension();
    if (body.in_simplex_hyperplane()) {
        const auto hits = parallel_count(0, m.n, 0, [&](std::uint64_t i) {
            CounterRng rng(m.seed, i);
            Vec mu;
            draw_uniform_simplex(rng, d, mu);
            return contains(body, mu, 1e-12);
        });
        return mc_result(hits, m.n, simplex_volume(d));
    }
    Ball enclosing;
    if (!bounding_ball(body, enclosing))
        throw Error("volume: no bounding sampler for " + body.describe());
    const auto hits = parallel_count(0, m.n, 0, [&](std::uint64_t i) {
        CounterRng rng(m.seed, i);
        Vec z;
        draw_uniform_ball(rng, d, enclosing.radius, z);
        return contains(body, enclosing.center + z, 1e-12);
    });
    return mc_result(hits, m.n, unit_ball_volume(d) * std::pow(enclosing.radius, d));
}

double exact_volume(const ConvexBody& body) {
    return std::visit(
        overloaded{
            [](const Ball& b) {
                const int d = static_cast<int>(b.center.size());
                return std::exp(0.5 * d * std::log(std::numbers::pi) - std::lgamma(0.5 * d + 1.0) +
                                d * std::log(b.radius));
            },
            [](const Box& b) { return (b.upper - b.lower).prod(); },
            [](const ScaledSimplex& s) {
                const int d = static_cast<int>(s.shift.size());
                return std::pow(s.scale, d - 1) * simplex_volume(d);
            },
            [](const SimplexBall& s) {
                const int n = static_cast<int>(s.center.size()) - 1;
                return unit_ball_volume(n) * std::pow(s.radius, n);
            },
            [](const Polytope& p) { return polytope_volume(p, polytope_volume_kind(p)); },
            [](const Intersection& i) -> double {
                if (i.parts.size() == 1)
                    return exact_volume(i.parts.front());
                const Ball* b = nullptr;
                const HalfSpace* h = nullptr;
                if (as_ball_cap(i, b, h))
                    return cap_volume(*b, *h);
                throw Error("volume: no exact formula for this intersection");
            },
            [](const HalfSpace&) -> double { throw Error("volume: half-space is unbounded"); },
        },
        body.shape());
}

} // namespace

Polytope Polytope::from_vertices(std::vector<Vec> vertices, Ambient ambient) {
    if (vertices.empty())
        throw Error("empty set");
    Polytope p;
    p.dim = static_cast<int>(vertices.front().size());
    require(p.dim >= 1, "polytope: dimension must be >= 1");
    for (const auto& v : vertices) {
        check_dim(v, p.dim, "polytope vertex");
        require(v.allFinite(), "polytope: non-finite vertex");
        if (ambient == Ambient::simplex)
            require(on_simplex(v, 1e-12), "polytope: vertex off the probability simplex");
    }
    p.vertices = std::move(vertices);
    p.ambient = ambient;
    return p;
}

Polytope Polytope::from_constraints(int dimension, std::vector<LinearConstraint> constraints, Ambient ambient) {
    require(dimension >= 1, "polytope: dimension must be >= 1");
    if (constraints.empty() && ambient == Ambient::full_space)
        throw Error("polytope: no constraints (unbounded)");
    for (const auto& c : constraints) {
        check_dim(c.normal, dimension, "polytope constraint");
        require(c.normal.norm() > 0.0, "polytope: zero constraint normal");
    }
    Polytope p;
    p.dim = dimension;
    p.constraints = std::move(constraints);
    p.ambient = ambient;
    return p;
}

Eigen::MatrixXd Polytope::vertex_matrix() const {
    Eigen::MatrixXd m(dim, static_cast<Eigen::Index>(vertices.size()));
    for (std::size_t j = 0; j < vertices.size(); ++j)
        m.col(static_cast<Eigen::Index>(j)) = vertices[j];
    return m;
}

Polytope simplex_polytope(int dimension) {
    require(dimension >= 1, "simplex: dimension must be >= 1");
    std::vector<Vec> v;
    for (int k = 0; k < dimension; ++k)
        v.push_back(Vec::Unit(dimension, k));
    return Polytope::from_vertices(std::move(v), Ambient::simplex);
}

Polytope simplex_cap_above(int dimension, int k, double a) {
    require(dimension >= 2 && k >= 0 && k < dimension, "simplex cap: bad coordinate");
    require(a >= 0.0 && a <= 1.0, "simplex cap: threshold must lie in [0, 1]");
    std::vector<Vec> v{Vec::Unit(dimension, k)};
    for (int j = 0; j < dimension; ++j)
        if (j != k)
            v.push_back(a * Vec::Unit(dimension, k) + (1.0 - a) * Vec::Unit(dimension, j));
    Polytope p = Polytope::from_vertices(std::move(v), Ambient::simplex);
    p.constraints.push_back({-Vec::Unit(dimension, k), -a});
    return p;
}

Polytope simplex_cap_below(int dimension, int k, double b) {
    require(dimension >= 2 && k >= 0 && k < dimension, "simplex cap: bad coordinate");
    require(b >= 0.0 && b <= 1.0, "simplex cap: threshold must lie in [0, 1]");
    std::vector<Vec> v;
    for (int j = 0; j < dimension; ++j)
        if (j != k)
            v.push_back(Vec::Unit(dimension, j));
    if (b > 0.0)
        for (int j = 0; j < dimension; ++j)
            if (j != k)
                v.push_back(b * Vec::Unit(dimension, k) + (1.0 - b) * Vec::Unit(dimension, j));
    Polytope p = Polytope::from_vertices(std::move(v), Ambient::simplex);
    p.constraints.push_back({Vec::Unit(dimension, k), b});
    return p;
}

Polytope segment(const Vec& a, const Vec& b, Ambient ambient) { return Polytope::from_vertices({a, b}, ambient); }

int ConvexBody::dimension() const {
    return std::visit(overloaded{
                          [](const Ball& b) { return static_cast<int>(b.center.size()); },
                          [](const HalfSpace& h) { return static_cast<int>(h.normal.size()); },
                          [](const Box& b) { return static_cast<int>(b.lower.size()); },
                          [](const Polytope& p) { return p.dim; },
                          [](const ScaledSimplex& s) { return static_cast<int>(s.shift.size()); },
                          [](const SimplexBall& s) { return static_cast<int>(s.center.size()); },
                          [](const Intersection& i) {
                              if (i.parts.empty())
                                  throw Error("empty set");
                              return i.parts.front().dimension();
                          },
                      },
                      shape_);
}

bool ConvexBody::in_simplex_hyperplane() const {
    return std::visit(overloaded{
                          [](const Polytope& p) { return p.ambient == Ambient::simplex; },
                          [](const ScaledSimplex& s) { return std::abs(s.shift.sum() + s.scale - 1.0) <= 1e-12; },
                          [](const SimplexBall&) { return true; },
                          [](const Intersection& i) {
                              return std::any_of(i.parts.begin(), i.parts.end(),
                                                 [](const ConvexBody& b) { return b.in_simplex_hyperplane(); });
                          },
                          [](const auto&) { return false; },
                      },
                      shape_);
}

std::string ConvexBody::describe() const {
    std::ostringstream out;
    std::visit(overloaded{
                   [&](const Ball& b) { out << "Ball(d=" << b.center.size() << ", r=" << b.radius << ")"; },
                   [&](const HalfSpace& h) {
                       out << "HalfSpace(d=" << h.normal.size() << ", b=" << h.offset << ", "
                           << (h.orientation == Orientation::upper ? "upper" : "lower") << ")";
                   },
                   [&](const Box& b) { out << "Box(d=" << b.lower.size() << ")"; },
                   [&](const Polytope& p) {
                       out << "Polytope(d=" << p.dim << ", vertices=" << p.vertices.size()
                           << ", constraints=" << p.constraints.size()
                           << (p.ambient == Ambient::simplex ? ", simplex" : "") << ")";
                   },
                   [&](const ScaledSimplex& s) {
                       out << "ScaledSimplex(d=" << s.shift.size() << ", scale=" << s.scale << ")";
                   },
                   [&](const SimplexBall& s) {
                       out << "SimplexBall(d=" << s.center.size() << ", r=" << s.radius << ")";
                   },
                   [&](const Intersection& i) {
                       out << "Intersection(";
                       for (std::size_t k = 0; k < i.parts.size(); ++k)
                           out << (k ? ", " : "") << i.parts[k].describe();
                       out << ")";
                   },
               },
               shape_);
    return out.str();
}

void validate(const ConvexBody& body) {
    std::visit(overloaded{
                   [](const Ball& b) {
                       require(b.center.size() >= 1, "ball: dimension must be >= 1");
                       require(b.radius > 0.0, "ball: radius must be positive");
                   },
                   [](const HalfSpace& h) { require(h.normal.norm() > 0.0, "half-space: zero normal"); },
                   [](const Box& b) {
                       require(b.lower.size() == b.upper.size() && b.lower.size() >= 1, "box: bad dimensions");
                       if ((b.upper.array() < b.lower.array()).any())
                           throw Error("empty set");
                   },
                   [](const Polytope& p) {
                       if (p.vertices.empty() && p.constraints.empty() && p.ambient == Ambient::full_space)
                           throw Error("empty set");
                   },
                   [](const ScaledSimplex& s) { require(s.scale >= 0.0, "scaled simplex: negative scale"); },
                   [](const SimplexBall& s) {
                       require(s.radius >= 0.0, "simplex ball: negative radius");
                       require(std::abs(s.center.sum() - 1.0) <= 1e-12 * s.center.size(),
                               "simplex ball: center off the simplex hyperplane");
                   },
                   [](const Intersection& i) {
                       if (i.parts.empty())
                           throw Error("empty set");
                       const int d = i.parts.front().dimension();
                       for (const auto& part : i.parts) {
                           validate(part);
                           require(part.dimension() == d, "intersection: dimension mismatch");
                       }
                   },
               },
               body.shape());
}

Vec project_to_simplex(const Vec& x) {
    const auto d = x.size();
    require(d >= 1, "simplex projection: empty vector");
    std::vector<double> u(x.data(), x.data() + d);
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumsum = 0.0;
    double theta = 0.0;
    for (Eigen::Index k = 0; k < d; ++k) {
        cumsum += u[static_cast<std::size_t>(k)];
        const double t = (cumsum - 1.0) / static_cast<double>(k + 1);
        if (u[static_cast<std::size_t>(k)] - t > 0.0)
            theta = t;
    }
    return (x.array() - theta).max(0.0);
}

Vec project(const ConvexBody& body, const Vec& x) {
    check_dim(x, body.dimension(), "project");
    return std::visit(overloaded{
                          [&](const Ball& b) -> Vec {
                              const Vec diff = x - b.center;
                              const double n = diff.norm();
                              return n <= b.radius ? x : Vec(b.center + (b.radius / n) * diff);
                          },
                          [&](const HalfSpace& h) { return project_halfspace(h, x); },
                          [&](const Box& b) -> Vec { return x.cwiseMax(b.lower).cwiseMin(b.upper); },
                          [&](const Polytope& p) { return project_polytope(p, x); },
                          [&](const ScaledSimplex& s) -> Vec {
                              if (s.scale == 0.0)
                                  return s.shift;
                              return s.shift + s.scale * project_to_simplex((x - s.shift) / s.scale);
                          },
                          [&](const SimplexBall& s) { return project_simplex_ball(s, x); },
                          [&](const Intersection& i) {
                              if (i.parts.empty())
                                  throw Error("empty set");
                              std::vector<Projector> sets;
                              for (const auto& part : i.parts)
                                  sets.emplace_back([&part](const Vec& y) { return project(part, y); });
                              return dykstra(sets, x);
                          },
                      },
                      body.shape());
}

double distance_point_to_convex(const Vec& x, const ConvexBody& body) {
    validate(body);
    return (project(body, x) - x).norm();
}

bool contains(const ConvexBody& body, const Vec& x, double tol) {
    check_dim(x, body.dimension(), "contains");
    return std::visit(overloaded{
                          [&](const Ball& b) { return (x - b.center).norm() <= b.radius + tol; },
                          [&](const HalfSpace& h) {
                              const double s = h.normal.dot(x) - h.offset;
                              const double slack = tol * std::max(1.0, h.normal.norm());
                              return h.orientation == Orientation::upper ? s >= -slack : s <= slack;
                          },
                          [&](const Box& b) {
                              return (x.array() >= b.lower.array() - tol).all() &&
                                     (x.array() <= b.upper.array() + tol).all();
                          },
                          [&](const Polytope& p) { return polytope_contains(p, x, tol); },
                          [&](const ScaledSimplex& s) {
                              const Vec y = x - s.shift;
                              return std::abs(y.sum() - s.scale) <= tol * std::max<double>(1.0, x.size()) &&
                                     y.minCoeff() >= -tol;
                          },
                          [&](const SimplexBall& s) {
                              return std::abs(x.sum() - 1.0) <= tol * std::max<double>(1.0, x.size()) &&
                                     (x - s.center).norm() <= s.radius + tol;
                          },
                          [&](const Intersection& i) {
                              return std::all_of(i.parts.begin(), i.parts.end(),
                                                 [&](const ConvexBody& b) { return contains(b, x, tol); });
                          },
                      },
                      body.shape());
}

double support(const ConvexBody& body, const Vec& u) {
    check_dim(u, body.dimension(), "support");
    return std::visit(
        overloaded{
            [&](const Ball& b) { return b.center.dot(u) + b.radius * u.norm(); },
            [&](const Box& b) { return b.lower.cwiseProduct(u).cwiseMax(b.upper.cwiseProduct(u)).sum(); },
            [&](const Polytope& p) {
                if (p.has_vertices()) {
                    double best = -std::numeric_limits<double>::infinity();
                    for (const auto& v : p.vertices)
                        best = std::max(best, v.dot(u));
                    return best;
                }
                return linear_support(p.dim, p.constraints, p.ambient == Ambient::simplex, u);
            },
            [&](const ScaledSimplex& s) { return s.shift.dot(u) + s.scale * u.maxCoeff(); },
            [&](const SimplexBall& s) {
                const Vec centered = u.array() - u.mean();
                return s.center.dot(u) + s.radius * centered.norm();
            },
            [&](const HalfSpace& h) -> double {
                // bounded only along the inward normal
                const Vec inward = h.orientation == Orientation::upper ? Vec(-h.normal) : h.normal;
                const double t = u.dot(inward) / inward.squaredNorm();
                if (t < 0.0 || (u - t * inward).norm() > 1e-12 * std::max(1.0, u.norm()))
                    throw Error("support: body is unbounded in the requested direction");
                return t * (h.orientation == Orientation::upper ? -h.offset : h.offset);
            },
            [&](const Intersection& i) {
                std::vector<LinearConstraint> cons;
                bool simplex = false;
                if (!collect_linear(i, cons, simplex))
                    throw Error("support: unsupported representation for " + body.describe());
                return linear_support(body.dimension(), cons, simplex, u);
            },
        },
        body.shape());
}

double halfspace_gap(const HalfSpace& upper, const HalfSpace& lower) {
    require(upper.normal.size() == lower.normal.size(), "halfspace_gap: dimension mismatch");
    const double nu = upper.normal.norm();
    const double nl = lower.normal.norm();
    require(nu > 0.0 && nl > 0.0, "halfspace_gap: zero normal");
    if ((upper.normal / nu - lower.normal / nl).norm() > 1e-12)
        throw Error("not parallel");
    // rescale the lower offset to the upper normal
    const double b2 = upper.offset / nu;
    const double b1 = lower.offset / nl;
    if (b2 <= b1)
        throw Error("overlapping half-spaces");
    return b2 - b1;
}

PairDistance polytope_distance(const Polytope& p, const Polytope& q) {
    return body_distance(ConvexBody(p), ConvexBody(q));
}

PairDistance body_distance(const ConvexBody& a, const ConvexBody& b) {
    validate(a);
    validate(b);
    const int d = a.dimension();
    require(b.dimension() == d, "distance: dimension mismatch");
    const auto* pa = a.as<Polytope>();
    const auto* pb = b.as<Polytope>();
    PairDistance out;
    if (pa && pb && pa->has_vertices() && pb->has_vertices()) {
        const auto ma = static_cast<Eigen::Index>(pa->vertices.size());
        const auto mb = static_cast<Eigen::Index>(pb->vertices.size());
        Eigen::MatrixXd diff(d, ma * mb);
        for (Eigen::Index i = 0; i < ma; ++i)
            for (Eigen::Index j = 0; j < mb; ++j)
                diff.col(i * mb + j) =
                    pa->vertices[static_cast<std::size_t>(i)] - pb->vertices[static_cast<std::size_t>(j)];
        const auto res = detail::min_norm_point(diff);
        out.a = Vec::Zero(d);
        out.b = Vec::Zero(d);
        for (Eigen::Index i = 0; i < ma; ++i)
            for (Eigen::Index j = 0; j < mb; ++j) {
                const double w = res.weights(i * mb + j);
                out.a += w * pa->vertices[static_cast<std::size_t>(i)];
                out.b += w * pb->vertices[static_cast<std::size_t>(j)];
            }
        out.value = res.point.norm();
        out.iterations = res.iterations;
        return out;
    }

    // alternating projections, certified by a separating-direction lower bound
    Vec x = project(a, Vec::Zero(d));
    Vec y = project(b, x);
    x = project(a, y);
    double gap = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= kMaxIterations; ++it) {
        const Vec y_next = project(b, x);
        const Vec x_next = project(a, y_next);
        const double move = (x_next - x).norm() + (y_next - y).norm();
        x = x_next;
        y = y_next;
        const double dist = (x - y).norm();
        if (dist > 1e-14) {
            const Vec u = (x - y) / dist;
            try {
                const double lower = -support(a, -u) - support(b, u);
                gap = dist - std::max(0.0, lower);
            } catch (const Error&) {
                gap = move;
            }
        } else {
            gap = dist;
        }
        if (gap <= 1e-8 || move <= 1e-15 * (1.0 + x.norm())) {
            out.a = x;
            out.b = y;
            out.value = dist;
            out.iterations = it;
            return out;
        }
    }
    throw ConvergenceError("distance: alternating projections did not converge", (x - y).norm(), gap);
}

bool delta_extension_contains(const ConvexBody& body, double delta, const Vec& x) {
    require(delta > 0.0, "delta extension: delta must be positive");
    return distance_point_to_convex(x, body) < delta - 1e-12;
}

ConvexBody minkowski_combine(const ConvexBody& a, const ConvexBody& b, double lambda) {
    require(lambda >= 0.0 && lambda <= 1.0, "minkowski_combine: lambda must lie in [0, 1]");
    require(a.dimension() == b.dimension(), "minkowski_combine: dimension mismatch");
    const auto* ba = a.as<Box>();
    const auto* bb = b.as<Box>();
    if (ba && bb) {
        validate(a);
        validate(b);
        return Box{lambda * ba->lower + (1.0 - lambda) * bb->lower, lambda * ba->upper + (1.0 - lambda) * bb->upper};
    }
    const auto* pa = a.as<Polytope>();
    const auto* pb = b.as<Polytope>();
    if (pa && pb && pa->has_vertices() && pb->has_vertices()) {
        require(pa->dim <= 6, "minkowski_combine: V-rep polytopes limited to d <= 6");
        std::vector<Vec> sums;
        sums.reserve(pa->vertices.size() * pb->vertices.size());
        for (const auto& u : pa->vertices)
            for (const auto& v : pb->vertices)
                sums.push_back(lambda * u + (1.0 - lambda) * v);
        const bool simplex = pa->ambient == Ambient::simplex && pb->ambient == Ambient::simplex;
        Polytope out;
        out.dim = pa->dim;
        out.vertices = std::move(sums);
        out.ambient = simplex ? Ambient::simplex : Ambient::full_space;
        return out;
    }
    throw Error("minkowski_combine: unsupported representation combination");
}

double unit_ball_volume(int dimension) {
    require(dimension >= 0, "ball volume: negative dimension");
    const double d = dimension;
    return std::exp(0.5 * d * std::log(std::numbers::pi) - std::lgamma(0.5 * d + 1.0));
}

double simplex_volume(int dimension) {
    require(dimension >= 1, "simplex volume: dimension must be >= 1");
    const double d = dimension;
    return std::exp(0.5 * std::log(d) - std::lgamma(d));
}

bool has_exact_volume(const ConvexBody& body) {
    return std::visit(overloaded{
                          [](const HalfSpace&) { return false; },
                          [](const Polytope& p) { return polytope_volume_kind(p) != PolyVolume::none; },
                          [](const Intersection& i) {
                              const Ball* b = nullptr;
                              const HalfSpace* h = nullptr;
                              return (i.parts.size() == 1 && has_exact_volume(i.parts.front())) ||
                                     as_ball_cap(i, b, h);
                          },
                          [](const auto&) { return true; },
                      },
                      body.shape());
}

VolumeResult volume(const ConvexBody& body, const VolumeMethod& method) {
    validate(body);
    if (method.kind == VolumeKind::monte_carlo)
        return mc_volume(body, method);
    VolumeResult r;
    r.value = exact_volume(body);
    r.ci_lo = r.ci_hi = r.value;
    return r;
}

BmReport bm_check(const ConvexBody& a, const ConvexBody& b, double lambda, const VolumeMethod& method) {
    require(lambda >= 0.0 && lambda <= 1.0, "bm_check: lambda must lie in [0, 1]");
    const ConvexBody c = minkowski_combine(a, b, lambda);
    auto vol = [&](const ConvexBody& body, std::uint64_t stream) {
        if (method.kind == VolumeKind::exact && has_exact_volume(body))
            return volume(body);
        require(method.kind == VolumeKind::monte_carlo, "bm_check: no exact volume; pass a Monte Carlo method");
        VolumeMethod m = method;
        m.seed.stream_id = method.seed.stream_id * 3 + stream;
        return volume(body, m);
    };
    const VolumeResult va = vol(a, 0);
    const VolumeResult vb = vol(b, 1);
    const VolumeResult vc = vol(c, 2);
    const bool exact =
        va.method == VolumeKind::exact && vb.method == VolumeKind::exact && vc.method == VolumeKind::exact;
    const int n = a.in_simplex_hyperplane() ? a.dimension() - 1 : a.dimension();

    BmReport r;
    r.method = exact ? VolumeKind::exact : VolumeKind::monte_carlo;
    auto geo = [&](double x, double y) { return std::pow(x, lambda) * std::pow(y, 1.0 - lambda); };
    auto lin = [&](double x, double y) {
        return lambda * std::pow(x, 1.0 / n) + (1.0 - lambda) * std::pow(y, 1.0 / n);
    };
    r.lhs = vc.value;
    r.rhs = geo(va.value, vb.value);
    r.lhs_root = std::pow(vc.value, 1.0 / n);
    r.rhs_root = lin(va.value, vb.value);
    constexpr double rel = 1e-12;
    if (exact) {
        r.holds = r.lhs >= r.rhs * (1.0 - rel);
        r.holds_root = r.lhs_root >= r.rhs_root * (1.0 - rel);
        r.equality = std::abs(r.lhs - r.rhs) <= rel * std::max(r.lhs, r.rhs);
        r.equality_root = std::abs(r.lhs_root - r.rhs_root) <= rel * std::max(r.lhs_root, r.rhs_root);
    } else {
        r.holds = vc.ci_hi >= geo(va.ci_lo, vb.ci_lo);
        r.holds_root = std::pow(vc.ci_hi, 1.0 / n) >= lin(va.ci_lo, vb.ci_lo);
    }
    return r;
}

SeparationReport separation_bound_check(const ConvexBody& a, const ConvexBody& b, const Ball& enclosing,
                                        double delta, const VolumeMethod& method) {
    require(delta >= 0.0, "separation check: delta must be >= 0");
    validate(ConvexBody(enclosing));
    const int d = static_cast<int>(enclosing.center.size());
    require(a.dimension() == d && b.dimension() == d, "separation check: dimension mismatch");

    SeparationReport r;
    r.distance = body_distance(a, b).value;
    if (r.distance < delta - 1e-9) {
        std::ostringstream msg;
        msg << "dist(A, B) = " << r.distance << " < delta = " << delta;
        throw HypothesisViolated(msg.str());
    }
    r.bound = bound_lemma1(delta, enclosing.radius, d);
    r.method = method.kind;
    if (method.kind == VolumeKind::exact) {
        r.fraction_a = relative_volume(a, enclosing);
        r.fraction_b = relative_volume(b, enclosing);
        r.min_fraction = std::min(r.fraction_a, r.fraction_b);
        r.min_fraction_ci_lo = r.min_fraction_ci_hi = r.min_fraction;
        r.holds = r.min_fraction <= r.bound * (1.0 + 1e-12);
        return r;
    }

    require(method.n > 0, "separation check: Monte Carlo needs n > 0");
    const auto counts = parallel_count_events(0, method.n, 0, 2, [&](std::uint64_t i) {
        CounterRng rng(method.seed, i);
        thread_local Vec z;
        draw_uniform_ball(rng, d, enclosing.radius, z);
        z += enclosing.center;
        return (contains(a, z) ? 1u : 0u) | (contains(b, z) ? 2u : 0u);
    });
    const MCEstimate ea{counts[0], method.n};
    const MCEstimate eb{counts[1], method.n};
    r.fraction_a = ea.p_hat();
    r.fraction_b = eb.p_hat();
    r.min_fraction = std::min(r.fraction_a, r.fraction_b);
    r.min_fraction_ci_lo = std::min(ea.ci_lo(), eb.ci_lo());
    r.min_fraction_ci_hi = std::min(ea.ci_hi(), eb.ci_hi());
    r.holds = r.min_fraction <= r.bound || r.min_fraction_ci_lo <= r.bound;
    return r;
}

CapFraction cap_fraction(int dimension, double radius, double t) {
    require(dimension >= 1, "cap_fraction: dimension must be >= 1");
    require(radius > 0.0, "cap_fraction: radius must be positive");
    require(t >= 0.0, "cap_fraction: t must be >= 0");
    if (t > radius)
        return {0.0, true};
    const double s = t / radius;
    const double x = 1.0 - s * s;
    if (x <= 0.0)
        return {0.0, false};
    return {0.5 * boost::math::ibeta(0.5 * (dimension + 1), 0.5, x), false};
}

double signed_cap_fraction(int dimension, double radius, double t) {
    if (t >= 0.0)
        return cap_fraction(dimension, radius, t).value;
    return 1.0 - cap_fraction(dimension, radius, -t).value;
}

bool representations_agree(const Polytope& p, std::size_t samples, const SeedSpec& seed, double tol) {
    if (!p.has_vertices() || p.constraints.empty())
        return true;
    for (const auto& v : p.vertices)
        for (const auto& c : p.constraints)
            if (c.normal.dot(v) > c.offset + tol)
                return false;
    for (const auto& c : p.constraints) {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& v : p.vertices)
            best = std::max(best, c.normal.dot(v));
        if (std::abs(best - c.offset) > tol)
            return false;
    }
    Polytope hrep = Polytope::from_constraints(p.dim, p.constraints, p.ambient);
    Polytope vrep = Polytope::from_vertices(p.vertices, p.ambient);
    Ball box;
    bounding_ball(ConvexBody(vrep), box);
    box.radius *= 1.5;
    for (std::size_t i = 0; i < samples; ++i) {
        CounterRng rng(seed, i);
        Vec z;
        if (p.ambient == Ambient::simplex) {
            draw_uniform_simplex(rng, p.dim, z);
        } else {
            draw_uniform_ball(rng, p.dim, box.radius, z);
            z += box.center;
        }
        const bool in_h = polytope_contains(hrep, z, 1e-12);
        const double dist = (project_polytope(vrep, z) - z).norm();
        // skip points too close to the boundary to classify
        double margin = std::numeric_limits<double>::infinity();
        for (const auto& c : hrep.constraints)
            margin = std::min(margin, std::abs(c.normal.dot(z) - c.offset) / c.normal.norm());
        if (margin < 1e-7 && dist < 1e-7)
            continue;
        if (in_h != (dist <= 1e-9))
            return false;
    }
    return true;
}

} // namespace risklab
