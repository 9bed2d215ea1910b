#include "risklab/preferences.hpp"

#include "risklab/detail/simplex_lp.hpp"
#include "risklab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace risklab {

namespace {

void check_prior(const Vec& mu, bool strictly_positive) {
    require(mu.size() >= 1, "prior: empty vector");
    require(mu.allFinite(), "prior: non-finite entry");
    require(std::abs(mu.sum() - 1.0) <= 1e-12 * std::max<double>(1.0, mu.size()), "prior: entries must sum to 1");
    require(mu.minCoeff() >= 0.0, "prior: negative entry");
    if (strictly_positive)
        require(mu.minCoeff() > 0.0, "prior: log and CRRA agents need strictly positive priors");
}

void check_act(const PreferenceSpec& pref, const Act& f) {
    if (f.size() != pref.dimension()) {
        std::ostringstream msg;
        msg << "act has " << f.size() << " states, preference has " << pref.dimension();
        throw Error(msg.str());
    }
    if (!pref.in_domain(f)) {
        std::ostringstream msg;
        msg << "act [" << f.transpose() << "] outside the domain of " << pref.describe();
        throw DomainError(msg.str());
    }
}

double expected_log(const Vec& mu, const Act& f) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < f.size(); ++k)
        if (mu(k) != 0.0)
            s += mu(k) * std::log(f(k));
    return s;
}

Polytope normalized_vertices(const std::vector<Vec>& generators) {
    std::vector<Vec> v;
    for (const auto& g : generators)
        v.push_back(g / g.sum());
    return Polytope::from_vertices(std::move(v), Ambient::simplex);
}

} // namespace

PreferenceSpec PreferenceSpec::cobb_douglas(Vec prior) {
    check_prior(prior, true);
    PreferenceSpec p;
    p.kind_ = PreferenceKind::cobb_douglas;
    p.dim_ = static_cast<int>(prior.size());
    p.prior_ = std::move(prior);
    return p;
}

PreferenceSpec PreferenceSpec::crra(Vec prior, double gamma) {
    require(gamma >= 0.0 && std::isfinite(gamma), "crra: gamma must be >= 0");
    check_prior(prior, gamma > 0.0);
    PreferenceSpec p;
    p.kind_ = PreferenceKind::crra;
    p.dim_ = static_cast<int>(prior.size());
    p.prior_ = std::move(prior);
    p.gamma_ = gamma;
    return p;
}

PreferenceSpec PreferenceSpec::meu(Polytope priors, Bernoulli bernoulli) {
    if (!priors.has_vertices())
        throw Error("meu: prior set needs a vertex list");
    for (const auto& v : priors.vertices)
        check_prior(v, false);
    PreferenceSpec p;
    p.kind_ = PreferenceKind::meu;
    p.dim_ = priors.dim;
    priors.ambient = Ambient::simplex;
    p.priors_ = std::move(priors);
    p.bernoulli_ = bernoulli;
    return p;
}

PreferenceSpec PreferenceSpec::risk_neutral(Vec prior) {
    return meu(Polytope::from_vertices({std::move(prior)}, Ambient::simplex), Bernoulli::linear);
}

bool PreferenceSpec::needs_positive() const {
    switch (kind_) {
    case PreferenceKind::cobb_douglas:
        return true;
    case PreferenceKind::crra:
        return gamma_ >= 1.0;
    case PreferenceKind::meu:
        return bernoulli_ == Bernoulli::log;
    }
    return true;
}

bool PreferenceSpec::needs_nonnegative() const {
    return needs_positive() || (kind_ == PreferenceKind::crra && gamma_ > 0.0);
}

bool PreferenceSpec::in_domain(const Act& f) const {
    if (f.size() != dim_ || !f.allFinite())
        return false;
    if (needs_positive())
        return f.minCoeff() > 0.0;
    if (needs_nonnegative())
        return f.minCoeff() >= 0.0;
    return true;
}

std::string PreferenceSpec::describe() const {
    std::ostringstream out;
    switch (kind_) {
    case PreferenceKind::cobb_douglas:
        out << "cobb-douglas(d=" << dim_ << ")";
        break;
    case PreferenceKind::crra:
        out << "crra(d=" << dim_ << ", gamma=" << gamma_ << ")";
        break;
    case PreferenceKind::meu:
        out << "meu(d=" << dim_ << ", priors=" << priors_.vertices.size() << ", "
            << (bernoulli_ == Bernoulli::linear ? "linear" : "log") << ")";
        break;
    }
    return out.str();
}

double bernoulli_value(const PreferenceSpec& pref, double x) {
    switch (pref.kind()) {
    case PreferenceKind::cobb_douglas:
        return std::log(x);
    case PreferenceKind::crra: {
        const double g = pref.gamma();
        if (g == 1.0)
            return std::log(x);
        return std::pow(x, 1.0 - g) / (1.0 - g);
    }
    case PreferenceKind::meu:
        return pref.bernoulli() == Bernoulli::linear ? x : std::log(x);
    }
    return 0.0;
}

double utility(const PreferenceSpec& pref, const Act& f) {
    check_act(pref, f);
    switch (pref.kind()) {
    case PreferenceKind::cobb_douglas:
        return expected_log(pref.prior(), f);
    case PreferenceKind::crra: {
        const double g = pref.gamma();
        if (g == 1.0)
            return expected_log(pref.prior(), f);
        if (g == 0.0)
            return pref.prior().dot(f);
        return pref.prior().dot(f.array().pow(1.0 - g).matrix()) / (1.0 - g);
    }
    case PreferenceKind::meu: {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& mu : pref.priors().vertices)
            best = std::min(best, pref.bernoulli() == Bernoulli::linear ? mu.dot(f) : expected_log(mu, f));
        return best;
    }
    }
    return 0.0;
}

double utility_cd_exponential(const PreferenceSpec& pref, const Act& f) {
    require(pref.kind() == PreferenceKind::cobb_douglas, "exponential form exists for Cobb-Douglas only");
    return std::exp(utility(pref, f));
}

bool strictly_prefers(const PreferenceSpec& pref, const Act& g, const Act& f) {
    return utility(pref, g) > utility(pref, f) + kTolStrict;
}

bool eps_ucs_contains(const PreferenceSpec& pref, const Act& f, const Act& g, double eps) {
    require(eps >= 0.0 && eps < 1.0, "eps must lie in [0, 1)");
    return strictly_prefers(pref, (1.0 - eps) * g, f);
}

Vec utility_gradient(const PreferenceSpec& pref, const Act& f) {
    check_act(pref, f);
    switch (pref.kind()) {
    case PreferenceKind::cobb_douglas:
        return pref.prior().cwiseQuotient(f);
    case PreferenceKind::crra:
        if (pref.gamma() == 0.0)
            return pref.prior();
        if (f.minCoeff() <= 0.0)
            throw DomainError("crra gradient needs strictly positive consumption");
        return pref.prior().cwiseProduct(f.array().pow(-pref.gamma()).matrix());
    case PreferenceKind::meu:
        if (pref.priors().vertices.size() != 1)
            throw Error("unsupported variant: max-min utility with several priors is not differentiable");
        return pref.bernoulli() == Bernoulli::linear ? pref.priors().vertices.front()
                                                     : Vec(pref.priors().vertices.front().cwiseQuotient(f));
    }
    return {};
}

Polytope belief_set(const PreferenceSpec& pref, const Act& f) {
    check_act(pref, f);
    if (pref.kind() != PreferenceKind::meu) {
        if (pref.needs_nonnegative() && f.minCoeff() <= 0.0)
            throw DomainError("belief set needs an act in the interior of the domain");
        return normalized_vertices({utility_gradient(pref, f)});
    }
    const auto& verts = pref.priors().vertices;
    std::vector<double> values;
    for (const auto& mu : verts)
        values.push_back(pref.bernoulli() == Bernoulli::linear ? mu.dot(f) : expected_log(mu, f));
    const double best = *std::min_element(values.begin(), values.end());
    std::vector<Vec> face;
    for (std::size_t k = 0; k < verts.size(); ++k)
        if (values[k] <= best + kFaceTol)
            face.push_back(pref.bernoulli() == Bernoulli::linear ? verts[k] : Vec(verts[k].cwiseQuotient(f)));
    return normalized_vertices(face);
}

ExtensionReport belief_extension_report(const std::vector<Polytope>& sets, double delta) {
    require(delta > 0.0, "belief extension: delta must be positive");
    if (sets.empty())
        throw Error("empty set");
    const int d = sets.front().dim;
    for (const auto& s : sets) {
        if (!s.has_vertices())
            throw Error("empty set");
        require(s.dim == d, "belief extension: dimension mismatch");
    }

    ExtensionReport rep;
    if (sets.size() == 1) {
        rep.value = rep.lower_bound = 0.0;
        rep.witness = sets.front().vertices.front();
    } else {
        // pairwise half-distances bound the minimum from below; with two sets
        // the midpoint of a closest pair attains it
        std::vector<Vec> starts;
        for (std::size_t i = 0; i < sets.size(); ++i)
            for (std::size_t j = i + 1; j < sets.size(); ++j) {
                const auto pd = polytope_distance(sets[i], sets[j]);
                rep.lower_bound = std::max(rep.lower_bound, 0.5 * pd.value);
                starts.push_back(0.5 * (pd.a + pd.b));
            }
        std::vector<ConvexBody> bodies(sets.begin(), sets.end());
        auto phi = [&](const Vec& nu, Vec& grad) {
            double worst = -1.0;
            for (const auto& b : bodies) {
                const Vec p = project(b, nu);
                const double dist = (nu - p).norm();
                if (dist > worst) {
                    worst = dist;
                    grad = dist > 0.0 ? Vec((nu - p) / dist) : Vec(Vec::Zero(d));
                }
            }
            return worst;
        };
        Vec grad;
        rep.value = std::numeric_limits<double>::infinity();
        if (sets.size() == 2) {
            rep.witness = starts.front();
            rep.value = phi(rep.witness, grad);
        } else {
            Vec centroid = Vec::Zero(d);
            for (const auto& s : sets) {
                Vec c = Vec::Zero(d);
                for (const auto& v : s.vertices)
                    c += v;
                centroid += c / static_cast<double>(s.vertices.size());
            }
            starts.push_back(centroid / static_cast<double>(sets.size()));
            struct Cut {
                Vec grad;
                double offset; // phi(nu) >= grad.nu + offset
            };
            std::vector<Cut> cuts;
            auto add_cut = [&](const Vec& nu, double v, const Vec& g) {
                cuts.push_back({g, v - g.dot(nu)});
                if (v < rep.value) {
                    rep.value = v;
                    rep.witness = nu;
                }
            };
            for (const auto& start : starts) {
                Vec nu = project_to_simplex(start);
                const double scale = std::max(phi(nu, grad), 1e-3);
                for (int k = 0; k < 3000 && rep.value > 0.0; ++k) {
                    const double v = phi(nu, grad);
                    if (k % 100 == 0) {
                        add_cut(nu, v, grad);
                    } else if (v < rep.value) {
                        rep.value = v;
                        rep.witness = nu;
                    }
                    if (v == 0.0)
                        break;
                    nu = project_to_simplex(nu - (scale / std::sqrt(k + 1.0)) * grad);
                }
            }
            if (rep.value > 0.0)
                add_cut(rep.witness, phi(rep.witness, grad), grad);
            // Kelley cutting planes: the LP minimum of the cut model is a certified lower bound
            for (int it = 0; it < 200 && rep.value > 0.0; ++it) {
                const auto n_cuts = static_cast<Eigen::Index>(cuts.size());
                detail::LpProblem lp;
                lp.objective = Vec::Zero(d + 1);
                lp.objective(d) = -1.0;
                lp.a_ub = Eigen::MatrixXd::Zero(n_cuts, d + 1);
                lp.b_ub.resize(n_cuts);
                for (Eigen::Index k = 0; k < n_cuts; ++k) {
                    lp.a_ub.row(k).head(d) = cuts[static_cast<std::size_t>(k)].grad.transpose();
                    lp.a_ub(k, d) = -1.0;
                    lp.b_ub(k) = -cuts[static_cast<std::size_t>(k)].offset;
                }
                lp.a_eq = Eigen::MatrixXd::Zero(1, d + 1);
                lp.a_eq.row(0).head(d).setOnes();
                lp.b_eq = Vec::Ones(1);
                const auto sol = detail::solve_lp(lp);
                if (sol.status != detail::LpStatus::optimal)
                    break;
                rep.lower_bound = std::max(rep.lower_bound, -sol.objective);
                if (rep.value - rep.lower_bound <= 1e-11 * std::max(1.0, rep.value))
                    break;
                const Vec nu = project_to_simplex(sol.x.head(d));
                add_cut(nu, phi(nu, grad), grad);
            }
            rep.lower_bound = std::min(rep.lower_bound, rep.value);
        }
    }

    constexpr double band = 1e-9;
    if (rep.value < delta - band) {
        rep.empty = false;
    } else if (rep.lower_bound > delta + band) {
        rep.empty = true;
    } else {
        std::ostringstream msg;
        msg << "min max distance in [" << rep.lower_bound << ", " << rep.value << "], delta " << delta;
        throw BoundaryIndeterminate(msg.str(), rep.value);
    }
    return rep;
}

bool belief_set_extension_empty(const std::vector<Polytope>& sets, double delta) {
    return belief_extension_report(sets, delta).empty;
}

} // namespace risklab
