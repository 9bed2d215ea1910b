#include "risklab/economy.hpp"

#include "risklab/detail/simplex_lp.hpp"
#include "risklab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace risklab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool all_smooth_crra(const EconomySpec& econ) {
    for (const auto& a : econ.agents()) {
        const auto& p = a.preference;
        if (p.kind() == PreferenceKind::cobb_douglas)
            continue;
        if (p.kind() == PreferenceKind::crra && p.gamma() > 0.0)
            continue;
        return false;
    }
    return true;
}

bool all_linear(const EconomySpec& econ) {
    for (const auto& a : econ.agents()) {
        const auto& p = a.preference;
        if (p.kind() == PreferenceKind::meu && p.bernoulli() == Bernoulli::linear)
            continue;
        if (p.kind() == PreferenceKind::crra && p.gamma() == 0.0)
            continue;
        return false;
    }
    return true;
}

double curvature(const PreferenceSpec& p) { return p.kind() == PreferenceKind::cobb_douglas ? 1.0 : p.gamma(); }

// Per-state split maximizing sum_i weight_i * mu_is * U_i(x_is) with
// sum_i x_is = total. FOC: x_is = (weight_i mu_is / nu)^(1/gamma_i).
void weighted_split(const EconomySpec& econ, const Vec& weights, const Vec& total, Allocation& x) {
    const auto n = static_cast<Eigen::Index>(econ.size());
    const int d = econ.dimension();
    x.resize(n, d);
    std::vector<double> g(static_cast<std::size_t>(n));
    bool common = true;
    for (Eigen::Index i = 0; i < n; ++i) {
        g[static_cast<std::size_t>(i)] = curvature(econ.agent(static_cast<std::size_t>(i)).preference);
        common = common && g[static_cast<std::size_t>(i)] == g[0];
    }
    for (int s = 0; s < d; ++s) {
        if (common) {
            double denom = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                const double a = weights(i) * econ.agent(static_cast<std::size_t>(i)).preference.prior()(s);
                x(i, s) = std::pow(a, 1.0 / g[0]);
                denom += x(i, s);
            }
            x.col(s) *= total(s) / denom;
            continue;
        }
        // bisection on log nu
        auto amount = [&](double log_nu) {
            double sum = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                const double a = weights(i) * econ.agent(static_cast<std::size_t>(i)).preference.prior()(s);
                sum += std::exp((std::log(a) - log_nu) / g[static_cast<std::size_t>(i)]);
            }
            return sum;
        };
        double lo = -1.0;
        double hi = 1.0;
        while (amount(lo) < total(s))
            lo -= 2.0 * (hi - lo);
        while (amount(hi) > total(s))
            hi += 2.0 * (hi - lo);
        for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
            const double mid = 0.5 * (lo + hi);
            (amount(mid) > total(s) ? lo : hi) = mid;
        }
        const double log_nu = 0.5 * (lo + hi);
        double sum = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double a = weights(i) * econ.agent(static_cast<std::size_t>(i)).preference.prior()(s);
            x(i, s) = std::exp((std::log(a) - log_nu) / g[static_cast<std::size_t>(i)]);
            sum += x(i, s);
        }
        x.col(s) *= total(s) / sum;
    }
}

Vec margins(const EconomySpec& econ, const Allocation& x, const Vec& base) {
    Vec h(static_cast<Eigen::Index>(econ.size()));
    for (std::size_t i = 0; i < econ.size(); ++i) {
        const Act xi = act_of(x, i);
        const auto& p = econ.agent(i).preference;
        h(static_cast<Eigen::Index>(i)) = p.in_domain(xi) ? utility(p, xi) - base(static_cast<Eigen::Index>(i)) : -kInf;
    }
    return h;
}

// Smooth agents: dual over planner weights. x below is the shaved bundle (1-eps) g.
ScitovskyResult solve_smooth(const EconomySpec& econ, const Vec& base, const Vec& shaved_total, double eps) {
    const auto n = static_cast<Eigen::Index>(econ.size());
    ScitovskyResult res;
    Allocation x;
    auto dual_value = [&](const Vec& lambda, const Vec& h) { return lambda.dot(h); };

    if (n == 2) {
        res.method = ScitovskyMethod::dual_bisection;
        double lo = 0.0;
        double hi = 1.0;
        Vec best_h;
        Allocation best_x;
        double best = -kInf;
        double upper = kInf;
        for (int it = 0; it < 200; ++it) {
            const double l = 0.5 * (lo + hi);
            const Vec lambda = (Vec(2) << l, 1.0 - l).finished();
            weighted_split(econ, lambda, shaved_total, x);
            const Vec h = margins(econ, x, base);
            const double m = h.minCoeff();
            if (m > best) {
                best = m;
                best_x = x;
            }
            upper = std::min(upper, dual_value(lambda, h));
            res.iterations = it + 1;
            if (h(0) < h(1))
                lo = l;
            else
                hi = l;
            if (hi - lo < 1e-16 || upper - best <= 1e-13)
                break;
        }
        res.value = best;
        res.upper_bound = upper;
        res.split = best_x / (1.0 - eps);
        return res;
    }

    res.method = ScitovskyMethod::dual_mirror;
    Vec lambda = Vec::Constant(n, 1.0 / static_cast<double>(n));
    double best = -kInf;
    double upper = kInf;
    Allocation best_x;
    for (int it = 0; it < 20000; ++it) {
        weighted_split(econ, lambda, shaved_total, x);
        const Vec h = margins(econ, x, base);
        const double m = h.minCoeff();
        if (m > best) {
            best = m;
            best_x = x;
        }
        upper = std::min(upper, dual_value(lambda, h));
        res.iterations = it + 1;
        if (upper - best <= 1e-12 || best > kBoundaryBand || upper < -kBoundaryBand)
            break;
        const double spread = std::max(h.maxCoeff() - m, 1e-12);
        const double eta = 1.0 / (spread * std::sqrt(it + 1.0));
        Vec logw = lambda.array().log() - eta * h.array();
        logw.array() -= logw.maxCoeff();
        lambda = logw.array().exp();
        lambda /= lambda.sum();
        lambda = lambda.cwiseMax(1e-300);
    }
    res.value = best;
    res.upper_bound = upper;
    res.split = best_x / (1.0 - eps);
    return res;
}

// Linear agents: exact LP in (g, t).
ScitovskyResult solve_linear(const EconomySpec& econ, const Vec& base, const Vec& w, double eps) {
    const auto n = static_cast<Eigen::Index>(econ.size());
    const int d = econ.dimension();
    const bool free_g = econ.allocation_space() == AllocationSpace::unrestricted;
    const Eigen::Index ng = n * d;
    const Eigen::Index nvar = (free_g ? 2 * ng : ng) + 2;  // g (+ g-), t+, t-
    const Eigen::Index t_plus = nvar - 2;

    std::vector<std::pair<Eigen::Index, Vec>> rows;  // agent, prior
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& p = econ.agent(static_cast<std::size_t>(i)).preference;
        if (p.kind() == PreferenceKind::crra)
            rows.emplace_back(i, p.prior());
        else
            for (const auto& v : p.priors().vertices)
                rows.emplace_back(i, v);
    }
    detail::LpProblem lp;
    lp.objective = Vec::Zero(nvar);
    lp.objective(t_plus) = 1.0;
    lp.objective(t_plus + 1) = -1.0;
    lp.a_ub = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), nvar);
    lp.b_ub.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto [i, mu] = rows[r];
        const auto rr = static_cast<Eigen::Index>(r);
        for (int s = 0; s < d; ++s) {
            lp.a_ub(rr, i * d + s) = -(1.0 - eps) * mu(s);
            if (free_g)
                lp.a_ub(rr, ng + i * d + s) = (1.0 - eps) * mu(s);
        }
        lp.a_ub(rr, t_plus) = 1.0;
        lp.a_ub(rr, t_plus + 1) = -1.0;
        lp.b_ub(rr) = -base(i);
    }
    lp.a_eq = Eigen::MatrixXd::Zero(d, nvar);
    lp.b_eq = w;
    for (int s = 0; s < d; ++s)
        for (Eigen::Index i = 0; i < n; ++i) {
            lp.a_eq(s, i * d + s) = 1.0;
            if (free_g)
                lp.a_eq(s, ng + i * d + s) = -1.0;
        }
    const auto sol = detail::solve_lp(lp);
    ScitovskyResult res;
    res.method = ScitovskyMethod::linear_program;
    if (sol.status == detail::LpStatus::infeasible) {
        res.method = ScitovskyMethod::infeasible;
        res.value = res.upper_bound = -kInf;
        return res;
    }
    if (sol.status == detail::LpStatus::unbounded) {
        res.value = res.upper_bound = kInf;
        res.member = true;
        return res;
    }
    if (sol.status != detail::LpStatus::optimal)
        throw Error("scitovsky: linear program hit its iteration limit");
    res.split.resize(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (int s = 0; s < d; ++s)
            res.split(i, s) = sol.x(i * d + s) - (free_g ? sol.x(ng + i * d + s) : 0.0);
    res.value = margins(econ, (1.0 - eps) * res.split, base).minCoeff();
    res.upper_bound = sol.objective;
    return res;
}

// Supergradient of the margin of agent i at bundle x (already shaved).
Vec margin_supergradient(const PreferenceSpec& p, const Act& x) {
    if (p.smooth())
        return utility_gradient(p, x);
    const auto& verts = p.priors().vertices;
    double best = kInf;
    Vec mu;
    for (const auto& v : verts) {
        const double val = p.bernoulli() == Bernoulli::linear ? v.dot(x) : v.dot(x.array().log().matrix());
        if (val < best) {
            best = val;
            mu = v;
        }
    }
    return p.bernoulli() == Bernoulli::linear ? mu : Vec(mu.cwiseQuotient(x));
}

// Projects each state column onto {x >= floor, sum = total}.
void project_columns(Allocation& g, const Vec& w, double floor_frac, bool nonneg) {
    const auto n = g.rows();
    for (Eigen::Index s = 0; s < g.cols(); ++s) {
        if (!nonneg) {
            g.col(s).array() += (w(s) - g.col(s).sum()) / static_cast<double>(n);
            continue;
        }
        const double fl = floor_frac * w(s) / static_cast<double>(n);
        const double rest = w(s) - fl * static_cast<double>(n);
        const Vec y = (g.col(s).array() - fl) / rest;
        g.col(s) = (project_to_simplex(y) * rest).array() + fl;
    }
}

ScitovskyResult solve_supergradient(const EconomySpec& econ, const Vec& base, const Vec& w, double eps) {
    const auto n = static_cast<Eigen::Index>(econ.size());
    const int d = econ.dimension();
    const bool nonneg = econ.allocation_space() == AllocationSpace::nonnegative ||
                        std::any_of(econ.agents().begin(), econ.agents().end(),
                                    [](const Agent& a) { return a.preference.needs_nonnegative(); });
    const bool positive = std::any_of(econ.agents().begin(), econ.agents().end(),
                                      [](const Agent& a) { return a.preference.needs_positive(); });
    Allocation g(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        g.row(i) = w.transpose() / static_cast<double>(n);
    ScitovskyResult res;
    res.method = ScitovskyMethod::supergradient;
    res.value = -kInf;
    res.upper_bound = kInf;
    const double step0 = 0.5 * w.cwiseAbs().maxCoeff() / static_cast<double>(n);
    for (int k = 0; k < 10000; ++k) {
        const Allocation x = (1.0 - eps) * g;
        const Vec h = margins(econ, x, base);
        Eigen::Index worst = 0;
        const double m = h.minCoeff(&worst);
        if (m > res.value) {
            res.value = m;
            res.split = g;
        }
        res.iterations = k + 1;
        if (!std::isfinite(m))
            break;
        Vec sg = margin_supergradient(econ.agent(static_cast<std::size_t>(worst)).preference, act_of(x, static_cast<std::size_t>(worst)));
        const double norm = sg.norm();
        if (norm == 0.0)
            break;
        g.row(worst) += (step0 / std::sqrt(k + 1.0)) * (sg / norm).transpose();
        project_columns(g, w, positive ? 1e-9 : 0.0, nonneg);
    }
    return res;
}

double max_sqrt_partition(int d, int agents) {
    // max over n_1 + ... + n_k = d (n_i >= 0) of sum sqrt(n_i), by enumeration
    double best = 0.0;
    std::vector<int> parts(static_cast<std::size_t>(agents), 0);
    auto rec = [&](auto&& self, int idx, int left, double acc) -> void {
        if (idx == agents - 1) {
            best = std::max(best, acc + std::sqrt(static_cast<double>(left)));
            return;
        }
        for (int k = 0; k <= left; ++k)
            self(self, idx + 1, left - k, acc + std::sqrt(static_cast<double>(k)));
    };
    rec(rec, 0, d, 0.0);
    return best;
}

} // namespace

EconomySpec::EconomySpec(std::vector<Agent> agents, AllocationSpace space) : agents_(std::move(agents)), space_(space) {
    require(agents_.size() >= 2, "economy: at least two agents");
    dim_ = agents_.front().preference.dimension();
    aggregate_ = Vec::Zero(dim_);
    for (const auto& a : agents_) {
        require(a.preference.dimension() == dim_, "economy: preference dimension mismatch");
        require(a.endowment.size() == dim_, "economy: endowment dimension mismatch");
        require(a.endowment.allFinite() && a.endowment.minCoeff() >= 0.0, "economy: endowments must be nonnegative");
        aggregate_ += a.endowment;
    }
}

bool EconomySpec::no_aggregate_uncertainty() const {
    return aggregate_.maxCoeff() - aggregate_.minCoeff() <= 1e-12;
}

double EconomySpec::omega_bar() const {
    require(no_aggregate_uncertainty(), "economy has aggregate uncertainty");
    return aggregate_.mean();
}

double EconomySpec::tau() const {
    double t = kInf;
    for (const auto& a : agents_)
        t = std::min(t, a.endowment.minCoeff());
    return t;
}

void check_allocation(const EconomySpec& econ, const Allocation& f) {
    require(f.rows() == static_cast<Eigen::Index>(econ.size()) && f.cols() == econ.dimension(),
            "allocation: shape mismatch");
    require(f.allFinite(), "allocation: non-finite entry");
    const Vec total = f.colwise().sum().transpose();
    if ((total - econ.aggregate()).cwiseAbs().maxCoeff() > 1e-9)
        throw Error("allocation: acts do not sum to the aggregate endowment");
    if (econ.allocation_space() == AllocationSpace::nonnegative && f.minCoeff() < 0.0)
        throw Error("allocation: negative consumption under the nonnegative allocation space");
}

Allocation endowment_allocation(const EconomySpec& econ) {
    Allocation f(static_cast<Eigen::Index>(econ.size()), econ.dimension());
    for (std::size_t i = 0; i < econ.size(); ++i)
        f.row(static_cast<Eigen::Index>(i)) = econ.agent(i).endowment.transpose();
    return f;
}

Allocation cobb_douglas_demand(const EconomySpec& econ, const Vec& price) {
    Allocation x(static_cast<Eigen::Index>(econ.size()), econ.dimension());
    for (std::size_t i = 0; i < econ.size(); ++i) {
        const auto& a = econ.agent(i);
        const double wealth = price.dot(a.endowment);
        x.row(static_cast<Eigen::Index>(i)) = (a.preference.prior().array() * wealth / price.array()).transpose();
    }
    return x;
}

EquilibriumResult tatonnement_equilibrium(const EconomySpec& econ) {
    for (const auto& a : econ.agents())
        require(a.preference.kind() == PreferenceKind::cobb_douglas, "tatonnement: Cobb-Douglas agents only");
    const Vec& omega = econ.aggregate();
    require(omega.minCoeff() > 0.0, "tatonnement: aggregate endowment must be positive in every state");
    const int d = econ.dimension();
    Vec p = Vec::Constant(d, 1.0 / d);
    std::vector<double> trace;
    for (int it = 1; it <= 100000; ++it) {
        for (const auto& a : econ.agents())
            require(p.dot(a.endowment) > 0.0, "tatonnement: agent with zero wealth");
        Vec target = Vec::Zero(d);
        for (const auto& a : econ.agents())
            target += a.preference.prior() * p.dot(a.endowment);
        target = target.cwiseQuotient(omega);
        p = 0.5 * p + 0.5 * target / target.sum();
        p /= p.sum();
        const Allocation x = cobb_douglas_demand(econ, p);
        const double residual = (x.colwise().sum().transpose() - omega).cwiseAbs().maxCoeff();
        if (it % 1000 == 1)
            trace.push_back(residual);
        if (residual < 1e-10) {
            EquilibriumResult r;
            r.price = p;
            r.allocation = x;
            r.residual = residual;
            r.iterations = it;
            return r;
        }
    }
    std::ostringstream msg;
    msg << "tatonnement did not converge; residual trace:";
    for (double t : trace)
        msg << ' ' << t;
    throw ConvergenceError(msg.str(), trace.empty() ? kInf : trace.back(), trace.empty() ? kInf : trace.back());
}

bool individual_improvement_event(const PreferenceSpec& pref, const Act& f_i, const Vec& z, double eps) {
    require(eps >= 0.0 && eps < 1.0, "eps must lie in [0, 1)");
    const Act g = (1.0 - eps) * (f_i + z);
    if (!pref.in_domain(g))
        return false;
    return strictly_prefers(pref, g, f_i);
}

bool any_improvement(const EconomySpec& econ, const Allocation& f, const Vec& z, double eps) {
    for (std::size_t i = 0; i < econ.size(); ++i)
        if (individual_improvement_event(econ.agent(i).preference, act_of(f, i), z, eps))
            return true;
    return false;
}

ScitovskyResult scitovsky_solve(const EconomySpec& econ, const Allocation& f, const Vec& w, double eps) {
    require(eps >= 0.0 && eps < 1.0, "eps must lie in [0, 1)");
    require(w.size() == econ.dimension(), "scitovsky: aggregate dimension mismatch");
    const auto n = static_cast<Eigen::Index>(econ.size());
    Vec base(n);
    for (std::size_t i = 0; i < econ.size(); ++i)
        base(static_cast<Eigen::Index>(i)) = utility(econ.agent(i).preference, act_of(f, i));

    const bool nonneg = econ.allocation_space() == AllocationSpace::nonnegative;
    const bool needs_nonneg = std::any_of(econ.agents().begin(), econ.agents().end(),
                                          [](const Agent& a) { return a.preference.needs_nonnegative(); });
    const bool needs_pos = std::any_of(econ.agents().begin(), econ.agents().end(),
                                       [](const Agent& a) { return a.preference.needs_positive(); });
    ScitovskyResult res;
    // no split exists when some state has too little to share
    if (((nonneg || needs_nonneg) && w.minCoeff() < 0.0) || (needs_pos && w.minCoeff() <= 0.0)) {
        res.value = res.upper_bound = -kInf;
        res.method = ScitovskyMethod::infeasible;
        return res;
    }
    if (all_smooth_crra(econ) && w.minCoeff() > 0.0)
        res = solve_smooth(econ, base, (1.0 - eps) * w, eps);
    else if (all_linear(econ))
        res = solve_linear(econ, base, w, eps);
    else
        res = solve_supergradient(econ, base, w, eps);
    res.member = res.value > kBoundaryBand;
    return res;
}

bool scitovsky_member(const EconomySpec& econ, const Allocation& f, const Vec& w, double eps) {
    require(econ.no_aggregate_uncertainty(), "scitovsky: economy has aggregate uncertainty");
    check_allocation(econ, f);
    const auto res = scitovsky_solve(econ, f, w, eps);
    if (std::abs(res.value) <= kBoundaryBand) {
        std::ostringstream msg;
        msg << "scitovsky margin " << res.value;
        throw BoundaryIndeterminate(msg.str(), res.value);
    }
    return res.member;
}

double cru(const EconomySpec& econ, const Allocation& f) {
    require(econ.no_aggregate_uncertainty(), "cru: economy has aggregate uncertainty");
    check_allocation(econ, f);
    const Vec& omega = econ.aggregate();
    auto above = [&](double beta) { return scitovsky_solve(econ, f, beta * omega, 0.0).value > 0.0; };
    if (scitovsky_solve(econ, f, omega, 0.0).value <= kBoundaryBand)
        return 1.0;
    double lo = 1e-6;
    double hi = 1.0;
    if (above(lo))
        throw Error("degenerate allocation: improvable with almost no resources");
    while (hi - lo > 1e-7) {
        const double mid = 0.5 * (lo + hi);
        (above(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

double rho_sqrt_mode(int d) { return 2.0 * std::sqrt(static_cast<double>(d)); }

RhoReport rho(const EconomySpec& econ) {
    require(econ.no_aggregate_uncertainty(), "rho: economy has aggregate uncertainty");
    const int d = econ.dimension();
    const int k = static_cast<int>(econ.size());
    if (k > 4 || d > 12)
        throw Error("rho: exact enumeration limited to 4 agents and 12 states; use the 2 sqrt(d) mode");
    RhoReport r;
    r.definitional = 2.0 * max_sqrt_partition(d, k);
    r.sqrt_mode = rho_sqrt_mode(d);
    return r;
}

bool pareto_dominated_eps(const EconomySpec& econ, const Allocation& f, double eps) {
    require(econ.no_aggregate_uncertainty(), "pareto check: economy has aggregate uncertainty");
    check_allocation(econ, f);
    return scitovsky_solve(econ, f, econ.aggregate(), eps).value > kBoundaryBand;
}

ConvexBody joint_belief_set(const EconomySpec& econ, const Allocation& f, const std::vector<int>& agents) {
    require(!agents.empty(), "belief set: empty agent group");
    Intersection parts;
    for (int i : agents) {
        require(i >= 0 && i < static_cast<int>(econ.size()), "belief set: agent index out of range");
        parts.parts.emplace_back(belief_set(econ.agent(static_cast<std::size_t>(i)).preference,
                                            act_of(f, static_cast<std::size_t>(i))));
    }
    if (parts.parts.size() == 1)
        return parts.parts.front();
    return parts;
}

BeliefVolumeSplit belief_volume_split(const EconomySpec& econ, const Allocation& f, const std::vector<int>& j,
                                      const VolumeMethod& mc) {
    const int n = static_cast<int>(econ.size());
    std::vector<int> jc;
    for (int i = 0; i < n; ++i)
        if (std::find(j.begin(), j.end(), i) == j.end())
            jc.push_back(i);
    require(!j.empty() && !jc.empty(), "belief volume split: J must be a proper nonempty subset");
    const double simplex_vol = simplex_volume(econ.dimension());

    BeliefVolumeSplit out;
    out.exact = true;
    auto measure = [&](const std::vector<int>& group, std::uint64_t stream, bool& empty, double& lo, double& hi) {
        std::vector<Polytope> sets;
        for (int i : group)
            sets.push_back(belief_set(econ.agent(static_cast<std::size_t>(i)).preference,
                                      act_of(f, static_cast<std::size_t>(i))));
        for (std::size_t a = 0; a < sets.size(); ++a)
            for (std::size_t b = a + 1; b < sets.size(); ++b)
                if (polytope_distance(sets[a], sets[b]).value > 1e-12) {
                    empty = true;
                    lo = hi = 0.0;
                    return 0.0;
                }
        const ConvexBody body = joint_belief_set(econ, f, group);
        VolumeResult v;
        if (has_exact_volume(body)) {
            v = volume(body);
        } else {
            out.exact = false;
            VolumeMethod m = mc;
            require(m.kind == VolumeKind::monte_carlo, "belief volume split: no exact volume; pass a Monte Carlo method");
            m.seed.stream_id = mc.seed.stream_id * 2 + stream;
            v = volume(body, m);
        }
        lo = v.ci_lo / simplex_vol;
        hi = v.ci_hi / simplex_vol;
        return v.value / simplex_vol;
    };
    double lo_j = 0.0, hi_j = 0.0, lo_jc = 0.0, hi_jc = 0.0;
    out.vol_j = measure(j, 0, out.empty_j, lo_j, hi_j);
    out.vol_jc = measure(jc, 1, out.empty_jc, lo_jc, hi_jc);
    out.min_rel_vol = std::min(out.vol_j, out.vol_jc);
    out.min_ci_lo = std::min(lo_j, lo_jc);
    out.min_ci_hi = std::min(hi_j, hi_jc);
    return out;
}

double width_along(const ConvexBody& priors, const Vec& direction) {
    return support(priors, direction) + support(priors, -direction);
}

WidthReport width_report(const ConvexBody& priors, std::size_t n_directions, const SeedSpec& seed) {
    require(n_directions >= 1, "width report: need at least one direction");
    const int d = priors.dimension();
    require(d >= 2, "width report: dimension must be >= 2");
    WidthReport r;
    r.theta_min = kInf;
    r.theta_max = 0.0;
    std::normal_distribution<double> normal;
    for (std::size_t k = 0; k < n_directions; ++k) {
        CounterRng rng(seed, k);
        Vec u(d);
        do {
            for (int s = 0; s < d; ++s)
                u(s) = normal(rng);
            u.array() -= u.mean();
        } while (u.norm() < 1e-12);
        u.normalize();
        const double theta = width_along(priors, u);
        r.theta_min = std::min(r.theta_min, theta);
        r.theta_max = std::max(r.theta_max, theta);
    }
    r.constant_width = r.theta_max - r.theta_min <= 1e-8;
    return r;
}

Allocation planner_allocation(const EconomySpec& econ, const Vec& weights) {
    require(all_smooth_crra(econ), "planner allocation: smooth (log or CRRA gamma > 0) agents only");
    require(weights.size() == static_cast<Eigen::Index>(econ.size()), "planner allocation: one weight per agent");
    require(weights.minCoeff() > 0.0, "planner allocation: weights must be positive");
    require(econ.aggregate().minCoeff() > 0.0, "planner allocation: aggregate must be positive");
    Allocation x;
    weighted_split(econ, weights / weights.sum(), econ.aggregate(), x);
    return x;
}

Vec supporting_price(const EconomySpec& econ, const Allocation& f) {
    check_allocation(econ, f);
    bool smooth = true;
    for (const auto& a : econ.agents())
        smooth = smooth && a.preference.smooth();
    if (smooth) {
        Vec p;
        for (std::size_t i = 0; i < econ.size(); ++i) {
            Vec g = utility_gradient(econ.agent(i).preference, act_of(f, i));
            g /= g.sum();
            if (i == 0)
                p = g;
            else if ((g - p).cwiseAbs().maxCoeff() > 1e-6)
                throw Error("supporting price: gradients disagree, allocation is not Pareto optimal");
        }
        return p;
    }
    std::vector<Polytope> sets;
    for (std::size_t i = 0; i < econ.size(); ++i)
        sets.push_back(belief_set(econ.agent(i).preference, act_of(f, i)));
    ExtensionReport rep;
    try {
        rep = belief_extension_report(sets, 1e-6);
    } catch (const BoundaryIndeterminate&) {
        throw Error("supporting price: belief sets do not intersect");
    }
    if (rep.value > 1e-7)
        throw Error("supporting price: belief sets do not intersect");
    return rep.witness / rep.witness.sum();
}

std::string allocation_csv(const Allocation& f) {
    std::ostringstream out;
    out << "agent,state,value\n";
    char buf[40];
    for (Eigen::Index i = 0; i < f.rows(); ++i)
        for (Eigen::Index s = 0; s < f.cols(); ++s) {
            std::snprintf(buf, sizeof buf, "%.17g", f(i, s));
            out << i << ',' << s << ',' << buf << '\n';
        }
    return out.str();
}

} // namespace risklab
