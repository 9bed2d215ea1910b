#include "risklab/experiments.hpp"

#include "risklab/bounds.hpp"
#include "risklab/error.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

namespace risklab {

namespace {

const std::set<std::string> kCommonKeys = {"experiment", "seed", "trials", "dims", "out", "threads",
                                           "condition_positive_price"};
const std::set<std::string> kAgentKeys = {"preference", "prior", "gamma", "priors", "endowment", "allocation"};

std::set<std::string> keys_with(std::initializer_list<const char*> extra) {
    std::set<std::string> k = kCommonKeys;
    for (const char* e : extra)
        k.insert(e);
    return k;
}

std::string num(double v) { return format_double(v); }
std::string num(std::uint64_t v) { return std::to_string(v); }
std::string flag(bool b) { return b ? "true" : "false"; }

std::uint64_t cell_stream(const std::string& experiment, int d, double eps) {
    return fnv1a(experiment + "/d=" + std::to_string(d) + "/eps=" + format_double(eps));
}

std::uint64_t require_seed(const Config& config) {
    if (!config.has("seed"))
        throw Error("config: seed is required");
    return config.get_u64("seed");
}

unsigned threads_of(const Config& config, const RunOptions& options) {
    if (options.threads != 0)
        return options.threads;
    return static_cast<unsigned>(config.get_u64_or("threads", 0));
}

bool conditioned(const Config& config, const RunOptions& options) {
    return options.condition_positive_price || config.get_or("condition_positive_price", "false") == "true";
}

PerturbationLaw make_law(const Config& config, int d, double r) {
    const std::string law = config.get_or("law", "uniform");
    if (law == "uniform")
        return PerturbationLaw::uniform_ball(d, r);
    if (law == "gaussian")
        return PerturbationLaw::restricted_gaussian(d, r);
    throw Error("law: uniform | gaussian");
}

// Columns shared by the perturbation experiments.
const std::vector<std::string> kCellHeader = {
    "experiment", "d",    "eps",           "beta",  "law",   "kappa",  "tau",    "r",      "trials",
    "accepted",   "hits", "indeterminate", "p_hat", "ci_lo", "ci_hi", "bound", "within_bound", "status"};

struct Cell {
    int d = 0;
    double eps = 0.0;
    double beta = std::nan("");
    std::string law;
    double kappa = std::nan("");
    double tau = std::nan("");
    double r = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t accepted = 0;
    std::uint64_t hits = 0;
    std::uint64_t indeterminate = 0;
    double bound = std::nan("");
    std::string status = "ok";
    bool has_estimate = false;
    bool check_bound = true;
};

std::string opt(double v) { return std::isnan(v) ? "" : num(v); }

std::vector<std::string> cell_row(const std::string& experiment, const Cell& c) {
    std::string p_hat, lo, hi, within;
    if (c.has_estimate && c.accepted > 0) {
        const MCEstimate e{c.hits, c.accepted};
        p_hat = num(e.p_hat());
        lo = num(e.ci_lo());
        hi = num(e.ci_hi());
        if (c.check_bound && !std::isnan(c.bound))
            within = flag(e.ci_lo() <= c.bound || e.p_hat() <= c.bound);
    }
    return {experiment,     std::to_string(c.d),   num(c.eps),        opt(c.beta),          c.law,
            opt(c.kappa),   opt(c.tau),            num(c.r),          num(c.trials),        num(c.accepted),
            num(c.hits),    num(c.indeterminate),  p_hat,             lo,                   hi,
            opt(c.bound),   within,                csv_escape(c.status)};
}

void add_plots(Table& t, const std::string& stem, const std::vector<Cell>& cells, double eps) {
    PlotSeries est{stem + "_eps" + format_double(eps) + "_p_hat", {}};
    PlotSeries bnd{stem + "_eps" + format_double(eps) + "_bound", {}};
    for (const auto& c : cells) {
        if (c.eps != eps || !c.has_estimate || c.accepted == 0)
            continue;
        est.points.emplace_back(c.d, static_cast<double>(c.hits) / static_cast<double>(c.accepted));
        if (!std::isnan(c.bound))
            bnd.points.emplace_back(c.d, c.bound);
    }
    t.plots.push_back(std::move(est));
    t.plots.push_back(std::move(bnd));
}

Table cell_table(const std::string& experiment, const std::vector<Cell>& cells, const std::vector<double>& eps_list,
                 const std::string& stem) {
    Table t;
    t.experiment = experiment;
    t.header = kCellHeader;
    for (const auto& c : cells)
        t.rows.push_back(cell_row(experiment, c));
    for (double e : eps_list)
        add_plots(t, stem, cells, e);
    return t;
}

// Perturbation Monte Carlo shared by thm2 and cru: membership of omega + z.
void scitovsky_cell(Cell& cell, const EconomySpec& econ, const Allocation& f, const PerturbationLaw& law,
                    const SeedSpec& seed, bool condition, const Vec& price, unsigned threads) {
    const Vec omega = econ.aggregate();
    const auto counts = parallel_count_events(0, cell.trials, threads, 3, [&](std::uint64_t i) -> std::uint32_t {
        CounterRng rng(seed, i);
        Vec z;
        law.draw(rng, z);
        if (condition && !(price.dot(z) > 0.0))
            return 0u;
        const auto res = scitovsky_solve(econ, f, omega + z, cell.eps);
        if (std::abs(res.value) <= kBoundaryBand)
            return 4u;
        return 1u | (res.member ? 2u : 0u);
    });
    cell.accepted = counts[0];
    cell.hits = counts[1];
    cell.indeterminate = counts[2];
    cell.has_estimate = true;
    const std::uint64_t drawn = cell.accepted + cell.indeterminate;
    if (drawn > 0 && static_cast<double>(cell.indeterminate) > 0.01 * static_cast<double>(drawn)) {
        cell.status = "aborted: boundary-indeterminate draws exceed 1%";
        cell.check_bound = false;
    }
}

} // namespace

std::string csv_escape(const std::string& text) {
    std::string out = text;
    std::replace(out.begin(), out.end(), ',', ';');
    std::replace(out.begin(), out.end(), '\n', ' ');
    return out;
}

std::string Table::csv() const {
    std::ostringstream out;
    for (std::size_t k = 0; k < header.size(); ++k)
        out << (k ? "," : "") << header[k];
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t k = 0; k < row.size(); ++k)
            out << (k ? "," : "") << row[k];
        out << '\n';
    }
    return out.str();
}

const std::string& Table::at(std::size_t row, const std::string& column) const {
    const auto it = std::find(header.begin(), header.end(), column);
    if (it == header.end())
        throw Error("table: no column " + column);
    return rows.at(row).at(static_cast<std::size_t>(it - header.begin()));
}

Table run_thm1(const Config& config, const RunOptions& options) {
    config.check_known(keys_with({"eps", "r", "law", "allocation", "planner_weights", "allocation_space"}), kAgentKeys);
    const std::uint64_t seed = require_seed(config);
    const auto dims = config.get_int_list("dims");
    const auto eps_list = config.get_double_list("eps");
    const double r = config.get_double_or("r", 1.0);
    const std::uint64_t n = config.get_u64_or("trials", 100000);
    const bool condition = conditioned(config, options);
    const unsigned threads = threads_of(config, options);

    std::vector<Cell> cells;
    for (int d : dims)
        for (double eps : eps_list) {
            Cell cell;
            cell.d = d;
            cell.eps = eps;
            cell.r = r;
            cell.trials = n;
            cell.law = config.get_or("law", "uniform");
            try {
                const EconomySpec econ = build_economy(config, d, seed);
                Vec price;
                Allocation f;
                if (config.get_or("allocation", "equilibrium") == "equilibrium") {
                    const auto eq = tatonnement_equilibrium(econ);
                    f = eq.allocation;
                    price = eq.price;
                } else {
                    f = build_allocation(config, econ, seed);
                    if (condition)
                        price = supporting_price(econ, f);
                }
                const auto law = make_law(config, d, r);
                cell.kappa = law.kappa();
                cell.tau = econ.tau();
                cell.bound = bound_thm1(eps, cell.tau, r, d, cell.kappa) * (condition ? 2.0 : 1.0);
                const SeedSpec stream{seed, cell_stream("thm1", d, eps)};
                const auto counts = parallel_count_events(0, n, threads, 2, [&](std::uint64_t i) -> std::uint32_t {
                    CounterRng rng(stream, i);
                    Vec z;
                    law.draw(rng, z);
                    if (condition && !(price.dot(z) > 0.0))
                        return 0u;
                    return 1u | (any_improvement(econ, f, z, eps) ? 2u : 0u);
                });
                cell.accepted = counts[0];
                cell.hits = counts[1];
                cell.has_estimate = true;
                if (condition)
                    cell.status = "ok (conditioned on p.z > 0; bound doubled)";
            } catch (const std::exception& e) {
                cell.status = std::string("error: ") + e.what();
            }
            cells.push_back(cell);
        }
    return cell_table("thm1", cells, eps_list, "thm1");
}

Table run_thm2(const Config& config, const RunOptions& options) {
    config.check_known(keys_with({"eps", "r", "law", "allocation", "planner_weights", "allocation_space"}), kAgentKeys);
    const std::uint64_t seed = require_seed(config);
    const auto dims = config.get_int_list("dims");
    const auto eps_list = config.get_double_list("eps");
    const double r = config.get_double_or("r", 1.0);
    const std::uint64_t n = config.get_u64_or("trials", 10000);
    const bool condition = conditioned(config, options);
    const unsigned threads = threads_of(config, options);

    std::vector<Cell> cells;
    for (int d : dims)
        for (double eps : eps_list) {
            Cell cell;
            cell.d = d;
            cell.eps = eps;
            cell.r = r;
            cell.trials = n;
            cell.law = config.get_or("law", "uniform");
            try {
                const EconomySpec econ = build_economy(config, d, seed);
                require(econ.no_aggregate_uncertainty(), "thm2 needs an economy without aggregate uncertainty");
                Config c = config;
                if (!c.has("allocation"))
                    c.set("allocation", "planner");
                const Allocation f = build_allocation(c, econ, seed);
                const Vec price = condition ? supporting_price(econ, f) : Vec();
                const auto law = make_law(config, d, r);
                cell.kappa = law.kappa();
                cell.bound = bound_thm2(eps, r, d, cell.kappa) * (condition ? 2.0 : 1.0);
                scitovsky_cell(cell, econ, f, law, {seed, cell_stream("thm2", d, eps)}, condition, price, threads);
                if (condition && cell.status == "ok")
                    cell.status = "ok (conditioned on p.z > 0; bound doubled)";
            } catch (const std::exception& e) {
                cell.status = std::string("error: ") + e.what();
            }
            cells.push_back(cell);
        }
    return cell_table("thm2", cells, eps_list, "thm2");
}

Table run_cru(const Config& config, const RunOptions& options) {
    config.check_known(keys_with({"r", "law", "allocation", "planner_weights", "allocation_space"}), kAgentKeys);
    const std::uint64_t seed = require_seed(config);
    const auto dims = config.get_int_list("dims");
    const double r = config.get_double_or("r", 1.0);
    const std::uint64_t n = config.get_u64_or("trials", 10000);
    const unsigned threads = threads_of(config, options);
    require(config.get_or("law", "uniform") == "uniform", "cru: the bound is stated for the uniform law only");

    std::vector<Cell> cells;
    for (int d : dims) {
        Cell cell;
        cell.d = d;
        cell.r = r;
        cell.trials = n;
        cell.law = "uniform";
        cell.kappa = 1.0;
        try {
            const EconomySpec econ = build_economy(config, d, seed);
            const Allocation f = build_allocation(config, econ, seed);
            cell.beta = cru(econ, f);
            if (cell.beta >= 1.0 - 1e-6) {
                cell.status = "refused: allocation is Pareto optimal (beta = 1)";
                cells.push_back(cell);
                continue;
            }
            cell.eps = 1.0 - cell.beta * cell.beta;
            cell.bound = bound_cru(cell.beta, r, d);
            const auto law = PerturbationLaw::uniform_ball(d, r);
            scitovsky_cell(cell, econ, f, law, {seed, cell_stream("cru", d, 0.0)}, false, Vec(), threads);
        } catch (const std::exception& e) {
            cell.status = std::string("error: ") + e.what();
        }
        cells.push_back(cell);
    }
    Table t = cell_table("cru", cells, {}, "cru");
    PlotSeries est{"cru_p_hat", {}};
    PlotSeries bnd{"cru_bound", {}};
    for (const auto& c : cells)
        if (c.has_estimate && c.accepted > 0) {
            est.points.emplace_back(c.d, static_cast<double>(c.hits) / static_cast<double>(c.accepted));
            bnd.points.emplace_back(c.d, c.bound);
        }
    t.plots = {est, bnd};
    return t;
}

Table run_prop3_thm4(const Config& config, const RunOptions& options) {
    config.check_known(keys_with({"eps", "c_values", "allocation", "planner_weights", "allocation_space"}), kAgentKeys);
    (void)options;
    const std::uint64_t seed = require_seed(config);
    const auto dims = config.get_int_list("dims");
    const auto eps_list = config.get_double_list("eps");
    const std::vector<double> cs = config.has("c_values") ? config.get_double_list("c_values")
                                                          : std::vector<double>{0.5, 1.0, 2.0};
    const std::uint64_t n = config.get_u64_or("trials", 100000);

    Table t;
    t.experiment = "prop3-thm4";
    t.header = {"experiment", "d",          "eps",         "dominated", "rho_def",   "rho_sqrt",
                "delta_def",  "delta_sqrt", "empty_def",  "empty_sqrt", "split",   "vol_j",
                "vol_jc",     "min_rel_vol", "min_ci_lo",  "min_ci_hi", "volume_method"};
    for (double c : cs)
        t.header.push_back("bound_c" + format_double(c));
    t.header.push_back("status");

    PlotSeries vols{"thm4_min_rel_vol", {}};
    for (int d : dims)
        for (double eps : eps_list) {
            std::vector<std::string> base{"prop3-thm4", std::to_string(d), num(eps)};
            try {
                Config c = config;
                if (!c.has("allocation"))
                    c.set("allocation", "endowment");
                const EconomySpec econ = build_economy(c, d, seed);
                const Allocation f = build_allocation(c, econ, seed);
                const RhoReport rr = rho(econ);
                const bool dominated = pareto_dominated_eps(econ, f, eps);
                std::vector<Polytope> sets;
                for (std::size_t i = 0; i < econ.size(); ++i)
                    sets.push_back(belief_set(econ.agent(i).preference, act_of(f, i)));
                auto decide = [&](double delta) -> std::string {
                    try {
                        return flag(belief_set_extension_empty(sets, delta));
                    } catch (const BoundaryIndeterminate&) {
                        return "indeterminate";
                    }
                };
                const double delta_def = eps / rr.definitional;
                const double delta_sqrt = eps / rr.sqrt_mode;
                base.insert(base.end(), {flag(dominated), num(rr.definitional), num(rr.sqrt_mode), num(delta_def),
                                         num(delta_sqrt), decide(delta_def), decide(delta_sqrt)});
                const int k = static_cast<int>(econ.size());
                require(k <= 4, "prop3-thm4: bipartitions limited to 4 agents");
                double cell_min = 1.0;
                for (int mask = 1; mask < (1 << k) - 1; ++mask) {
                    if (!(mask & 1))
                        continue;  // J always holds agent 0
                    std::vector<int> j;
                    std::string name;
                    for (int i = 0; i < k; ++i)
                        if (mask & (1 << i)) {
                            j.push_back(i);
                            name += (name.empty() ? "" : "+") + std::to_string(i);
                        }
                    const SeedSpec vs{seed, cell_stream("thm4/" + name, d, eps)};
                    const auto split = belief_volume_split(econ, f, j, VolumeMethod::mc(n, vs));
                    cell_min = std::min(cell_min, split.min_rel_vol);
                    auto row = base;
                    row.insert(row.end(), {name, num(split.vol_j), num(split.vol_jc), num(split.min_rel_vol),
                                           num(split.min_ci_lo), num(split.min_ci_hi),
                                           split.exact ? "exact" : "monte-carlo"});
                    for (double cval : cs)
                        row.push_back(num(bound_thm4(cval, eps, d)));
                    std::string status = "ok";
                    if (split.empty_j || split.empty_jc)
                        status = "ok (empty intersection; volume 0)";
                    if (!dominated)
                        status += " (allocation not eps-dominated)";
                    row.push_back(csv_escape(status));
                    t.rows.push_back(std::move(row));
                }
                vols.points.emplace_back(d, cell_min);
            } catch (const std::exception& e) {
                auto row = base;
                row.resize(t.header.size() - 1);
                row.push_back(csv_escape(std::string("error: ") + e.what()));
                t.rows.push_back(std::move(row));
            }
        }
    t.plots.push_back(std::move(vols));
    return t;
}

namespace {

struct CheckRow {
    std::string name;
    bool passed = true;
    std::uint64_t instances = 0;
    std::string detail;
};

std::string vec_text(const Vec& v) {
    std::ostringstream out;
    out << '[';
    for (Eigen::Index k = 0; k < v.size(); ++k)
        out << (k ? " " : "") << v(k);
    out << ']';
    return out.str();
}

// Random act near f with entries f_s (1 + u_s), u_s uniform in [-0.5, 1].
Vec perturbed_act(CounterRng& rng, const Vec& f) {
    Vec g = f;
    for (Eigen::Index s = 0; s < g.size(); ++s)
        g(s) *= 0.5 + 1.5 * rng.uniform();
    return g;
}

} // namespace

Table run_support_checks(const Config& config, const RunOptions& options) {
    config.check_known(keys_with({}), kAgentKeys);
    (void)options;
    const std::uint64_t seed = config.get_u64_or("seed", 20240601);
    std::vector<CheckRow> checks;
    std::normal_distribution<double> normal;

    {
        CheckRow c{"norm_ratio_l1_l2", true, 0, ""};
        double worst = std::numeric_limits<double>::infinity();
        for (std::uint64_t i = 0; i < 100000; ++i) {
            CounterRng rng({seed, fnv1a("norm-ratio")}, i);
            const int d = 2 + static_cast<int>(i % 63);
            Vec p(d);
            for (int s = 0; s < d; ++s)
                p(s) = normal(rng);
            const double ratio = p.lpNorm<1>() / p.norm();
            worst = std::min(worst, ratio);
            ++c.instances;
            if (ratio < 1.0 - 1e-15) {
                c.passed = false;
                c.detail = "ratio " + format_double(ratio) + " at " + vec_text(p);
                break;
            }
        }
        for (int d = 1; d <= 64; ++d) {
            const Vec e = Vec::Unit(d, d - 1);
            if (e.lpNorm<1>() / e.norm() != 1.0) {
                c.passed = false;
                c.detail = "basis vector ratio differs from 1";
            }
        }
        if (c.passed)
            c.detail = "min random ratio " + format_double(worst) + "; basis vectors give 1";
        checks.push_back(c);
    }
    {
        CheckRow c{"parallelogram_identity", true, 0, ""};
        for (std::uint64_t i = 0; i < 10000; ++i) {
            CounterRng rng({seed, fnv1a("parallelogram")}, i);
            const int d = 1 + static_cast<int>(i % 50);
            Vec a(d), b(d);
            for (int s = 0; s < d; ++s) {
                a(s) = normal(rng);
                b(s) = normal(rng);
            }
            const double lhs = (a + b).squaredNorm();
            const double rhs = 2 * a.squaredNorm() + 2 * b.squaredNorm() - (a - b).squaredNorm();
            ++c.instances;
            if (std::abs(lhs - rhs) > 1e-12 * std::max(1.0, lhs)) {
                c.passed = false;
                c.detail = "a=" + vec_text(a) + " b=" + vec_text(b);
                break;
            }
        }
        checks.push_back(c);
    }
    {
        CheckRow c{"gaussian_kappa_sweep", true, 0, ""};
        for (int d = 1; d <= 50; ++d)
            for (double r : {0.5, 1.0, 2.0}) {
                const double k = gaussian_kappa_ratio(d, r);
                ++c.instances;
                if (!(k <= std::exp(r * r / 2.0)) || !(k >= 1.0)) {
                    c.passed = false;
                    c.detail = "d=" + std::to_string(d) + " r=" + format_double(r) + " kappa=" + format_double(k);
                }
            }
        checks.push_back(c);
    }
    {
        CheckRow c{"brunn_minkowski_boxes", true, 0, ""};
        for (std::uint64_t i = 0; i < 1000; ++i) {
            CounterRng rng({seed, fnv1a("bm")}, i);
            const int d = 1 + static_cast<int>(i % 8);
            Vec la(d), lb(d), sa(d), sb(d);
            for (int s = 0; s < d; ++s) {
                la(s) = 4 * rng.uniform() - 2;
                lb(s) = 4 * rng.uniform() - 2;
                sa(s) = 0.1 + 2 * rng.uniform();
                sb(s) = 0.1 + 2 * rng.uniform();
            }
            const double lambda = rng.uniform();
            const auto rep = bm_check(Box{la, la + sa}, Box{lb, lb + sb}, lambda);
            ++c.instances;
            if (!rep.holds || !rep.holds_root) {
                c.passed = false;
                c.detail = "violation at instance " + std::to_string(i);
            }
        }
        checks.push_back(c);
    }
    {
        CheckRow c{"separation_cap_family", true, 0, ""};
        for (int d = 2; d <= 512; d *= 2)
            for (double delta : {0.1, 0.2, 0.4})
                for (double r : {1.0, 2.0}) {
                    const Ball ball{Vec::Zero(d), r};
                    const Vec e1 = Vec::Unit(d, 0);
                    const Intersection a{{ball, HalfSpace{e1, delta / 2, Orientation::upper}}};
                    const Intersection b{{ball, HalfSpace{e1, -delta / 2, Orientation::lower}}};
                    const auto rep = separation_bound_check(a, b, ball, delta);
                    ++c.instances;
                    if (!rep.holds) {
                        c.passed = false;
                        c.detail = "d=" + std::to_string(d) + " delta=" + format_double(delta);
                    }
                }
        checks.push_back(c);
    }
    {
        CheckRow c{"cap_fraction_symmetry", true, 0, ""};
        for (int d = 1; d <= 64; ++d)
            for (double t : {0.05, 0.3, 0.7, 0.95}) {
                ++c.instances;
                const double s = signed_cap_fraction(d, 1.0, t) + signed_cap_fraction(d, 1.0, -t);
                if (std::abs(s - 1.0) > 1e-12) {
                    c.passed = false;
                    c.detail = "d=" + std::to_string(d) + " t=" + format_double(t);
                }
            }
        checks.push_back(c);
    }
    {
        CheckRow c{"width_prefactor_at_most_4", true, 0, ""};
        double worst = 0.0;
        for (int d = 1; d <= 1000000; ++d) {
            const double v = prop7_prefactor(d);
            worst = std::max(worst, v);
            ++c.instances;
            if (!(v <= 4.0)) {
                c.passed = false;
                c.detail = "d=" + std::to_string(d) + " prefactor=" + format_double(v);
                break;
            }
        }
        if (c.passed)
            c.detail = "max prefactor " + format_double(worst);
        checks.push_back(c);
    }
    {
        CheckRow c{"bound_identity_tau_one", true, 0, ""};
        for (int d = 1; d <= 4096; d *= 2)
            for (double eps : {0.0, 0.05, 0.1, 0.5}) {
                ++c.instances;
                if (bound_thm1(eps, 1.0, 1.0, d, 1.5) != bound_thm2(eps, 1.0, d, 1.5))
                    c.passed = false;
            }
        checks.push_back(c);
    }

    // Economy-level inclusions on a Cobb-Douglas equilibrium.
    const std::vector<Agent> cd_agents{
        {PreferenceSpec::cobb_douglas((Vec(3) << 0.5, 0.3, 0.2).finished()), (Vec(3) << 2.0, 1.0, 1.5).finished()},
        {PreferenceSpec::cobb_douglas((Vec(3) << 0.2, 0.3, 0.5).finished()), (Vec(3) << 1.0, 2.5, 1.0).finished()},
    };
    const EconomySpec cd(cd_agents);
    const auto eq = tatonnement_equilibrium(cd);
    {
        CheckRow c{"walrasian_certificate", true, 0, ""};
        for (std::uint64_t i = 0; i < 20000 && c.instances < 1000; ++i) {
            CounterRng rng({seed, fnv1a("walras")}, i);
            const std::size_t a = i % 2;
            const Vec g = perturbed_act(rng, act_of(eq.allocation, a));
            if (!strictly_prefers(cd.agent(a).preference, g, act_of(eq.allocation, a)))
                continue;
            ++c.instances;
            if (!(eq.price.dot(g) > eq.price.dot(cd.agent(a).endowment))) {
                c.passed = false;
                c.detail = "agent " + std::to_string(a) + " g=" + vec_text(g);
            }
        }
        checks.push_back(c);
    }
    {
        CheckRow c{"q_set_halfspace_inclusion", true, 0, ""};
        const double eps = 0.1;
        const double tau = cd.tau();
        for (std::uint64_t i = 0; i < 50000 && c.instances < 1000; ++i) {
            CounterRng rng({seed, fnv1a("qset")}, i);
            const std::size_t a = i % 2;
            const Vec fi = act_of(eq.allocation, a);
            const Vec g = perturbed_act(rng, fi);
            if (!eps_ucs_contains(cd.agent(a).preference, fi, g, eps))
                continue;
            ++c.instances;
            if (!(eq.price.dot(g - cd.agent(a).endowment) > eps * tau * eq.price.lpNorm<1>())) {
                c.passed = false;
                c.detail = "agent " + std::to_string(a) + " g=" + vec_text(g);
            }
        }
        checks.push_back(c);
    }
    {
        CheckRow c{"scitovsky_halfspace_inclusion", true, 0, ""};
        const std::vector<Agent> logs{
            {PreferenceSpec::cobb_douglas((Vec(3) << 0.5, 0.3, 0.2).finished()), Vec::Constant(3, 0.5)},
            {PreferenceSpec::cobb_douglas((Vec(3) << 0.2, 0.3, 0.5).finished()), Vec::Constant(3, 0.5)},
        };
        const EconomySpec econ(logs);
        const Allocation f = planner_allocation(econ, Vec::Ones(2));
        const Vec p = supporting_price(econ, f);
        const double eps = 0.1;
        for (std::uint64_t i = 0; i < 200000 && c.instances < 1000; ++i) {
            CounterRng rng({seed, fnv1a("scitovsky-inclusion")}, i);
            Vec v = Vec::Zero(3);
            bool ok = true;
            for (std::size_t a = 0; a < 2 && ok; ++a) {
                const Vec g = perturbed_act(rng, act_of(f, a));
                ok = eps_ucs_contains(econ.agent(a).preference, act_of(f, a), g, eps);
                v += g;
            }
            if (!ok)
                continue;
            ++c.instances;
            if (!(p.dot(v) >= p.lpNorm<1>() / (1.0 - eps) - 1e-8)) {
                c.passed = false;
                c.detail = "v=" + vec_text(v);
            }
        }
        checks.push_back(c);
    }

    Table t;
    t.experiment = "checks";
    t.header = {"check", "passed", "instances", "detail"};
    for (const auto& c : checks)
        t.rows.push_back({c.name, flag(c.passed && c.instances > 0), std::to_string(c.instances), csv_escape(c.detail)});
    return t;
}

Table reproduce_anchors() {
    Table t;
    t.experiment = "anchors";
    t.header = {"anchor", "formula", "parameters", "value", "target"};
    const double a1 = bound_thm1(0.1, 1.0, 1.0, 4000, 1.0);
    const double a2 = bound_cru(0.9, 1.0, 4000);
    const double a3 = gaussian_kappa_ratio(3, 1.0);
    t.rows.push_back({"1", "kappa*exp(-eps^2*tau^2*d/(8*r^2))", "eps=0.1;tau=1;r=1;d=4000;kappa=1", num(a1),
                      "0.67%"});
    t.rows.push_back({"2", "exp(-((1-beta)/beta)^2*d/(8*r^2))", "beta=0.9;r=1;d=4000", num(a2), "0.21%"});
    t.rows.push_back({"2b", "1-beta^2", "beta=0.9", num(1.0 - 0.9 * 0.9), "19%"});
    t.rows.push_back({"3", "kappa(d;r) <= exp(r^2/2)", "d=3;r=1", num(a3), "<= " + num(std::exp(0.5))});
    return t;
}

Table run_experiment(const Config& config, const RunOptions& options) {
    const std::string id = config.get("experiment");
    if (id == "thm1")
        return run_thm1(config, options);
    if (id == "thm2")
        return run_thm2(config, options);
    if (id == "cru")
        return run_cru(config, options);
    if (id == "prop3-thm4" || id == "prop3" || id == "thm4")
        return run_prop3_thm4(config, options);
    if (id == "checks")
        return run_support_checks(config, options);
    if (id == "anchors")
        return reproduce_anchors();
    throw Error("unknown experiment '" + id + "'");
}

void write_outputs(const std::string& dir, const Table& table, const Config& config, double wall_seconds) {
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(dir) / "plotdata");
    {
        std::ofstream out(fs::path(dir) / "results.csv", std::ios::binary);
        out << table.csv();
        if (!out)
            throw Error("cannot write results.csv under " + dir);
    }
    {
        const std::string canon = config.canonical();
        char hash[32];
        std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(canon)));
        std::ofstream out(fs::path(dir) / "manifest.txt", std::ios::binary);
        out << "tool=risklab\n"
            << "version=" << kToolVersion << '\n'
            << "schema=" << kResultsSchema << '\n'
            << "experiment=" << table.experiment << '\n'
            << "config_hash=" << hash << '\n'
            << "rows=" << table.rows.size() << '\n'
            << "wall_time_seconds=" << wall_seconds << '\n'
            << "outputs=results.csv";
        for (const auto& p : table.plots)
            out << ",plotdata/" << p.name << ".csv";
        out << "\n[config]\n" << canon;
    }
    for (const auto& p : table.plots) {
        std::ofstream out(fs::path(dir) / "plotdata" / (p.name + ".csv"), std::ios::binary);
        out << "d,value\n";
        for (const auto& [x, y] : p.points)
            out << format_double(x) << ',' << format_double(y) << '\n';
    }
}

} // namespace risklab
