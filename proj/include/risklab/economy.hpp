#pragma once

#include "risklab/preferences.hpp"

#include <string>
#include <vector>

namespace risklab {

struct Agent {
    PreferenceSpec preference;
    Vec endowment;
};

enum class AllocationSpace { nonnegative, unrestricted };

class EconomySpec {
public:
    EconomySpec(std::vector<Agent> agents, AllocationSpace space = AllocationSpace::nonnegative);

    const std::vector<Agent>& agents() const { return agents_; }
    const Agent& agent(std::size_t i) const { return agents_[i]; }
    std::size_t size() const { return agents_.size(); }
    int dimension() const { return dim_; }
    const Vec& aggregate() const { return aggregate_; }
    AllocationSpace allocation_space() const { return space_; }
    /// max_s omega_s - min_s omega_s <= 1e-12
    bool no_aggregate_uncertainty() const;
    /// Common per-state aggregate; requires no aggregate uncertainty.
    double omega_bar() const;
    /// min_i min_s omega_is
    double tau() const;

private:
    std::vector<Agent> agents_;
    AllocationSpace space_;
    int dim_ = 0;
    Vec aggregate_;
};

/// One row per agent, one column per state.
using Allocation = Eigen::MatrixXd;

inline Act act_of(const Allocation& f, std::size_t i) { return f.row(static_cast<Eigen::Index>(i)).transpose(); }

/// Rows sum to the aggregate within 1e-9 and respect the allocation space.
void check_allocation(const EconomySpec& econ, const Allocation& f);
Allocation endowment_allocation(const EconomySpec& econ);

struct EquilibriumResult {
    Vec price;  // ||p||_1 = 1
    Allocation allocation;
    double residual = 0.0;  // max_s |excess demand_s|
    int iterations = 0;
};

/// Price iteration for Cobb-Douglas economies. Throws ConvergenceError after
/// 1e5 iterations.
EquilibriumResult tatonnement_equilibrium(const EconomySpec& econ);

/// Cobb-Douglas demand at prices p: x_is = mu_is (p . omega_i) / p_s.
Allocation cobb_douglas_demand(const EconomySpec& econ, const Vec& price);

/// (1 - eps)(f_i + z) strictly preferred to f_i; false outside the domain.
bool individual_improvement_event(const PreferenceSpec& pref, const Act& f_i, const Vec& z, double eps);
/// Some agent improves.
bool any_improvement(const EconomySpec& econ, const Allocation& f, const Vec& z, double eps);

enum class ScitovskyMethod { dual_bisection, dual_mirror, linear_program, supergradient, infeasible };

struct ScitovskyResult {
    bool member = false;
    double value = 0.0;  // best primal max-min margin found
    double upper_bound = 0.0;
    Allocation split;
    ScitovskyMethod method = ScitovskyMethod::infeasible;
    int iterations = 0;
};

inline constexpr double kBoundaryBand = 1e-9;

/// max over splits g of w of min_i [u_i((1-eps) g_i) - u_i(f_i)]. `member` is
/// value > 1e-9. Never throws for the tie band; callers decide.
ScitovskyResult scitovsky_solve(const EconomySpec& econ, const Allocation& f, const Vec& w, double eps);

/// w in the eps-Scitovsky set of f. Throws BoundaryIndeterminate when the
/// optimum lies within 1e-9 of zero.
bool scitovsky_member(const EconomySpec& econ, const Allocation& f, const Vec& w, double eps);

/// Smallest beta with beta * omega in the Scitovsky set, by bisection to 1e-6.
double cru(const EconomySpec& econ, const Allocation& f);

struct RhoReport {
    double definitional = 0.0;
    double sqrt_mode = 0.0;  // 2 sqrt(d)
};

/// Exact for |I| <= 4, d <= 12.
RhoReport rho(const EconomySpec& econ);
double rho_sqrt_mode(int d);

/// Some allocation improves every agent by the eps margin. Tie-band optima
/// count as not dominated.
bool pareto_dominated_eps(const EconomySpec& econ, const Allocation& f, double eps);

struct BeliefVolumeSplit {
    double vol_j = 0.0;   // relative to Vol(simplex)
    double vol_jc = 0.0;
    double min_rel_vol = 0.0;
    double min_ci_lo = 0.0;
    double min_ci_hi = 0.0;
    bool empty_j = false;
    bool empty_jc = false;
    bool exact = false;
};

/// Relative simplex volumes of the intersected belief sets over J and its
/// complement. Exact where a formula applies, otherwise hit-or-miss with `mc`.
BeliefVolumeSplit belief_volume_split(const EconomySpec& econ, const Allocation& f, const std::vector<int>& j,
                                      const VolumeMethod& mc);

/// Intersection of the belief sets of the listed agents.
ConvexBody joint_belief_set(const EconomySpec& econ, const Allocation& f, const std::vector<int>& agents);

struct WidthReport {
    double theta_min = 0.0;
    double theta_max = 0.0;
    bool constant_width = false;
};

/// Width max f.mu - min f.mu of a prior set along random unit directions in
/// the simplex hyperplane.
WidthReport width_report(const ConvexBody& priors, std::size_t n_directions, const SeedSpec& seed);
double width_along(const ConvexBody& priors, const Vec& direction);

/// argmax sum_i lambda_i u_i(f_i) over splits of the aggregate, smooth agents only.
Allocation planner_allocation(const EconomySpec& econ, const Vec& weights);

/// Normalized supporting price of a Pareto optimal allocation.
Vec supporting_price(const EconomySpec& econ, const Allocation& f);

/// CSV rows (agent, state, value).
std::string allocation_csv(const Allocation& f);

} // namespace risklab
