#pragma once

#include "risklab/geometry.hpp"

#include <string>
#include <vector>

namespace risklab {

using Act = Vec;

/// Strict preference margin on utilities.
inline constexpr double kTolStrict = 1e-10;
/// Vertices within this of the minimum belong to the max-min argmin face.
inline constexpr double kFaceTol = 1e-10;

enum class PreferenceKind { cobb_douglas, crra, meu };
enum class Bernoulli { linear, log };

class PreferenceSpec {
public:
    /// Expected log utility sum_s mu_s ln f_s; prior strictly positive.
    static PreferenceSpec cobb_douglas(Vec prior);
    /// sum_s mu_s f_s^(1-gamma)/(1-gamma), log at gamma = 1.
    static PreferenceSpec crra(Vec prior, double gamma);
    /// min over the prior polytope of the expected Bernoulli utility.
    static PreferenceSpec meu(Polytope priors, Bernoulli bernoulli = Bernoulli::linear);
    /// Expected value under a single prior (max-min with a singleton set).
    static PreferenceSpec risk_neutral(Vec prior);

    PreferenceKind kind() const { return kind_; }
    int dimension() const { return dim_; }
    const Vec& prior() const { return prior_; }
    double gamma() const { return gamma_; }
    const Polytope& priors() const { return priors_; }
    Bernoulli bernoulli() const { return bernoulli_; }

    /// True if utility is differentiable on the interior of its domain.
    bool smooth() const { return kind_ != PreferenceKind::meu || priors_.vertices.size() == 1; }
    /// Domain needs strictly positive consumption.
    bool needs_positive() const;
    /// Domain needs nonnegative consumption.
    bool needs_nonnegative() const;
    bool in_domain(const Act& f) const;
    std::string describe() const;

private:
    PreferenceSpec() = default;

    PreferenceKind kind_ = PreferenceKind::cobb_douglas;
    int dim_ = 0;
    Vec prior_;
    double gamma_ = 1.0;
    Polytope priors_;
    Bernoulli bernoulli_ = Bernoulli::linear;
};

/// Throws DomainError outside the domain.
double utility(const PreferenceSpec& pref, const Act& f);
/// Degree-one homogeneous form of Cobb-Douglas, prod_s f_s^mu_s. Represents
/// the same preference as the log form.
double utility_cd_exponential(const PreferenceSpec& pref, const Act& f);
/// Bernoulli utility u(x) of the variant (used per state).
double bernoulli_value(const PreferenceSpec& pref, double x);

bool strictly_prefers(const PreferenceSpec& pref, const Act& g, const Act& f);
/// (1 - eps) g strictly preferred to f.
bool eps_ucs_contains(const PreferenceSpec& pref, const Act& f, const Act& g, double eps);

/// Utility gradient for smooth variants; throws for non-smooth ones.
Vec utility_gradient(const PreferenceSpec& pref, const Act& f);

/// Normalized supporting priors of the upper contour set at f (V-rep on the simplex).
Polytope belief_set(const PreferenceSpec& pref, const Act& f);

struct ExtensionReport {
    bool empty = false;
    double value = 0.0;        // best found max_i dist(nu, B_i)
    double lower_bound = 0.0;  // certified lower bound on the minimum
    Vec witness;               // nu attaining `value`
};

/// Minimizes max_i dist(nu, B_i) over the simplex and decides whether the
/// open delta-extensions have a common point. Throws BoundaryIndeterminate
/// inside the 1e-9 band around delta.
ExtensionReport belief_extension_report(const std::vector<Polytope>& sets, double delta);
bool belief_set_extension_empty(const std::vector<Polytope>& sets, double delta);

} // namespace risklab
