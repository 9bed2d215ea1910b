#include "risklab/bounds.hpp"

#include "risklab/error.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace risklab {

namespace {

void check_dimension(int d) { require(d >= 1, "bound: dimension must be >= 1"); }

double clip(double v) { return v < 1.0 ? v : 1.0; }

BoundReport make(std::string id, std::vector<std::pair<std::string, double>> params, double value) {
    BoundReport r;
    r.theorem_id = std::move(id);
    r.parameters = std::move(params);
    r.value = value;
    r.clipped_value = clip(value);
    return r;
}

} // namespace

double bound_thm1(double eps, double tau, double r, int d, double kappa) {
    require(eps >= 0.0 && eps < 1.0, "bound_thm1: eps must lie in [0, 1)");
    require(tau > 0.0, "bound_thm1: tau must be positive");
    require(r > 0.0, "bound_thm1: r must be positive");
    require(kappa >= 1.0, "bound_thm1: kappa must be >= 1");
    check_dimension(d);
    return std::exp(std::log(kappa) - eps * eps * tau * tau * d / (8.0 * r * r));
}

double bound_thm2(double eps, double r, int d, double kappa) {
    require(eps >= 0.0 && eps < 1.0, "bound_thm2: eps must lie in [0, 1)");
    require(r > 0.0, "bound_thm2: r must be positive");
    require(kappa >= 1.0, "bound_thm2: kappa must be >= 1");
    check_dimension(d);
    return std::exp(std::log(kappa) - eps * eps * d / (8.0 * r * r));
}

double bound_cru(double beta, double r, int d) {
    require(beta > 0.0, "bound_cru: beta must be positive");
    require(beta <= 1.0, "bound_cru: beta must be <= 1");
    require(r > 0.0, "bound_cru: r must be positive");
    check_dimension(d);
    const double q = (1.0 - beta) / beta;
    return std::exp(-q * q * d / (8.0 * r * r));
}

double bound_thm4(double c, double eps, int d) {
    require(c > 0.0, "bound_thm4: c must be positive");
    require(eps >= 0.0, "bound_thm4: eps must be >= 0");
    check_dimension(d);
    return 0.5 * std::exp(-c * eps * std::sqrt(static_cast<double>(d)));
}

double bound_prop7(double c, double eps, int d) {
    require(c > 0.0, "bound_prop7: c must be positive");
    require(eps >= 0.0, "bound_prop7: eps must be >= 0");
    check_dimension(d);
    const double dd = d;
    return 4.0 * std::exp(-c * eps / std::sqrt(dd) - std::lgamma(dd + 1.0) / (2.0 * dd));
}

double bound_lemma1(double delta, double r, int d) {
    require(delta >= 0.0, "bound_lemma1: delta must be >= 0");
    require(r > 0.0, "bound_lemma1: r must be positive");
    check_dimension(d);
    return std::exp(-delta * delta * d / (8.0 * r * r));
}

double bound_cor16(double c, double delta, int d) {
    require(c > 0.0, "bound_cor16: c must be positive");
    require(delta >= 0.0, "bound_cor16: delta must be >= 0");
    check_dimension(d);
    return 1.0 - 0.5 * std::exp(-c * delta * d);
}

double width_alpha() { return std::sqrt(std::numbers::pi) * (std::numbers::sqrt3 - 1.0); }

double prop7_prefactor(int d) {
    check_dimension(d);
    const double a = width_alpha();
    return (2.0 / a) * std::exp(std::log(a * d / 2.0) / d);
}

double constant_width_factor(int d) {
    check_dimension(d);
    return std::pow(std::sqrt(3.0 + 2.0 / d) - 1.0, d - 1);
}

double constant_width_volume_lower_bound(int d, double theta) {
    require(d >= 2, "constant-width bound: dimension must be >= 2");
    require(theta >= 0.0, "constant-width bound: width must be >= 0");
    const double n = d - 1.0;
    const double log_ball = 0.5 * n * std::log(std::numbers::pi) - std::lgamma(0.5 * n + 1.0);
    if (theta == 0.0)
        return 0.0;
    return constant_width_factor(d) * std::exp(log_ball + n * std::log(theta / 2.0));
}

double prop7_sharp(double c, double eps, int d) {
    require(c > 0.0, "prop7: c must be positive");
    check_dimension(d);
    const double dd = d;
    return prop7_prefactor(d) * std::exp(-c * eps / std::sqrt(dd) - std::lgamma(dd + 1.0) / (2.0 * dd));
}

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string BoundReport::csv_header() { return "theorem,parameters,value,clipped_value"; }

std::string BoundReport::csv_row() const {
    std::ostringstream out;
    out << theorem_id << ',';
    for (std::size_t i = 0; i < parameters.size(); ++i)
        out << (i ? ";" : "") << parameters[i].first << '=' << format_double(parameters[i].second);
    out << ',' << format_double(value) << ',' << format_double(clipped_value);
    return out.str();
}

std::string BoundReport::describe() const {
    std::ostringstream out;
    out << theorem_id << '(';
    for (std::size_t i = 0; i < parameters.size(); ++i)
        out << (i ? ", " : "") << parameters[i].first << '=' << parameters[i].second;
    out << ") = " << value;
    if (clipped_value != value)
        out << " (clipped " << clipped_value << ')';
    return out.str();
}

BoundReport report_thm1(double eps, double tau, double r, int d, double kappa) {
    return make("thm1", {{"eps", eps}, {"tau", tau}, {"r", r}, {"d", d}, {"kappa", kappa}},
                bound_thm1(eps, tau, r, d, kappa));
}

BoundReport report_thm2(double eps, double r, int d, double kappa) {
    return make("thm2", {{"eps", eps}, {"r", r}, {"d", d}, {"kappa", kappa}}, bound_thm2(eps, r, d, kappa));
}

BoundReport report_cru(double beta, double r, int d) {
    return make("cru", {{"beta", beta}, {"r", r}, {"d", d}}, bound_cru(beta, r, d));
}

BoundReport report_thm4(double c, double eps, int d) {
    return make("thm4", {{"c", c}, {"eps", eps}, {"d", d}}, bound_thm4(c, eps, d));
}

BoundReport report_prop7(double c, double eps, int d) {
    return make("prop7", {{"c", c}, {"eps", eps}, {"d", d}}, bound_prop7(c, eps, d));
}

BoundReport report_lemma1(double delta, double r, int d) {
    return make("lemma1", {{"delta", delta}, {"r", r}, {"d", d}}, bound_lemma1(delta, r, d));
}

BoundReport report_cor16(double c, double delta, int d) {
    return make("cor16", {{"c", c}, {"delta", delta}, {"d", d}}, bound_cor16(c, delta, d));
}

} // namespace risklab
