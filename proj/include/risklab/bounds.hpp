#pragma once

#include <string>
#include <utility>
#include <vector>

namespace risklab {

/// Default for the unspecified universal constant c. Every report records the
/// value actually used.
inline constexpr double kDefaultUniversalC = 1.0;

/// kappa * exp(-eps^2 tau^2 d / 8 r^2)
double bound_thm1(double eps, double tau, double r, int d, double kappa);
/// kappa * exp(-eps^2 d / 8 r^2)
double bound_thm2(double eps, double r, int d, double kappa);
/// exp(-((1 - beta)/beta)^2 d / 8 r^2)
double bound_cru(double beta, double r, int d);
/// 0.5 * exp(-c eps sqrt(d))
double bound_thm4(double c, double eps, int d);
/// 4 * exp(-c eps / sqrt(d)) * (d!)^(-1/2d)
double bound_prop7(double c, double eps, int d);
/// exp(-delta^2 d / 8 r^2)
double bound_lemma1(double delta, double r, int d);
/// 1 - 0.5 * exp(-c delta d), a lower bound on the measure of an extension.
double bound_cor16(double c, double delta, int d);

/// sqrt(pi) * (sqrt(3) - 1)
double width_alpha();
/// (2/alpha) (alpha d / 2)^(1/d); at most 4 for every d >= 1.
double prop7_prefactor(int d);
/// (sqrt(3 + 2/d) - 1)^(d-1), the constant-width volume factor for a
/// (d-1)-dimensional body inside the simplex hyperplane of R^d.
double constant_width_factor(int d);
/// constant_width_factor(d) * Vol(B^{d-1}(theta/2)).
double constant_width_volume_lower_bound(int d, double theta);
/// Upper bound on theta before the prefactor is rounded up to 4:
/// (2/alpha)(alpha d/2)^(1/d) exp(-c eps/sqrt(d)) (d!)^(-1/2d).
double prop7_sharp(double c, double eps, int d);

struct BoundReport {
    std::string theorem_id;
    std::vector<std::pair<std::string, double>> parameters;
    double value = 0.0;
    double clipped_value = 0.0;

    static std::string csv_header();
    std::string csv_row() const;
    std::string describe() const;
};

BoundReport report_thm1(double eps, double tau, double r, int d, double kappa);
BoundReport report_thm2(double eps, double r, int d, double kappa);
BoundReport report_cru(double beta, double r, int d);
BoundReport report_thm4(double c, double eps, int d);
BoundReport report_prop7(double c, double eps, int d);
BoundReport report_lemma1(double delta, double r, int d);
BoundReport report_cor16(double c, double delta, int d);

/// Shortest round-trip decimal form (17 significant digits).
std::string format_double(double value);

} // namespace risklab
