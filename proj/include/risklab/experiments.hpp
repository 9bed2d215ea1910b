#pragma once

#include "risklab/config.hpp"

#include <string>
#include <utility>
#include <vector>

namespace risklab {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kResultsSchema = "risklab-results/1";

struct PlotSeries {
    std::string name;  // file stem under plotdata/
    std::vector<std::pair<double, double>> points;
};

struct Table {
    std::string experiment;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<PlotSeries> plots;

    std::string csv() const;
    /// Value of `column` in row `row`.
    const std::string& at(std::size_t row, const std::string& column) const;
};

struct RunOptions {
    unsigned threads = 0;
    bool condition_positive_price = false;
};

/// P(some agent improves) for perturbations of an equilibrium or planner allocation.
Table run_thm1(const Config& config, const RunOptions& options = {});
/// P(omega + z in the eps-Scitovsky set) for a Pareto optimal allocation.
Table run_thm2(const Config& config, const RunOptions& options = {});
/// Resource utilization beta, then membership at improvement level 1 - beta^2.
Table run_cru(const Config& config, const RunOptions& options = {});
/// Belief-set extension emptiness and bipartition volumes for max-min economies.
Table run_prop3_thm4(const Config& config, const RunOptions& options = {});
/// Invariant suites; one row per check.
Table run_support_checks(const Config& config, const RunOptions& options = {});
/// The three headline numbers with their formulas.
Table reproduce_anchors();

/// Dispatches on `experiment=`.
Table run_experiment(const Config& config, const RunOptions& options = {});

/// results.csv, manifest.txt and plotdata/*.csv under `dir`.
void write_outputs(const std::string& dir, const Table& table, const Config& config, double wall_seconds);

/// Makes free text safe for a single CSV field.
std::string csv_escape(const std::string& text);

} // namespace risklab
