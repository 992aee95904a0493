#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qnode/config.hpp"
#include "qnode/simulator.hpp"

namespace qnode {

/// Exit codes: 0 feasible/successful, 2 infeasible, 1 error (errors are
/// thrown, callers map them to 1).
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInfeasible = 2;

struct RunReport {
    int exit_code = kExitOk;
    std::string verdict;  // "feasible" | "infeasible" | "ok"
    std::optional<double> min_margin;
    std::optional<double> argmin_t;
    std::optional<double> predicted_efficiency;
    std::optional<double> simulated_efficiency;
    std::optional<Budgets> budgets;
    std::vector<std::string> warnings;
    std::vector<std::string> files;  // manifest of written outputs
    std::string text;                // rendered plain-text report
};

/// Executes the scenario, writes all series as CSV plus a plain-text report
/// and a JSON summary into the configured output directory, and returns the
/// report. Identical configs produce byte-identical outputs; sweep points
/// run on a bounded worker pool but are written in config order.
RunReport run(const ScenarioConfig& cfg);

} // namespace qnode
