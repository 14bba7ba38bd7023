#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "qnsk/config.hpp"
#include "qnsk/galerkin_solver.hpp"

namespace qnsk {

enum ExitCode : int { kExitOk = 0, kExitInvariant = 1, kExitRunFailure = 2, kExitBadConfig = 3 };

/// Generated (and optionally truncated) initial state on grid g.
FluidState initial_state(const ExperimentConfig& c, const Grid& g);

/// CSV with a leading "# {json}" metadata line, a header row and %.17g values.
std::string csv_document(const std::string& meta_json, const std::vector<std::string>& columns,
                         const std::vector<std::vector<double>>& rows);

/// One sweep row: axis value plus terminal diagnostics of that run.
struct SweepRow {
    double axis = 0.0;
    RunStatus status = RunStatus::completed;
    std::string message;
    DiagnosticsRecord final;
    ScalarField R;  ///< terminal density
};

/// L2 distance of two densities on their common sub-box (grids must share dy).
double overlap_l2_distance(const ScalarField& a, const ScalarField& b);

/// Runs the ladder (in parallel when c.threads > 1) and returns rows in ladder order.
std::vector<SweepRow> run_sweep(const ExperimentConfig& c);

/// Dispatches on c.kind, writing artifacts under c.out_dir. Returns an ExitCode.
int run_experiment(const ExperimentConfig& c, std::ostream& log);

}  // namespace qnsk
