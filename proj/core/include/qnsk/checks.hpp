#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qnsk {

struct CheckResult {
    int criterion = 0;  ///< acceptance criterion number, 0 for plain property checks
    std::string family;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
    double budget = 0.0;  ///< runtime limit in seconds, 0 = none
};

/// Family names understood by --filter.
std::vector<std::string> check_families();

/// Runs the invariant suite. An empty filter selects everything; otherwise a check
/// runs when its family equals the filter or its name contains it.
std::vector<CheckResult> run_checks(const std::string& filter, std::uint64_t seed = 0);

/// Acceptance criterion `id` in 1..13 at its stated tolerance and runtime budget.
CheckResult run_criterion(int id, std::uint64_t seed = 0);

}  // namespace qnsk
