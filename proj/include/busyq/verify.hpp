#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace busyq {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Cross-module verification: analytic results against their independent
/// routes (closed form vs quadrature vs series vs simulation). Prints one
/// pass/fail line per check to `progress` when given. Simulation-backed
/// checks are seeded and deterministic.
std::vector<CheckResult> run_acceptance(std::ostream* progress = nullptr);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace busyq
