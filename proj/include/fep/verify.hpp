#pragma once

#include <string>
#include <vector>

namespace fep {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;  // first failure, or a short summary
};

// Closed-form state counts against brute-force enumeration, both geometries,
// every admissible k with N <= max_n.
std::vector<CheckResult> verify_counting(int max_n);

// Exhaustive round trips: configuration <-> height path, segment <-> pile
// image, and the slope readout as a bijection onto the exclusion state
// space, for N <= max_n.
std::vector<CheckResult> verify_bijections(int max_n);

// Stationary residuals (<= 1e-12) and pairwise detailed balance for the
// closed-form measures, N <= max_n.
std::vector<CheckResult> verify_stationarity(int max_n);

// Entrywise generator conjugacies (<= 1e-14): pile map, slope readout on the
// ergodic component, and the minimal-start sector against right-reservoir
// exclusion, N <= max_n.
std::vector<CheckResult> verify_intertwinings(int max_n);

std::vector<CheckResult> verify_all(int max_n);

bool all_passed(const std::vector<CheckResult>& checks);

}  // namespace fep
