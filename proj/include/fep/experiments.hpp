#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "fep/engine.hpp"
#include "fep/state.hpp"

namespace fep {

struct SummaryStats {
    int replicates = 0;
    int censored = 0;
    double mean = 0;        // over uncensored samples
    double std_error = 0;   // of the mean
    double q05 = 0, q50 = 0, q95 = 0;  // +inf where the quantile is censored
    bool quantile_censored = false;
    double censored_fraction = 0;
};

struct Replicate {
    int index = 0;
    std::uint64_t seed = 0;
    double value = 0;
    bool censored = false;
};

struct ExperimentResult {
    std::vector<Replicate> samples;  // ordered by replicate index
    SummaryStats stats;
    double horizon = 0;
    int horizon_doublings = 0;
};

SummaryStats summarize(const std::vector<Replicate>& samples);

// Coalescence time of the extremal pair under the shared clock field at
// p = 1/2. Horizon 0 selects the default policy (10 N^2 log N, doubled up
// to three times while censoring exceeds 1%); censoring above 5% after the
// policy is a hard failure.
ExperimentResult coupling_time_sfep(int N, int k, int reps, std::uint64_t seed_base,
                                    int threads = 1, double horizon = 0);

enum class StartKind {
    MinimalSegment,        // packed-left extremal configuration
    MaximalSegment,        // packed-right extremal configuration
    AlmostErgodicSegment,  // deterministic member of the almost-ergodic set
    CircleBlock,           // single block of k particles on the circle
};

// First hitting time of the ergodic component. A pile-map consistency check
// runs on the leading replicates; the minimal segment start additionally
// verifies that the hit coincides with the right endpoint reaching its cap.
ExperimentResult hitting_time(StartKind start, int N, int k, double p, int reps,
                              std::uint64_t seed_base, int threads = 1, double horizon = 0);

struct LinearFit {
    double slope = 0;
    double intercept = 0;
    double slope_error = 0;
};

// Ordinary least squares with the textbook slope standard error.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// max/min over positive entries.
double spread_ratio(const std::vector<double>& values);

// Row schema: N,k,p,replicate,seed,statistic,value,censored.
void write_experiment_csv(std::ostream& os, int N, int k, double p, const char* statistic,
                          const ExperimentResult& result);

}  // namespace fep
