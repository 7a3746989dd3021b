#pragma once

#include <cstdint>

namespace fep {

// Shared field of Poisson clocks, one up-stream (rate p) and one down-stream
// (rate q) per lattice site (i, y). Streams are realized lazily from a
// counter-based generator hashed on (seed, i, y, dir, time slot), so any
// query is O(1) expected, two queries agree, and the order of queries is
// irrelevant. Replicas sharing a field therefore see identical rings, which
// is what makes the grand coupling work.
struct ClockField {
    double p = 0.5;
    double q = 0.5;
    std::uint64_t seed = 0;

    // First ring strictly after time t in stream (i, y, dir).
    // dir: 0 = up (rate p), 1 = down (rate q). Returns +inf if the rate is 0.
    double next_ring(int i, int y, int dir, double t) const;
};

}  // namespace fep
