#include "fep/clock_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fep {

namespace {

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

struct SplitMix {
    std::uint64_t s;
    std::uint64_t next() {
        s += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

constexpr int kMaxPerSlot = 64;

}  // namespace

double ClockField::next_ring(int i, int y, int dir, double t) const {
    double rate = (dir == 0) ? p : q;
    if (rate <= 0.0) return std::numeric_limits<double>::infinity();
    if (t < 0.0) t = 0.0;
    long long s = static_cast<long long>(std::floor(t));
    for (long long guard = 0; guard < (1ll << 32); ++s, ++guard) {
        std::uint64_t h = seed;
        h = mix64(h ^ (0x517cc1b727220a95ull + static_cast<std::uint32_t>(i)));
        h = mix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(y)) *
                          0x9ddfea08eb382d69ull);
        h = mix64(h ^ static_cast<std::uint64_t>(dir + 1));
        h = mix64(h ^ static_cast<std::uint64_t>(s) * 0xc2b2ae3d27d4eb4full);
        SplitMix rng{h};
        // ring count in the unit slot [s, s+1): Poisson(rate) by inversion
        double u = rng.uniform();
        double pmf = std::exp(-rate);
        double cdf = pmf;
        int count = 0;
        while (u > cdf && count < kMaxPerSlot) {
            ++count;
            pmf *= rate / count;
            cdf += pmf;
        }
        if (count == 0) continue;
        double times[kMaxPerSlot];
        for (int c = 0; c < count; ++c)
            times[c] = static_cast<double>(s) + rng.uniform();
        std::sort(times, times + count);
        for (int c = 0; c < count; ++c)
            if (times[c] > t) return times[c];
    }
    throw std::runtime_error("clock stream scan exceeded guard limit");
}

}  // namespace fep
