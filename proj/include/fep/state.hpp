#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fep {

using Bits = std::vector<std::uint8_t>;

// Hard cap on lattice sizes accepted by the validating constructors.
inline constexpr int kMaxSites = 1 << 20;

// Exclusion configuration on the segment {1,...,N}. Site x is occ[x-1].
struct SegmentConfig {
    int N = 0;
    int k = 0;
    Bits occ;

    SegmentConfig() = default;
    SegmentConfig(int n, Bits bits);

    bool at(int site) const { return occ[static_cast<size_t>(site - 1)] != 0; }
    std::string to_string() const;
    static SegmentConfig from_string(const std::string& s);

    bool operator==(const SegmentConfig& o) const = default;
};

// Exclusion configuration on the circle T_N = Z/NZ. Sites are 0-based.
struct CircleConfig {
    int N = 0;
    int k = 0;
    Bits occ;

    CircleConfig() = default;
    CircleConfig(int n, Bits bits);

    bool at(int site) const;
    std::string to_string() const;
    static CircleConfig from_string(const std::string& s);

    bool operator==(const CircleConfig& o) const = default;
};

// Clockwise interval [start,end] on T_N together with its particle count.
struct ErgodicRegion {
    int start = 0;
    int end = 0;
    int particles = 0;
    bool operator==(const ErgodicRegion& o) const = default;
};

struct ErgodicRegionSet {
    bool full_circle = false;  // configuration already in G_{N,k}
    std::vector<ErgodicRegion> regions;
};

// Ergodic component membership: no adjacent holes and occupied endpoints
// (segment), no adjacent holes anywhere (circle).
bool is_ergodic_segment(const SegmentConfig& cfg);
bool is_ergodic_circle(const CircleConfig& cfg);

// Minimal set of maximal ergodic intervals covering all particles, ordered by
// clockwise start index from site 0. Configurations already in G_{N,k} get the
// distinguished full-circle marker.
ErgodicRegionSet ergodic_regions(const CircleConfig& cfg);

// True iff at most m ergodic regions jointly hold at least N-k particles.
bool in_class_I_m(const CircleConfig& cfg, int m);

// |E_{N,k}| = C(k-1, N-k) and |G_{N,k}| = (N/k) C(k, N-k), for N/2 < k <= N.
std::uint64_t count_ergodic_segment(int N, int k);
std::uint64_t count_ergodic_circle(int N, int k);

// Enumeration oracles (exponential in N; intended for N <= ~20).
std::uint64_t count_ergodic_segment_enum(int N, int k);
std::uint64_t count_ergodic_circle_enum(int N, int k);
std::vector<SegmentConfig> enumerate_segment(int N, int k);
std::vector<CircleConfig> enumerate_circle(int N, int k);

// Named extremal configurations (N/2 < k < N).
SegmentConfig xi_minus(int N, int k);   // all particles packed left
SegmentConfig xi_plus(int N, int k);    // all particles packed right
SegmentConfig xi_vee(int N, int k);     // minimal ergodic configuration
SegmentConfig xi_wedge(int N, int k);   // maximal ergodic configuration
SegmentConfig h_sample(int N, int k);   // deterministic member of H_{N,k}
bool in_H(const SegmentConfig& cfg);    // xi(1)=0, xi(N)=1, no adjacent holes

}  // namespace fep
