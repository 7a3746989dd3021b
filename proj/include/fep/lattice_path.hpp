#pragma once

#include <vector>

#include "fep/state.hpp"

namespace fep {

// Height-function representation of a segment configuration:
// h[i-1] = eta(i) = 2 x_i - 3 i + 1 for the i-th leftmost particle.
struct LatticePath {
    int N = 0;
    int k = 0;
    std::vector<int> h;

    int at(int i) const { return h[static_cast<size_t>(i - 1)]; }
    int& at(int i) { return h[static_cast<size_t>(i - 1)]; }
    int right_cap() const { return 2 * N - 3 * k + 1; }

    bool operator==(const LatticePath& o) const = default;
};

LatticePath to_path(const SegmentConfig& cfg);

// Inverse of to_path; throws on parity/step/boundary violations.
SegmentConfig from_path(const LatticePath& p);

// Validation without conversion; returns false instead of throwing.
bool is_valid_path(const LatticePath& p);

// Coordinatewise partial order.
bool leq(const LatticePath& a, const LatticePath& b);

// eta(1)=0, eta(k)=2N-3k+1 and all steps in {-1,+1}.
bool is_ergodic_path(const LatticePath& p);

// Indices i in [1,k-1] with eta(i+1)-eta(i) > 1.
std::vector<int> steep_segments(const LatticePath& p);

// Slope encoding of an ergodic path: sigma(x) = (eta(x+1)-eta(x)+1)/2 on
// [k-1], carrying N-k particles. Rejects non-ergodic paths.
Bits path_to_sep(const LatticePath& p);

// Extremal paths.
LatticePath eta_minus(int N, int k);
LatticePath eta_plus(int N, int k);
LatticePath eta_vee(int N, int k);
LatticePath eta_wedge(int N, int k);

}  // namespace fep
