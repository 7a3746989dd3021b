#include "fep/lattice_path.hpp"

#include <stdexcept>

namespace fep {

LatticePath to_path(const SegmentConfig& cfg) {
    if (cfg.k < 1) throw std::invalid_argument("to_path requires at least one particle");
    LatticePath p;
    p.N = cfg.N;
    p.k = cfg.k;
    p.h.reserve(static_cast<size_t>(cfg.k));
    int i = 0;
    for (int x = 1; x <= cfg.N; ++x) {
        if (cfg.at(x)) {
            ++i;
            p.h.push_back(2 * x - 3 * i + 1);
        }
    }
    return p;
}

bool is_valid_path(const LatticePath& p) {
    if (p.k < 1 || static_cast<int>(p.h.size()) != p.k) return false;
    if (p.at(1) < 0 || p.at(p.k) > p.right_cap()) return false;
    for (int i = 1; i <= p.k; ++i) {
        // eta(i) and 1-i have equal parity
        if (((p.at(i) - (1 - i)) & 1) != 0) return false;
    }
    for (int i = 1; i < p.k; ++i) {
        if (p.at(i + 1) - p.at(i) < -1) return false;
    }
    return true;
}

SegmentConfig from_path(const LatticePath& p) {
    if (!is_valid_path(p)) throw std::invalid_argument("corrupted lattice path");
    Bits b(static_cast<size_t>(p.N), 0);
    for (int i = 1; i <= p.k; ++i) {
        int x = (p.at(i) + 3 * i - 1) / 2;
        b[static_cast<size_t>(x - 1)] = 1;
    }
    return SegmentConfig(p.N, std::move(b));
}

bool leq(const LatticePath& a, const LatticePath& b) {
    if (a.N != b.N || a.k != b.k) throw std::invalid_argument("paths live on different spaces");
    for (int i = 1; i <= a.k; ++i) {
        if (a.at(i) > b.at(i)) return false;
    }
    return true;
}

bool is_ergodic_path(const LatticePath& p) {
    if (p.at(1) != 0 || p.at(p.k) != p.right_cap()) return false;
    for (int i = 1; i < p.k; ++i) {
        int d = p.at(i + 1) - p.at(i);
        if (d != 1 && d != -1) return false;
    }
    return true;
}

std::vector<int> steep_segments(const LatticePath& p) {
    std::vector<int> out;
    for (int i = 1; i < p.k; ++i) {
        if (p.at(i + 1) - p.at(i) > 1) out.push_back(i);
    }
    return out;
}

Bits path_to_sep(const LatticePath& p) {
    if (!is_ergodic_path(p)) throw std::invalid_argument("path_to_sep requires an ergodic path");
    Bits sigma(static_cast<size_t>(p.k - 1));
    for (int x = 1; x < p.k; ++x) {
        sigma[static_cast<size_t>(x - 1)] =
            static_cast<std::uint8_t>((p.at(x + 1) - p.at(x) + 1) / 2);
    }
    return sigma;
}

LatticePath eta_minus(int N, int k) { return to_path(xi_minus(N, k)); }
LatticePath eta_plus(int N, int k) { return to_path(xi_plus(N, k)); }
LatticePath eta_vee(int N, int k) { return to_path(xi_vee(N, k)); }
LatticePath eta_wedge(int N, int k) { return to_path(xi_wedge(N, k)); }

}  // namespace fep
