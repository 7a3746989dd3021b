#include "fep/state.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>

namespace fep {

namespace {

int checked_count(const Bits& bits) {
    int k = 0;
    for (auto b : bits) {
        if (b > 1) throw std::invalid_argument("occupation entries must be 0/1");
        k += b;
    }
    return k;
}

Bits parse_bits(const std::string& s) {
    Bits b;
    b.reserve(s.size());
    for (char c : s) {
        if (c != '0' && c != '1') throw std::invalid_argument("configuration string must be 0/1");
        b.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return b;
}

std::string bits_to_string(const Bits& b) {
    std::string s(b.size(), '0');
    for (size_t i = 0; i < b.size(); ++i) s[i] = static_cast<char>('0' + b[i]);
    return s;
}

}  // namespace

SegmentConfig::SegmentConfig(int n, Bits bits) : N(n), occ(std::move(bits)) {
    if (n < 1 || n > kMaxSites) throw std::invalid_argument("segment size out of range");
    if (static_cast<int>(occ.size()) != n) throw std::invalid_argument("occupation length != N");
    k = checked_count(occ);
}

std::string SegmentConfig::to_string() const { return bits_to_string(occ); }

SegmentConfig SegmentConfig::from_string(const std::string& s) {
    Bits b = parse_bits(s);
    int n = static_cast<int>(b.size());
    return SegmentConfig(n, std::move(b));
}

CircleConfig::CircleConfig(int n, Bits bits) : N(n), occ(std::move(bits)) {
    if (n < 1 || n > kMaxSites) throw std::invalid_argument("circle size out of range");
    if (static_cast<int>(occ.size()) != n) throw std::invalid_argument("occupation length != N");
    k = checked_count(occ);
}

bool CircleConfig::at(int site) const {
    int x = site % N;
    if (x < 0) x += N;
    return occ[static_cast<size_t>(x)] != 0;
}

std::string CircleConfig::to_string() const { return bits_to_string(occ); }

CircleConfig CircleConfig::from_string(const std::string& s) {
    Bits b = parse_bits(s);
    int n = static_cast<int>(b.size());
    return CircleConfig(n, std::move(b));
}

bool is_ergodic_segment(const SegmentConfig& cfg) {
    if (cfg.N < 2) return cfg.N == 1 && cfg.k == 1;
    if (!cfg.at(1) || !cfg.at(cfg.N)) return false;
    for (int x = 1; x < cfg.N; ++x) {
        if (!cfg.at(x) && !cfg.at(x + 1)) return false;
    }
    return true;
}

bool is_ergodic_circle(const CircleConfig& cfg) {
    for (int x = 0; x < cfg.N; ++x) {
        if (!cfg.at(x) && !cfg.at(x + 1)) return false;
    }
    return true;
}

ErgodicRegionSet ergodic_regions(const CircleConfig& cfg) {
    ErgodicRegionSet out;
    if (is_ergodic_circle(cfg)) {
        out.full_circle = true;
        return out;
    }
    const int N = cfg.N;
    if (cfg.k == 0) return out;

    // Regions are the stretches between maximal runs of >= 2 consecutive
    // holes, trimmed to their outermost particles.
    std::vector<std::uint8_t> cut(static_cast<size_t>(N), 0);  // cut after site x
    for (int x = 0; x < N; ++x) {
        if (!cfg.at(x) && !cfg.at(x + 1)) cut[static_cast<size_t>(x)] = 1;
    }
    // Find a starting point just after a cut; one exists since cfg is not in G.
    int anchor = -1;
    for (int x = 0; x < N; ++x) {
        if (cut[static_cast<size_t>(x)]) {
            anchor = (x + 1) % N;
            break;
        }
    }
    std::vector<ErgodicRegion> regions;
    int pos = anchor;
    for (int scanned = 0; scanned < N;) {
        // One stretch: advance until the next cut.
        int len = 1;
        while (len < N && !cut[static_cast<size_t>((pos + len - 1) % N)]) ++len;
        // Trim to [first particle, last particle] within the stretch.
        int first = -1, last = -1, particles = 0;
        for (int j = 0; j < len; ++j) {
            int site = (pos + j) % N;
            if (cfg.at(site)) {
                if (first < 0) first = site;
                last = site;
                ++particles;
            }
        }
        if (particles > 0) regions.push_back({first, last, particles});
        pos = (pos + len) % N;
        scanned += len;
    }
    std::sort(regions.begin(), regions.end(),
              [](const ErgodicRegion& a, const ErgodicRegion& b) { return a.start < b.start; });
    out.regions = std::move(regions);
    return out;
}

bool in_class_I_m(const CircleConfig& cfg, int m) {
    if (m < 1) throw std::invalid_argument("m must be positive");
    ErgodicRegionSet rs = ergodic_regions(cfg);
    if (rs.full_circle) throw std::invalid_argument("I^m classes are defined on the complement of G");
    std::vector<int> counts;
    counts.reserve(rs.regions.size());
    for (const auto& r : rs.regions) counts.push_back(r.particles);
    std::sort(counts.rbegin(), counts.rend());
    long long total = 0;
    for (size_t i = 0; i < counts.size() && i < static_cast<size_t>(m); ++i) total += counts[i];
    return total >= cfg.N - cfg.k;
}

namespace {

std::uint64_t binom_u64(int n, int r) {
    if (r < 0 || r > n) return 0;
    r = std::min(r, n - r);
    std::uint64_t acc = 1;
    for (int i = 1; i <= r; ++i) {
        // exact at every step: acc * (n-r+i) is divisible by i
        __uint128_t t = static_cast<__uint128_t>(acc) * static_cast<std::uint64_t>(n - r + i);
        acc = static_cast<std::uint64_t>(t / static_cast<std::uint64_t>(i));
        if (t / static_cast<std::uint64_t>(i) > UINT64_MAX)
            throw std::overflow_error("binomial overflow");
    }
    return acc;
}

void check_density(int N, int k) {
    if (N < 2) throw std::invalid_argument("need N >= 2");
    if (2 * k <= N || k > N) throw std::invalid_argument("require N/2 < k <= N");
}

}  // namespace

std::uint64_t count_ergodic_segment(int N, int k) {
    check_density(N, k);
    return binom_u64(k - 1, N - k);
}

std::uint64_t count_ergodic_circle(int N, int k) {
    // circle admits the alternating configurations at k = N/2 exactly
    if (N < 2 || 2 * k < N || k > N) throw std::invalid_argument("require N/2 <= k <= N");
    // (N/k) C(k, N-k) = C(k, N-k) + C(k-1, N-k-1)
    return binom_u64(k, N - k) + binom_u64(k - 1, N - k - 1);
}

namespace {

// Visit all N-bit words with k bits set.
template <typename F>
void for_each_kbit(int N, int k, F&& f) {
    if (k < 0 || k > N) return;
    if (k == 0) {
        f(static_cast<std::uint32_t>(0));
        return;
    }
    std::uint32_t v = (k == 32) ? 0xffffffffu : ((1u << k) - 1);
    std::uint32_t lim = (N == 32) ? 0xffffffffu : ((1u << N) - 1);
    while (v <= lim) {
        f(v);
        std::uint32_t t = v | (v - 1);
        if (t == 0xffffffffu) break;
        v = (t + 1) | (((~t & (t + 1)) - 1) >> (std::countr_zero(v) + 1));
    }
}

Bits word_to_bits(std::uint32_t w, int N) {
    Bits b(static_cast<size_t>(N));
    for (int i = 0; i < N; ++i) b[static_cast<size_t>(i)] = (w >> i) & 1u;
    return b;
}

}  // namespace

std::vector<SegmentConfig> enumerate_segment(int N, int k) {
    if (N > 28) throw std::invalid_argument("enumeration limited to N <= 28");
    std::vector<SegmentConfig> out;
    for_each_kbit(N, k, [&](std::uint32_t w) { out.emplace_back(N, word_to_bits(w, N)); });
    return out;
}

std::vector<CircleConfig> enumerate_circle(int N, int k) {
    if (N > 28) throw std::invalid_argument("enumeration limited to N <= 28");
    std::vector<CircleConfig> out;
    for_each_kbit(N, k, [&](std::uint32_t w) { out.emplace_back(N, word_to_bits(w, N)); });
    return out;
}

std::uint64_t count_ergodic_segment_enum(int N, int k) {
    std::uint64_t c = 0;
    for (const auto& cfg : enumerate_segment(N, k))
        if (is_ergodic_segment(cfg)) ++c;
    return c;
}

std::uint64_t count_ergodic_circle_enum(int N, int k) {
    std::uint64_t c = 0;
    for (const auto& cfg : enumerate_circle(N, k))
        if (is_ergodic_circle(cfg)) ++c;
    return c;
}

SegmentConfig xi_minus(int N, int k) {
    check_density(N, k);
    Bits b(static_cast<size_t>(N), 0);
    for (int x = 1; x <= k; ++x) b[static_cast<size_t>(x - 1)] = 1;
    return SegmentConfig(N, std::move(b));
}

SegmentConfig xi_plus(int N, int k) {
    check_density(N, k);
    Bits b(static_cast<size_t>(N), 0);
    for (int x = N - k + 1; x <= N; ++x) b[static_cast<size_t>(x - 1)] = 1;
    return SegmentConfig(N, std::move(b));
}

SegmentConfig xi_vee(int N, int k) {
    check_density(N, k);
    // minimal ergodic configuration: 2k-N particles packed left, then
    // alternating hole/particle out to site N
    Bits b(static_cast<size_t>(N), 1);
    for (int j = 1; j <= N - k; ++j) b[static_cast<size_t>(2 * k - N + 2 * j - 2)] = 0;
    return SegmentConfig(N, std::move(b));
}

SegmentConfig xi_wedge(int N, int k) {
    SegmentConfig v = xi_vee(N, k);
    Bits b(v.occ.rbegin(), v.occ.rend());
    return SegmentConfig(N, std::move(b));
}

SegmentConfig h_sample(int N, int k) {
    check_density(N, k);
    if (k == N) throw std::invalid_argument("H_{N,k} requires k < N");
    // holes at the odd sites 1,3,...,2(N-k)-1
    Bits b(static_cast<size_t>(N), 1);
    for (int x = 1; x <= 2 * (N - k) - 1; x += 2) b[static_cast<size_t>(x - 1)] = 0;
    return SegmentConfig(N, std::move(b));
}

bool in_H(const SegmentConfig& cfg) {
    if (cfg.at(1) || !cfg.at(cfg.N)) return false;
    for (int x = 1; x < cfg.N; ++x) {
        if (!cfg.at(x) && !cfg.at(x + 1)) return false;
    }
    return true;
}

}  // namespace fep
