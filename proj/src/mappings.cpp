#include "fep/mappings.hpp"

#include <numeric>
#include <stdexcept>

namespace fep {

int ZrpConfig::at(int x) const {
    if (circular) {
        int i = ((x % n) + n) % n;
        return w[static_cast<size_t>(i)];
    }
    return w[static_cast<size_t>(x - 1)];
}

int ZrpConfig::total() const { return std::accumulate(w.begin(), w.end(), 0); }

ZrpConfig zrp_of_segment(const SegmentConfig& cfg) {
    ZrpConfig z;
    z.circular = false;
    z.n = cfg.N - cfg.k + 1;
    z.w.reserve(static_cast<size_t>(z.n));
    int run = 0;
    for (int x = 1; x <= cfg.N; ++x) {
        if (cfg.at(x)) {
            ++run;
        } else {
            z.w.push_back(run);
            run = 0;
        }
    }
    z.w.push_back(run);
    return z;
}

SegmentConfig segment_of_zrp(const ZrpConfig& z) {
    if (z.circular || z.n < 1) throw std::invalid_argument("expected a segment image");
    int N = z.n - 1 + z.total();
    Bits b;
    b.reserve(static_cast<size_t>(N));
    for (int i = 0; i < z.n; ++i) {
        if (z.w[static_cast<size_t>(i)] < 0) throw std::invalid_argument("negative pile");
        if (i > 0) b.push_back(0);
        b.insert(b.end(), static_cast<size_t>(z.w[static_cast<size_t>(i)]), 1);
    }
    return SegmentConfig(N, std::move(b));
}

int first_hole_clockwise(const CircleConfig& cfg) {
    for (int x = 0; x < cfg.N; ++x) {
        if (!cfg.at(x)) return x;
    }
    throw std::invalid_argument("configuration has no hole");
}

ZrpConfig zrp_of_circle(const CircleConfig& cfg, int tagged_hole) {
    if (cfg.k >= cfg.N) throw std::invalid_argument("need at least one hole");
    int tag = ((tagged_hole % cfg.N) + cfg.N) % cfg.N;
    if (cfg.at(tag)) throw std::invalid_argument("tag must sit on a hole");
    ZrpConfig z;
    z.circular = true;
    z.n = cfg.N - cfg.k;
    z.w.reserve(static_cast<size_t>(z.n));
    int run = 0;
    for (int s = 1; s <= cfg.N; ++s) {
        if (cfg.at(tag + s)) {
            ++run;
        } else {
            z.w.push_back(run);
            run = 0;
        }
    }
    // the final run closes the gap ending back at the tag; fold it into the
    // last entry which was cut by the tag hole itself
    // (the loop above ends exactly at the tag, so run is already flushed)
    return z;
}

CircleConfig circle_of_zrp(const ZrpConfig& z, int tagged_hole) {
    if (!z.circular || z.n < 1) throw std::invalid_argument("expected a circle image");
    int N = z.n + z.total();
    int tag = ((tagged_hole % N) + N) % N;
    Bits b(static_cast<size_t>(N), 0);
    int cursor = tag + 1;
    for (int i = 0; i < z.n; ++i) {
        int pile = z.w[static_cast<size_t>(i)];
        if (pile < 0) throw std::invalid_argument("negative pile");
        for (int j = 0; j < pile; ++j) b[static_cast<size_t>(cursor++ % N)] = 1;
        if (i < z.n - 1) ++cursor;  // hole y(i+1)
    }
    return CircleConfig(N, std::move(b));
}

TagTracker::TagTracker(const CircleConfig& start, int tagged_hole)
    : N_(start.N), tag_(((tagged_hole % start.N) + start.N) % start.N) {
    if (start.at(tag_)) throw std::invalid_argument("tag must sit on a hole");
}

void TagTracker::apply(const CircleEvent& ev) {
    if (ev.to == tag_) tag_ = ev.from;
}

Bits obep_occupation(const LatticePath& heights) {
    Bits sigma(static_cast<size_t>(heights.k - 1));
    for (int x = 1; x < heights.k; ++x) {
        int d = heights.at(x + 1) - heights.at(x);
        if (d != 1 && d != -1) throw std::invalid_argument("height path has a steep step");
        sigma[static_cast<size_t>(x - 1)] = static_cast<std::uint8_t>((d + 1) / 2);
    }
    return sigma;
}

ObepView obep_view(const Trajectory& traj) {
    const int k = traj.initial.k;
    const int N = traj.initial.N;
    const int gap = N - k;
    bool minus_view;
    if (traj.initial == eta_minus(N, k)) {
        minus_view = true;
    } else if (traj.initial == eta_plus(N, k)) {
        minus_view = false;
    } else {
        throw std::invalid_argument("view defined for the extremal starts only");
    }
    ObepView v;
    v.initial = obep_occupation(traj.initial);
    Bits cur = v.initial;
    v.stop_time = traj.horizon;
    for (const auto& ev : traj.events) {
        ObepEvent oe;
        oe.t = ev.t;
        if (minus_view && ev.i == k) {
            oe.x = k - 2;
            oe.to = -1;
        } else if (!minus_view && ev.i == 1) {
            oe.x = 0;
            oe.to = -1;
        } else {
            // bulk flip at coordinate i moves the particle across sites
            // i-1, i (1-based): up sends it left, down sends it right
            if (ev.dir == 0) {
                oe.x = ev.i - 1;
                oe.to = ev.i - 2;
            } else {
                oe.x = ev.i - 2;
                oe.to = ev.i - 1;
            }
        }
        if (oe.to < 0) {
            cur[static_cast<size_t>(oe.x)] ^= 1;
            ++v.entries;
        } else {
            std::swap(cur[static_cast<size_t>(oe.x)], cur[static_cast<size_t>(oe.to)]);
        }
        v.events.push_back(oe);
        if (v.entries == gap) {
            v.stop_time = ev.t;
            break;
        }
    }
    v.final = cur;
    return v;
}

Bits phi_zrp_to_obep(const ZrpConfig& z) {
    if (!z.circular) throw std::invalid_argument("expected a circle image");
    int start = -1;
    for (int i = 0; i < z.n; ++i) {
        if (z.at(i) >= 1 && z.at(i - 1) == 0) {
            if (start >= 0) throw std::invalid_argument("more than one ergodic region");
            start = i;
        }
    }
    if (start < 0) throw std::invalid_argument("no ergodic region boundary");
    int len = 0;
    int ell = 0;
    while (z.at(start + len) >= 1) {
        ell += z.at(start + len);
        ++len;
    }
    if (ell != z.total()) throw std::invalid_argument("particles outside the ergodic region");
    Bits out(static_cast<size_t>(ell - 1), 0);
    int cum = 0;
    for (int r = 0; r + 1 < len; ++r) {
        cum += z.at(start + r);
        out[static_cast<size_t>(cum - 1)] = 1;
    }
    return out;
}

ZrpConfig constant_rate_reduction(const ZrpConfig& z) {
    if (z.circular || z.n < 2) throw std::invalid_argument("expected a segment image");
    if (z.w[0] != 0) throw std::invalid_argument("first site must be empty");
    ZrpConfig out;
    out.circular = false;
    out.n = z.n - 1;
    out.w.reserve(static_cast<size_t>(out.n));
    for (int x = 1; x < z.n; ++x) {
        if (z.w[static_cast<size_t>(x)] < 1)
            throw std::invalid_argument("sites beyond the first must be occupied");
        out.w.push_back(z.w[static_cast<size_t>(x)] - 1);
    }
    return out;
}

}  // namespace fep
