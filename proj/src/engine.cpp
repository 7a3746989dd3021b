#include "fep/engine.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace fep {

namespace {

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t next_u64(std::uint64_t& s) {
    s += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline double next_uniform(std::uint64_t& s) {
    return static_cast<double>(next_u64(s) >> 11) * 0x1.0p-53;
}

}  // namespace

HeightSimulator::HeightSimulator(LatticePath start, const ClockField& field, HeightMode mode)
    : h_(std::move(start)), field_(field), mode_(mode) {
    const int k = h_.k;
    if (k < 1 || static_cast<int>(h_.h.size()) != k)
        throw std::invalid_argument("bad start path");
    for (int d = 0; d < 2; ++d) {
        armed_t_[d].assign(static_cast<size_t>(k + 1), kInfTime);
        armed_y_[d].assign(static_cast<size_t>(k + 1), 0);
    }
    bad_term_.assign(static_cast<size_t>(k + 1), 0);
    for (int j = 0; j <= k; ++j) {
        bad_term_[static_cast<size_t>(j)] = badness(j);
        bad_ += bad_term_[static_cast<size_t>(j)];
    }
    for (int i = 1; i <= k; ++i) height_sum_ += h_.at(i);
    for (int i = 1; i <= k; ++i) {
        arm(i, 0, 0.0);
        arm(i, 1, 0.0);
    }
}

// bad_term_ layout: 0 = left endpoint off 0, j in [1,k-1] = step j not +-1,
// k = right endpoint off the cap. Zero overall <=> ergodic path.
int HeightSimulator::badness(int j) const {
    const int k = h_.k;
    if (j == 0) return h_.at(1) != 0;
    if (j == k) return h_.at(k) != h_.right_cap();
    return std::abs(h_.at(j + 1) - h_.at(j)) != 1;
}

void HeightSimulator::update_badness(int i) {
    const int k = h_.k;
    auto upd = [&](int j) {
        int fresh = badness(j);
        bad_ += fresh - bad_term_[static_cast<size_t>(j)];
        bad_term_[static_cast<size_t>(j)] = fresh;
    };
    if (i == 1) upd(0);
    if (i == k) upd(k);
    if (i - 1 >= 1) upd(i - 1);
    if (i <= k - 1) upd(i);
}

bool HeightSimulator::can_move(int i, int dir) const {
    const int k = h_.k;
    switch (mode_) {
        case HeightMode::Fep:
            return dir == 0 ? i > 1 : i < k;
        case HeightMode::ObepRight:
            return dir == 0 ? i > 1 : (i > 1 && i < k);
        case HeightMode::ObepLeft:
            return dir == 0 ? (i > 1 && i < k) : i < k;
    }
    return false;
}

bool HeightSimulator::try_apply(const Entry& e) {
    const int k = h_.k;
    const int i = e.i, y = e.y;
    if (h_.at(i) != y) return false;
    if (e.dir == 0) {
        if (i > 1 && h_.at(i - 1) != y + 1) return false;  // not a local min
        if (i < k && h_.at(i + 1) <= y) return false;
        if (mode_ == HeightMode::Fep && i == k && y >= h_.right_cap()) return false;
        h_.at(i) = y + 2;
        height_sum_ += 2;
    } else {
        if (i > 1 && h_.at(i - 1) >= y) return false;  // not a local max
        if (i < k && h_.at(i + 1) != y - 1) return false;
        if (mode_ == HeightMode::Fep && i == 1 && y <= 0) return false;
        h_.at(i) = y - 2;
        height_sum_ -= 2;
    }
    update_badness(i);
    return true;
}

void HeightSimulator::arm(int i, int dir, double after) {
    if (!can_move(i, dir)) {
        armed_t_[dir][static_cast<size_t>(i)] = kInfTime;
        return;
    }
    int y = h_.at(i);
    double t = field_.next_ring(i, y, dir, after);
    armed_t_[dir][static_cast<size_t>(i)] = t;
    armed_y_[dir][static_cast<size_t>(i)] = y;
    if (t < kInfTime) heap_.push(Entry{t, i, y, dir});
}

void HeightSimulator::clean() {
    while (!heap_.empty()) {
        const Entry& e = heap_.top();
        if (armed_t_[e.dir][static_cast<size_t>(e.i)] == e.t &&
            armed_y_[e.dir][static_cast<size_t>(e.i)] == e.y)
            return;
        heap_.pop();
    }
}

double HeightSimulator::peek() {
    clean();
    return heap_.empty() ? kInfTime : heap_.top().t;
}

bool HeightSimulator::step(double t_max, RingEvent* ev) {
    clean();
    if (heap_.empty() || heap_.top().t > t_max) {
        if (t_max > now_) now_ = t_max;
        return false;
    }
    Entry e = heap_.top();
    heap_.pop();
    now_ = e.t;
    bool applied = try_apply(e);
    if (applied) {
        arm(e.i, 0, now_);
        arm(e.i, 1, now_);
    } else {
        arm(e.i, e.dir, now_);
    }
    if (ev) *ev = RingEvent{e.t, e.i, e.y, e.dir, applied};
    return true;
}

void HeightSimulator::run_until(double T, std::vector<RingEvent>* applied) {
    RingEvent ev;
    while (step(T, &ev)) {
        if (applied && ev.applied) applied->push_back(ev);
    }
}

Trajectory simulate_path(const LatticePath& start, const ClockField& field, double T) {
    HeightSimulator sim(start, field);
    Trajectory tr;
    tr.initial = start;
    tr.horizon = T;
    sim.run_until(T, &tr.events);
    tr.final = sim.path();
    return tr;
}

std::vector<Trajectory> simulate_coupled(const std::vector<LatticePath>& starts,
                                         const ClockField& field, double T) {
    std::vector<Trajectory> out;
    out.reserve(starts.size());
    for (const auto& s : starts) out.push_back(simulate_path(s, field, T));
    return out;
}

double coupling_time(const LatticePath& lo, const LatticePath& hi,
                     const ClockField& field, double T) {
    if (!leq(lo, hi)) throw std::invalid_argument("coupling_time requires ordered starts");
    HeightSimulator a(lo, field), b(hi, field);
    if (a.height_sum() == b.height_sum()) return 0.0;
    RingEvent ev;
    while (true) {
        double t = std::min(a.peek(), b.peek());
        if (!(t <= T)) return kInfTime;
        while (a.peek() <= t) a.step(t, &ev);
        while (b.peek() <= t) b.step(t, &ev);
        if (a.height_sum() == b.height_sum()) return t;
    }
}

LatticePath obep_empty_heights(int n) {
    LatticePath p;
    p.N = n + 1;
    p.k = n + 1;
    p.h.resize(static_cast<size_t>(n + 1));
    for (int i = 0; i <= n; ++i) p.h[static_cast<size_t>(i)] = -i;
    return p;
}

CircleSimulator::CircleSimulator(CircleConfig start, std::uint64_t seed)
    : c_(std::move(start)), rng_(mix64(seed ^ 0x6a09e667f3bcc908ull)) {
    const int N = c_.N;
    pos_.assign(static_cast<size_t>(2 * N), -1);
    for (int x = 0; x < N; ++x) {
        if (!c_.at(x) && !c_.at(x + 1)) ++hole_pairs_;
        refresh(x);
    }
}

bool CircleSimulator::move_ok(int id) const {
    int x = id / 2, d = id & 1;
    if (!c_.at(x)) return false;
    int dst = d == 0 ? x + 1 : x - 1;
    int other = d == 0 ? x - 1 : x + 1;
    return !c_.at(dst) && c_.at(other);
}

void CircleSimulator::refresh(int site) {
    const int N = c_.N;
    int x = ((site % N) + N) % N;
    for (int d = 0; d < 2; ++d) {
        int id = 2 * x + d;
        bool ok = move_ok(id);
        int slot = pos_[static_cast<size_t>(id)];
        if (ok && slot < 0) {
            pos_[static_cast<size_t>(id)] = static_cast<int>(enabled_.size());
            enabled_.push_back(id);
        } else if (!ok && slot >= 0) {
            int last = enabled_.back();
            enabled_[static_cast<size_t>(slot)] = last;
            pos_[static_cast<size_t>(last)] = slot;
            enabled_.pop_back();
            pos_[static_cast<size_t>(id)] = -1;
        }
    }
}

double CircleSimulator::uniform() { return next_uniform(rng_); }

bool CircleSimulator::step(double t_max, CircleEvent* ev) {
    if (enabled_.empty()) {
        if (t_max > now_) now_ = t_max;
        return false;
    }
    double rate = 0.5 * static_cast<double>(enabled_.size());
    double dt = -std::log1p(-uniform()) / rate;
    if (now_ + dt > t_max) {
        now_ = t_max;
        return false;
    }
    now_ += dt;
    size_t idx = static_cast<size_t>(uniform() * static_cast<double>(enabled_.size()));
    if (idx >= enabled_.size()) idx = enabled_.size() - 1;
    int id = enabled_[idx];
    int x = id / 2, d = id & 1;
    const int N = c_.N;
    int dst = (((d == 0 ? x + 1 : x - 1) % N) + N) % N;
    // only pairs (z, z+1) with z in the window around x can change
    int window[5];
    int wn = 0;
    for (int z = x - 2; z <= x + 2 && wn < N; ++z) {
        int zz = ((z % N) + N) % N;
        bool dup = false;
        for (int j = 0; j < wn; ++j) dup |= (window[j] == zz);
        if (!dup) window[wn++] = zz;
    }
    int before = 0;
    for (int j = 0; j < wn; ++j)
        if (!c_.at(window[j]) && !c_.at(window[j] + 1)) ++before;
    c_.occ[static_cast<size_t>(x)] = 0;
    c_.occ[static_cast<size_t>(dst)] = 1;
    int after = 0;
    for (int j = 0; j < wn; ++j)
        if (!c_.at(window[j]) && !c_.at(window[j] + 1)) ++after;
    hole_pairs_ += after - before;
    for (int j = 0; j < wn; ++j) refresh(window[j]);
    if (ev) *ev = CircleEvent{now_, x, dst};
    return true;
}

double CircleSimulator::first_hit_ergodic(double T) {
    if (is_ergodic_now()) return now_;
    while (step(T)) {
        if (is_ergodic_now()) return now_;
    }
    return kInfTime;
}

CircleTrajectory simulate_circle(const CircleConfig& start, std::uint64_t seed, double T) {
    CircleSimulator sim(start, seed);
    CircleTrajectory tr;
    tr.initial = start;
    tr.horizon = T;
    CircleEvent ev;
    while (sim.step(T, &ev)) tr.events.push_back(ev);
    tr.final = sim.state();
    return tr;
}

ObepTrajectory simulate_obep(const Bits& start, const ObepParams& params,
                             std::uint64_t seed, double T) {
    const int n = static_cast<int>(start.size());
    if (n < 1) throw std::invalid_argument("need at least one site");
    Bits z = start;
    const double p = 1.0 - params.q;
    std::uint64_t rng = mix64(seed ^ 0xbb67ae8584caa73bull);
    ObepTrajectory tr;
    tr.initial = start;
    tr.horizon = T;
    double now = 0;
    struct Move {
        double rate;
        int x, to;
    };
    std::vector<Move> moves;
    while (true) {
        moves.clear();
        double total = 0;
        for (int x = 0; x + 1 < n; ++x) {
            if (z[static_cast<size_t>(x)] && !z[static_cast<size_t>(x + 1)]) {
                moves.push_back({params.q, x, x + 1});
                total += params.q;
            }
        }
        for (int x = 1; x < n; ++x) {
            if (z[static_cast<size_t>(x)] && !z[static_cast<size_t>(x - 1)]) {
                moves.push_back({p, x, x - 1});
                total += p;
            }
        }
        double r1 = z[0] ? params.gamma : params.alpha;
        if (r1 > 0) {
            moves.push_back({r1, 0, -1});
            total += r1;
        }
        if (n > 1) {
            double rn = z[static_cast<size_t>(n - 1)] ? params.beta : params.delta;
            if (rn > 0) {
                moves.push_back({rn, n - 1, -1});
                total += rn;
            }
        }
        if (total <= 0) break;
        double dt = -std::log1p(-next_uniform(rng)) / total;
        if (now + dt > T) break;
        now += dt;
        double u = next_uniform(rng) * total;
        size_t pick = 0;
        for (; pick + 1 < moves.size(); ++pick) {
            if (u < moves[pick].rate) break;
            u -= moves[pick].rate;
        }
        const Move& m = moves[pick];
        if (m.to < 0) {
            z[static_cast<size_t>(m.x)] ^= 1;
        } else {
            std::swap(z[static_cast<size_t>(m.x)], z[static_cast<size_t>(m.to)]);
        }
        tr.events.push_back(ObepEvent{now, m.x, m.to});
    }
    tr.final = z;
    return tr;
}

}  // namespace fep
