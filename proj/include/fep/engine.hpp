#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <vector>

#include "fep/clock_field.hpp"
#include "fep/lattice_path.hpp"
#include "fep/state.hpp"

namespace fep {

inline constexpr double kInfTime = std::numeric_limits<double>::infinity();

// Which corner-flip rules apply at the two ends of a height path.
//   Fep:       left end moves down only (floored at 0), right end moves up
//              only (capped at 2N-3k+1); the bulk flips at strict local
//              extrema.
//   ObepRight: coordinate 1 pinned, right end moves up only, no cap.
//              Open exclusion with a closed left boundary and injection at
//              the right (rates q bulk-right, p bulk-left, p injection).
//   ObepLeft:  last coordinate pinned, left end moves down only, no floor.
//              Reading up-slopes as particles this injects at the left at
//              rate q.
enum class HeightMode { Fep, ObepRight, ObepLeft };

struct RingEvent {
    double t = 0;
    int i = 0;
    int y = 0;    // height before the flip
    int dir = 0;  // 0 up, 1 down
    bool applied = false;
};

struct Trajectory {
    LatticePath initial;
    double horizon = 0;
    std::vector<RingEvent> events;  // applied flips only, time-ordered
    LatticePath final;
};

// Event-driven simulator for one height path driven by a clock field.
// Only the two streams per coordinate at its current height are armed; a
// flip re-arms the coordinate at the new height. All queries go through the
// shared field, so simulators built on the same field are coupled.
class HeightSimulator {
  public:
    HeightSimulator(LatticePath start, const ClockField& field,
                    HeightMode mode = HeightMode::Fep);

    const LatticePath& path() const { return h_; }
    double now() const { return now_; }
    HeightMode mode() const { return mode_; }

    // Time of the next armed ring (not necessarily an effective one).
    double peek();

    // Process the earliest ring if it is <= t_max, else advance to t_max.
    // Returns true iff a ring was processed.
    bool step(double t_max, RingEvent* ev = nullptr);

    void run_until(double T, std::vector<RingEvent>* applied = nullptr);

    // O(1) ergodic-path indicator maintained incrementally (Fep mode).
    bool is_ergodic_now() const { return bad_ == 0; }

    long long height_sum() const { return height_sum_; }

  private:
    struct Entry {
        double t;
        int i, y, dir;
    };
    struct Later {
        bool operator()(const Entry& a, const Entry& b) const {
            if (a.t != b.t) return a.t > b.t;
            if (a.i != b.i) return a.i > b.i;
            if (a.y != b.y) return a.y > b.y;
            return a.dir > b.dir;
        }
    };

    bool can_move(int i, int dir) const;
    bool try_apply(const Entry& e);
    void arm(int i, int dir, double after);
    void clean();
    int badness(int i) const;
    void update_badness(int i);

    LatticePath h_;
    ClockField field_;
    HeightMode mode_;
    double now_ = 0;
    int bad_ = 0;
    long long height_sum_ = 0;
    std::vector<double> armed_t_[2];
    std::vector<int> armed_y_[2];
    std::vector<int> bad_term_;  // per-coordinate contribution to bad_
    std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
};

Trajectory simulate_path(const LatticePath& start, const ClockField& field, double T);

// All trajectories driven by the identical field, hence coupled.
std::vector<Trajectory> simulate_coupled(const std::vector<LatticePath>& starts,
                                         const ClockField& field, double T);

// First time the two paths agree, or +inf if not by time T. Requires
// leq(lo, hi); the order is conserved by the coupling, so agreement is
// detected through the height-sum gap alone.
double coupling_time(const LatticePath& lo, const LatticePath& hi,
                     const ClockField& field, double T);

// Empty open-boundary configuration as a height path on n+1 coordinates.
LatticePath obep_empty_heights(int n);

// Circle FEP: a particle with exactly one occupied neighbour jumps to its
// empty neighbour at rate 1/2 per direction. Direct Gillespie simulation.
struct CircleEvent {
    double t = 0;
    int from = 0;
    int to = 0;
};

struct CircleTrajectory {
    CircleConfig initial;
    double horizon = 0;
    std::vector<CircleEvent> events;
    CircleConfig final;
};

class CircleSimulator {
  public:
    CircleSimulator(CircleConfig start, std::uint64_t seed);

    const CircleConfig& state() const { return c_; }
    double now() const { return now_; }

    bool step(double t_max, CircleEvent* ev = nullptr);
    bool is_ergodic_now() const { return hole_pairs_ == 0; }

    // Advances until ergodic or T; returns the hit time or +inf.
    double first_hit_ergodic(double T);

  private:
    bool move_ok(int id) const;
    void refresh(int site);
    double uniform();

    CircleConfig c_;
    double now_ = 0;
    std::uint64_t rng_;
    int hole_pairs_ = 0;
    std::vector<int> enabled_;  // move ids 2*site+dir, dir 0 = clockwise
    std::vector<int> pos_;      // id -> slot in enabled_, or -1
};

CircleTrajectory simulate_circle(const CircleConfig& start, std::uint64_t seed, double T);

// Open-boundary exclusion with reservoir rates: bulk right q, bulk left
// 1-q; entry/exit at site 1 with alpha/gamma, at site n with delta/beta.
struct ObepParams {
    double q = 0.5;
    double alpha = 0, beta = 0, gamma = 0, delta = 0;
};

struct ObepEvent {
    double t = 0;
    int x = 0;
    int to = 0;  // target site for a swap, or -1 for a boundary flip
};

struct ObepTrajectory {
    Bits initial;
    double horizon = 0;
    std::vector<ObepEvent> events;
    Bits final;
};

ObepTrajectory simulate_obep(const Bits& start, const ObepParams& params,
                             std::uint64_t seed, double T);

// Run sim until pred holds (checked initially and after every processed
// ring); returns the hit time or +inf at horizon T.
template <class Sim, class Pred>
double first_hitting(Sim& sim, double T, Pred pred) {
    if (pred(sim)) return sim.now();
    while (sim.step(T)) {
        if (pred(sim)) return sim.now();
    }
    return kInfTime;
}

}  // namespace fep
