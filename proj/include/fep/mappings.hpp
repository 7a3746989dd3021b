#pragma once

#include <vector>

#include "fep/engine.hpp"
#include "fep/lattice_path.hpp"
#include "fep/state.hpp"

namespace fep {

// Zero-range occupation numbers. Segment images live on sites 1..n
// (w[x-1]); circle images are indexed by Z/nZ (w[x]).
struct ZrpConfig {
    int n = 0;
    bool circular = false;
    std::vector<int> w;

    int at(int x) const;  // 1-based on the segment, modular on the circle
    int total() const;

    bool operator==(const ZrpConfig& o) const = default;
};

// Hole-gap map on the segment: site i of the image holds the number of
// particles strictly between the (i-1)-th and i-th empty site, counting the
// two boundaries as empty. Bijective.
ZrpConfig zrp_of_segment(const SegmentConfig& cfg);
SegmentConfig segment_of_zrp(const ZrpConfig& z);

// Hole-gap map on the circle, anchored at a tagged hole. The image forgets
// the tag position, so the map is n-to-one.
ZrpConfig zrp_of_circle(const CircleConfig& cfg, int tagged_hole);

// The canonical tag: first hole at or clockwise of site 0.
int first_hole_clockwise(const CircleConfig& cfg);

CircleConfig circle_of_zrp(const ZrpConfig& z, int tagged_hole);

// Follows the tagged hole through circle jumps (a particle jumping onto the
// tagged hole pushes the tag to the vacated site).
class TagTracker {
  public:
    TagTracker(const CircleConfig& start, int tagged_hole);
    int tag() const { return tag_; }
    void apply(const CircleEvent& ev);

  private:
    int N_;
    int tag_;
};

// Open-boundary readout of a height path: sigma(x) = (h(x+1)-h(x)+1)/2.
Bits obep_occupation(const LatticePath& heights);

// Reinterpretation of a minimal- or maximal-start trajectory as an
// open-boundary exclusion trajectory, truncated at the entry of the
// (N-k)-th particle. Rejects other starts.
struct ObepView {
    Bits initial;
    std::vector<ObepEvent> events;  // to = -1 encodes a boundary entry
    double stop_time = 0;           // time of the last admitted entry, or horizon
    Bits final;
    int entries = 0;
};
ObepView obep_view(const Trajectory& traj);

// Single-ergodic-region circle ZRP state -> exclusion state on [l-1], where
// l is the region's particle count. The rightmost stack plays the role of
// the right reservoir; the r-th particle sits at the r-th partial sum.
Bits phi_zrp_to_obep(const ZrpConfig& z);

// Strips the floor off a segment ZRP state with an empty first site and
// every other site occupied; the result lives on n-1 sites and keeps only
// the excess particles.
ZrpConfig constant_rate_reduction(const ZrpConfig& z);

}  // namespace fep
