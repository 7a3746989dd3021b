#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fep/mappings.hpp"

using namespace fep;

TEST_CASE("segment hole-gap map") {
    SUBCASE("examples") {
        CHECK(zrp_of_segment(SegmentConfig::from_string("1101011")).w ==
              std::vector<int>{2, 1, 2});
        CHECK(zrp_of_segment(xi_minus(5, 3)).w == std::vector<int>{3, 0, 0});
        CHECK(zrp_of_segment(xi_plus(5, 3)).w == std::vector<int>{0, 0, 3});
    }
    SUBCASE("round trip and ergodicity characterization, exhaustive") {
        for (int N = 2; N <= 12; ++N) {
            for (int k = 0; k <= N; ++k) {
                for (const auto& cfg : enumerate_segment(N, k)) {
                    ZrpConfig z = zrp_of_segment(cfg);
                    CHECK(z.n == N - k + 1);
                    CHECK(z.total() == k);
                    CHECK(segment_of_zrp(z) == cfg);
                    bool all_occupied =
                        std::all_of(z.w.begin(), z.w.end(), [](int v) { return v >= 1; });
                    CHECK(all_occupied == is_ergodic_segment(cfg));
                }
            }
        }
    }
}

TEST_CASE("circle hole-gap map with tagged hole") {
    SUBCASE("example") {
        auto cfg = CircleConfig::from_string("11001001");
        CHECK(first_hole_clockwise(cfg) == 2);
        CHECK(zrp_of_circle(cfg, 2).w == std::vector<int>{0, 1, 0, 3});
        CHECK(zrp_of_circle(cfg, 3).w == std::vector<int>{1, 0, 3, 0});
        CHECK_THROWS(zrp_of_circle(cfg, 0));
    }
    SUBCASE("single hole") {
        auto cfg = CircleConfig::from_string("11101111");
        CHECK(zrp_of_circle(cfg, first_hole_clockwise(cfg)).w == std::vector<int>{7});
    }
    SUBCASE("tag rotation cyclically shifts the image") {
        auto cfg = CircleConfig::from_string("110010011010");
        std::vector<int> holes;
        for (int x = 0; x < cfg.N; ++x)
            if (!cfg.at(x)) holes.push_back(x);
        auto base = zrp_of_circle(cfg, holes[0]).w;
        for (size_t j = 1; j < holes.size(); ++j) {
            auto rot = base;
            std::rotate(rot.begin(), rot.begin() + static_cast<long>(j), rot.end());
            CHECK(zrp_of_circle(cfg, holes[static_cast<size_t>(j)]).w == rot);
        }
    }
    SUBCASE("round trip, exhaustive small N") {
        for (int N = 3; N <= 10; ++N) {
            for (int k = 0; k < N; ++k) {
                for (const auto& cfg : enumerate_circle(N, k)) {
                    int tag = first_hole_clockwise(cfg);
                    ZrpConfig z = zrp_of_circle(cfg, tag);
                    CHECK(z.total() == k);
                    CHECK(circle_of_zrp(z, tag) == cfg);
                    bool all_occupied =
                        std::all_of(z.w.begin(), z.w.end(), [](int v) { return v >= 1; });
                    CHECK(all_occupied == is_ergodic_circle(cfg));
                }
            }
        }
    }
}

TEST_CASE("hitting-time identity on the segment") {
    // along any trajectory, the mapped process makes only legal moves and
    // reaches all-sites-occupied exactly when the source becomes ergodic
    const int N = 12, k = 8;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        ClockField field{0.6, 0.4, 88000 + seed};
        Trajectory tr = simulate_path(to_path(xi_minus(N, k)), field, 300.0);
        SegmentConfig cur = xi_minus(N, k);
        ZrpConfig zcur = zrp_of_segment(cur);
        LatticePath p = tr.initial;
        double tau_e = kInfTime, tau_zr = kInfTime;
        for (const auto& ev : tr.events) {
            p.at(ev.i) += ev.dir == 0 ? 2 : -2;
            SegmentConfig nxt = from_path(p);
            ZrpConfig znxt = zrp_of_segment(nxt);
            // legal zero-range move: one particle from a pile of >= 2 to a
            // neighbouring site
            int from = -1, to = -1;
            for (int x = 1; x <= zcur.n; ++x) {
                int d = znxt.at(x) - zcur.at(x);
                if (d == -1) from = x;
                if (d == 1) to = x;
            }
            REQUIRE(from > 0);
            REQUIRE(to > 0);
            CHECK(std::abs(from - to) == 1);
            CHECK(zcur.at(from) >= 2);
            // right FEP jump (up flip) sends the mapped particle right
            CHECK((ev.dir == 0) == (to == from + 1));
            cur = nxt;
            zcur = znxt;
            if (tau_e == kInfTime && is_ergodic_segment(cur)) tau_e = ev.t;
            bool allocc = std::all_of(zcur.w.begin(), zcur.w.end(), [](int v) { return v >= 1; });
            if (tau_zr == kInfTime && allocc) tau_zr = ev.t;
        }
        REQUIRE(tau_e < kInfTime);
        CHECK(tau_e == tau_zr);
    }
}

TEST_CASE("hitting-time identity on the circle with tag tracking") {
    const int N = 14, k = 9;
    Bits b(static_cast<size_t>(N), 0);
    for (int x = 0; x < k; ++x) b[static_cast<size_t>(x)] = 1;  // one block
    CircleConfig start(N, std::move(b));
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        CircleSimulator sim(start, 1234 + seed);
        TagTracker tag(start, first_hole_clockwise(start));
        ZrpConfig zcur = zrp_of_circle(start, tag.tag());
        CircleConfig cur = start;
        double tau_g = kInfTime, tau_zr = kInfTime;
        CircleEvent ev;
        while (sim.step(500.0, &ev)) {
            tag.apply(ev);
            cur.occ[static_cast<size_t>(ev.from)] = 0;
            cur.occ[static_cast<size_t>(ev.to)] = 1;
            REQUIRE(cur == sim.state());
            ZrpConfig znxt = zrp_of_circle(cur, tag.tag());
            int from = -1, to = -1;
            for (int x = 0; x < zcur.n; ++x) {
                int d = znxt.at(x) - zcur.at(x);
                if (d == -1) from = x;
                if (d == 1) to = x;
            }
            REQUIRE(from >= 0);
            REQUIRE(to >= 0);
            int diff = ((to - from) % zcur.n + zcur.n) % zcur.n;
            CHECK((diff == 1 || diff == zcur.n - 1));
            CHECK(zcur.at(from) >= 2);
            zcur = znxt;
            bool allocc = std::all_of(zcur.w.begin(), zcur.w.end(), [](int v) { return v >= 1; });
            if (tau_g == kInfTime && is_ergodic_circle(cur)) tau_g = ev.t;
            if (tau_zr == kInfTime && allocc) tau_zr = ev.t;
            if (tau_g < kInfTime) break;
        }
        REQUIRE(tau_g < kInfTime);
        CHECK(tau_g == tau_zr);
    }
}

TEST_CASE("open-boundary view of extremal trajectories") {
    const int N = 9, k = 6;
    const int gap = N - k;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        ClockField field{0.55, 0.45, 4400 + seed};
        Trajectory tr = simulate_path(to_path(xi_minus(N, k)), field, 200.0);
        ObepView v = obep_view(tr);
        CHECK(v.initial == Bits(static_cast<size_t>(k - 1), 0));
        CHECK(v.entries == gap);
        // entries only at the right boundary; occupancy legal throughout
        Bits cur = v.initial;
        for (const auto& oe : v.events) {
            if (oe.to < 0) {
                CHECK(oe.x == k - 2);
                CHECK_FALSE(cur[static_cast<size_t>(oe.x)]);
                cur[static_cast<size_t>(oe.x)] ^= 1;
            } else {
                CHECK(std::abs(oe.x - oe.to) == 1);
                CHECK(cur[static_cast<size_t>(oe.x)]);
                CHECK_FALSE(cur[static_cast<size_t>(oe.to)]);
                std::swap(cur[static_cast<size_t>(oe.x)], cur[static_cast<size_t>(oe.to)]);
            }
        }
        CHECK(cur == v.final);
        CHECK(std::accumulate(cur.begin(), cur.end(), 0) == gap);

        // the last entry is exactly the hitting time of the ergodic class
        ClockField f2 = field;
        HeightSimulator sim(to_path(xi_minus(N, k)), f2);
        double tau = first_hitting(sim, 200.0,
                                   [](const HeightSimulator& s) { return s.is_ergodic_now(); });
        CHECK(tau == v.stop_time);
    }
    SUBCASE("maximal start enters at the left") {
        ClockField field{0.55, 0.45, 51};
        Trajectory tr = simulate_path(to_path(xi_plus(N, k)), field, 200.0);
        ObepView v = obep_view(tr);
        CHECK(v.entries == gap);
        int seen = 0;
        for (const auto& oe : v.events) {
            if (oe.to < 0) {
                CHECK(oe.x == 0);
                ++seen;
            }
        }
        CHECK(seen == gap);
    }
    SUBCASE("other starts rejected") {
        ClockField field{0.55, 0.45, 5};
        Trajectory tr = simulate_path(eta_vee(N, k), field, 1.0);
        CHECK_THROWS(obep_view(tr));
    }
}

TEST_CASE("single-region map to the open interval") {
    SUBCASE("cumulative sums") {
        ZrpConfig z{8, true, {3, 1, 2, 2, 0, 0, 0, 0}};
        CHECK(phi_zrp_to_obep(z) == Bits{0, 0, 1, 1, 0, 1, 0});
    }
    SUBCASE("region placement does not matter") {
        ZrpConfig a{6, true, {0, 3, 1, 2, 2, 0}};
        ZrpConfig b{6, true, {2, 0, 0, 3, 1, 2}};  // same region, rotated
        CHECK(phi_zrp_to_obep(a) == phi_zrp_to_obep(b));
    }
    SUBCASE("singleton region is the empty interval") {
        ZrpConfig z{5, true, {0, 0, 4, 0, 0}};
        CHECK(phi_zrp_to_obep(z) == Bits(3, 0));
    }
    SUBCASE("all piles of height one") {
        ZrpConfig z{6, true, {0, 1, 1, 1, 1, 0}};
        CHECK(phi_zrp_to_obep(z) == Bits{1, 1, 1});
    }
    SUBCASE("rejections") {
        CHECK_THROWS(phi_zrp_to_obep(ZrpConfig{6, true, {2, 0, 1, 0, 1, 0}}));  // two regions
        CHECK_THROWS(phi_zrp_to_obep(ZrpConfig{4, true, {1, 1, 1, 1}}));        // full circle
        CHECK_THROWS(phi_zrp_to_obep(ZrpConfig{3, false, {1, 1, 1}}));          // not a circle
    }
}

TEST_CASE("constant-rate reduction") {
    CHECK(constant_rate_reduction(ZrpConfig{4, false, {0, 2, 1, 1}}).w ==
          std::vector<int>{1, 0, 0});
    CHECK(constant_rate_reduction(ZrpConfig{5, false, {0, 1, 1, 1, 1}}).w ==
          std::vector<int>{0, 0, 0, 0});
    CHECK_THROWS(constant_rate_reduction(ZrpConfig{4, false, {1, 2, 1, 1}}));
    CHECK_THROWS(constant_rate_reduction(ZrpConfig{4, false, {0, 2, 0, 1}}));
    // particle count: the reduction keeps exactly the excess
    for (int N = 8; N <= 14; ++N) {
        for (int k = N / 2 + 1; k < N; ++k) {
            ZrpConfig z = zrp_of_segment(h_sample(N, k));
            ZrpConfig r = constant_rate_reduction(z);
            CHECK(r.n == N - k);
            CHECK(r.total() == 2 * k - N);
        }
    }
}

TEST_CASE("ordered zero-range occupations stay ordered under shared clocks") {
    // basic coupling: shared (site, direction) event stream; a replica moves
    // iff its pile holds at least two particles
    const int n = 6;
    const double p = 0.6;
    std::uint64_t s = 991;
    auto rnd = [&s]() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        return static_cast<double>(s >> 11) * 0x1.0p-53;
    };
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<int> lo(n), hi(n);
        for (int x = 0; x < n; ++x) {
            lo[static_cast<size_t>(x)] = static_cast<int>(rnd() * 3);
            hi[static_cast<size_t>(x)] = lo[static_cast<size_t>(x)] + static_cast<int>(rnd() * 2);
        }
        for (int ev = 0; ev < 400; ++ev) {
            int site = static_cast<int>(rnd() * n);
            bool right = rnd() < p;
            int dst = right ? site + 1 : site - 1;
            if (dst < 0 || dst >= n) continue;
            auto mv = [&](std::vector<int>& w) {
                if (w[static_cast<size_t>(site)] >= 2) {
                    --w[static_cast<size_t>(site)];
                    ++w[static_cast<size_t>(dst)];
                }
            };
            mv(lo);
            mv(hi);
            for (int x = 0; x < n; ++x)
                REQUIRE(lo[static_cast<size_t>(x)] <= hi[static_cast<size_t>(x)]);
        }
    }
}
