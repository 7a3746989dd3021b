#include <doctest.h>

#include <numeric>

#include "fep/lattice_path.hpp"

using namespace fep;

TEST_CASE("to_path formula") {
    CHECK(to_path(xi_minus(5, 3)).h == std::vector<int>{0, -1, -2});
    CHECK(to_path(xi_plus(5, 3)).h == std::vector<int>{4, 3, 2});
    CHECK(to_path(SegmentConfig::from_string("10110")).h == std::vector<int>{0, 1, 0});
    CHECK(to_path(SegmentConfig::from_string("11011011")).h ==
          std::vector<int>{0, -1, 0, -1, 0, -1});
}

TEST_CASE("from_path and validation") {
    CHECK(from_path(LatticePath{5, 3, {0, -1, -2}}).to_string() == "11100");
    CHECK(from_path(LatticePath{5, 3, {0, 1, 0}}).to_string() == "10110");
    CHECK_THROWS(from_path(LatticePath{5, 3, {0, 2, 0}}));   // parity
    CHECK_THROWS(from_path(LatticePath{5, 3, {0, -3, 0}}));  // step below -1
    CHECK_THROWS(from_path(LatticePath{5, 3, {-2, -3, -4}}));  // h[1] < 0
    CHECK_THROWS(from_path(LatticePath{5, 3, {4, 5, 4}}));     // h[k] above cap
}

TEST_CASE("round trip exhaustive") {
    for (int N = 1; N <= 12; ++N) {
        for (int k = 1; k <= N; ++k) {
            for (const auto& cfg : enumerate_segment(N, k)) {
                LatticePath p = to_path(cfg);
                CHECK(is_valid_path(p));
                CHECK(from_path(p) == cfg);
            }
        }
    }
}

TEST_CASE("partial order") {
    for (int N = 4; N <= 9; ++N) {
        for (int k = N / 2 + 1; k < N; ++k) {
            LatticePath lo = eta_minus(N, k), hi = eta_plus(N, k);
            LatticePath v = eta_vee(N, k), w = eta_wedge(N, k);
            CHECK(leq(lo, hi));
            for (const auto& cfg : enumerate_segment(N, k)) {
                LatticePath p = to_path(cfg);
                CHECK(leq(p, p));
                CHECK(leq(lo, p));
                CHECK(leq(p, hi));
                if (is_ergodic_path(p)) {
                    CHECK(leq(v, p));
                    CHECK(leq(p, w));
                }
            }
        }
    }
    CHECK_FALSE(leq(LatticePath{5, 3, {0, 1, 0}}, LatticePath{5, 3, {0, -1, 0}}));
    CHECK_THROWS(leq(eta_minus(5, 3), eta_minus(7, 4)));
}

TEST_CASE("ergodic path characterization") {
    CHECK(is_ergodic_path(to_path(SegmentConfig::from_string("11011011"))));
    CHECK_FALSE(is_ergodic_path(eta_plus(5, 3)));
    CHECK_FALSE(is_ergodic_path(LatticePath{5, 3, {0, 1, 0}}));
    for (int N = 4; N <= 12; ++N) {
        for (int k = N / 2 + 1; k <= N; ++k) {
            for (const auto& cfg : enumerate_segment(N, k))
                CHECK(is_ergodic_path(to_path(cfg)) == is_ergodic_segment(cfg));
        }
    }
}

TEST_CASE("steep segments") {
    CHECK(steep_segments(eta_minus(5, 3)).empty());
    CHECK(steep_segments(LatticePath{5, 3, {0, 3, 2}}) == std::vector<int>{1});
    CHECK(steep_segments(to_path(SegmentConfig::from_string("10011"))) == std::vector<int>{1});
}

TEST_CASE("path to sep projection") {
    auto sigma = path_to_sep(to_path(SegmentConfig::from_string("11011011")));
    CHECK(sigma == Bits{0, 1, 0, 1, 0});
    CHECK(path_to_sep(to_path(xi_vee(8, 6))) == Bits{0, 0, 0, 1, 1});
    CHECK(path_to_sep(to_path(xi_wedge(8, 6))) == Bits{1, 1, 0, 0, 0});
    CHECK_THROWS(path_to_sep(eta_minus(5, 3)));

    // bijection onto k-1 site, N-k particle configurations
    for (int N = 5; N <= 12; ++N) {
        for (int k = N / 2 + 1; k < N; ++k) {
            std::vector<Bits> images;
            for (const auto& cfg : enumerate_segment(N, k)) {
                if (!is_ergodic_segment(cfg)) continue;
                Bits s = path_to_sep(to_path(cfg));
                CHECK(static_cast<int>(s.size()) == k - 1);
                CHECK(std::accumulate(s.begin(), s.end(), 0) == N - k);
                images.push_back(std::move(s));
            }
            std::sort(images.begin(), images.end());
            CHECK(std::adjacent_find(images.begin(), images.end()) == images.end());
            CHECK(images.size() == count_ergodic_segment(N, k));
        }
    }
}
