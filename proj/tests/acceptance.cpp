// Acceptance gate: one criterion per invocation, one PASS/FAIL line each.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fep/exact.hpp"
#include "fep/experiments.hpp"
#include "fep/lattice_path.hpp"
#include "fep/mappings.hpp"
#include "fep/state.hpp"
#include "fep/verify.hpp"

using namespace fep;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

Outcome from_checks(const std::vector<CheckResult>& checks) {
    Outcome o;
    o.pass = all_passed(checks);
    std::ostringstream os;
    for (const auto& c : checks) {
        if (!c.passed) {
            os << c.name << ": " << c.detail << "; ";
        }
    }
    if (o.pass) os << checks.size() << " check groups";
    o.detail = os.str();
    return o;
}

FamilyParams seg_params(int N, int k, double p) {
    FamilyParams prm;
    prm.N = N;
    prm.k = k;
    prm.p = p;
    return prm;
}

std::vector<double> linspace(double lo, double hi, int points) {
    std::vector<double> out;
    for (int i = 0; i < points; ++i) out.push_back(lo + (hi - lo) * i / (points - 1));
    return out;
}

// --- 1, 2, 4, 5: shared verification suite at the mandated sizes ---

Outcome crit_counting() { return from_checks(verify_counting(16)); }
Outcome crit_bijections() { return from_checks(verify_bijections(12)); }
Outcome crit_intertwinings() { return from_checks(verify_intertwinings(12)); }
Outcome crit_stationarity() { return from_checks(verify_stationarity(12)); }

// --- 3: order preservation of the grand coupling ---

LatticePath random_path(int N, int k, std::mt19937_64& rng) {
    std::vector<int> sites(static_cast<size_t>(N));
    std::iota(sites.begin(), sites.end(), 0);
    std::shuffle(sites.begin(), sites.end(), rng);
    Bits b(static_cast<size_t>(N), 0);
    for (int i = 0; i < k; ++i) b[static_cast<size_t>(sites[static_cast<size_t>(i)])] = 1;
    return to_path(SegmentConfig(N, std::move(b)));
}

Outcome crit_monotone() {
    const int N = 12, k = 8, pairs = 1000;
    const double T = 100;
    std::mt19937_64 rng(20240201);
    long long events = 0;
    for (int r = 0; r < pairs; ++r) {
        LatticePath a = random_path(N, k, rng), b = random_path(N, k, rng);
        LatticePath lo = a, hi = a;  // coordinatewise meet and join
        for (int i = 1; i <= k; ++i) {
            lo.at(i) = std::min(a.at(i), b.at(i));
            hi.at(i) = std::max(a.at(i), b.at(i));
        }
        if (!is_valid_path(lo) || !is_valid_path(hi))
            return {false, "meet or join left the path space"};
        ClockField field{0.5, 0.5, static_cast<std::uint64_t>(r)};
        HeightSimulator A(lo, field), B(hi, field);
        while (true) {
            const double ta = A.peek(), tb = B.peek();
            if (std::min(ta, tb) > T) break;
            // a shared ring must land on both replicas before the order check
            if (ta <= tb) A.step(T);
            if (tb <= ta) B.step(T);
            ++events;
            if (!leq(A.path(), B.path())) {
                std::ostringstream os;
                os << "order broken in pair " << r << " at t=" << A.now();
                return {false, os.str()};
            }
        }
    }
    std::ostringstream os;
    os << pairs << " pairs, " << events << " checks, zero violations";
    return {true, os.str()};
}

// --- 6: first Fourier eigenpair on the circle ---

Outcome crit_eigenpair() {
    double worst = 0;
    int wn = 0, wk = 0;
    for (int N = 5; N <= 14; ++N)
        for (int k = N / 2 + 1; k < N; ++k) {
            const double res = eigencheck_a1(N, k).residual;
            if (res > worst) {
                worst = res;
                wn = N;
                wk = k;
            }
        }
    std::ostringstream os;
    os << "max residual " << worst << " at N=" << wn << " k=" << wk << " (tolerance 1e-10)";
    return {worst <= 1e-10, os.str()};
}

// --- 7: hitting-time identities under the pile maps ---

bool piles_positive(const ZrpConfig& z) {
    for (int w : z.w)
        if (w < 1) return false;
    return true;
}

Outcome crit_hitting_identity() {
    const int N = 14, k = 9, reps = 10000;
    for (int r = 0; r < reps; ++r) {
        ClockField field{0.5, 0.5, static_cast<std::uint64_t>(r)};
        HeightSimulator sim(to_path(xi_minus(N, k)), field);
        double tau_e = kInfTime, tau_zr = kInfTime;
        while (!(std::isfinite(tau_e) && std::isfinite(tau_zr)) && sim.step(1e9)) {
            if (!std::isfinite(tau_e) && sim.is_ergodic_now()) tau_e = sim.now();
            if (!std::isfinite(tau_zr) && piles_positive(zrp_of_segment(from_path(sim.path()))))
                tau_zr = sim.now();
        }
        if (tau_e != tau_zr) return {false, "segment identity broken at replicate " + std::to_string(r)};
    }
    Bits block(static_cast<size_t>(N), 0);
    for (int x = 0; x < k; ++x) block[static_cast<size_t>(x)] = 1;
    const CircleConfig start(N, std::move(block));
    for (int r = 0; r < reps; ++r) {
        CircleSimulator sim(start, static_cast<std::uint64_t>(r));
        TagTracker tag(start, first_hole_clockwise(start));
        double tau_g = kInfTime, tau_zr = kInfTime;
        CircleEvent ev;
        while (!(std::isfinite(tau_g) && std::isfinite(tau_zr)) && sim.step(1e9, &ev)) {
            tag.apply(ev);
            if (!std::isfinite(tau_g) && sim.is_ergodic_now()) tau_g = sim.now();
            if (!std::isfinite(tau_zr) && piles_positive(zrp_of_circle(sim.state(), tag.tag())))
                tau_zr = sim.now();
        }
        if (tau_g != tau_zr) return {false, "circle identity broken at replicate " + std::to_string(r)};
    }

    // minimal-start trajectories replay as legal boundary-driven exclusion
    for (int r = 0; r < 100; ++r) {
        ClockField field{0.5, 0.5, 50000u + static_cast<std::uint64_t>(r)};
        Trajectory traj = simulate_path(eta_minus(N, k), field, 50.0);
        ObepView view = obep_view(traj);
        Bits cur = view.initial;
        LatticePath h = traj.initial;
        size_t applied = 0;
        for (const auto& oe : view.events) {
            if (oe.to < 0) {
                if (cur[static_cast<size_t>(oe.x)] != 0)
                    return {false, "entry onto an occupied site"};
                cur[static_cast<size_t>(oe.x)] = 1;
            } else {
                if (cur[static_cast<size_t>(oe.x)] != 1 || cur[static_cast<size_t>(oe.to)] != 0)
                    return {false, "illegal exclusion swap"};
                std::swap(cur[static_cast<size_t>(oe.x)], cur[static_cast<size_t>(oe.to)]);
            }
            const RingEvent& re = traj.events[applied++];
            h.at(re.i) += re.dir == 0 ? 2 : -2;
            if (obep_occupation(h) != cur) return {false, "slope readout drifted from the replay"};
        }
        if (cur != view.final) return {false, "replayed final state disagrees"};
    }
    return {true, "20000 pile-map replicates and 100 boundary replays agree exactly"};
}

// --- 8: coupling tail dominates the exact distance curve ---

Outcome crit_coupling_bound() {
    const int reps = 10000;
    for (auto [N, k] : std::vector<std::pair<int, int>>{{6, 4}, {8, 6}, {10, 7}}) {
        Generator g = build_generator(Family::FepSegment, seg_params(N, k, 0.5));
        DistVec pi = stationary(Family::FepSegment, seg_params(N, k, 0.5));
        const double T = mixing_time_exact(g, pi, 0.25);
        ExperimentResult r = coupling_time_sfep(N, k, reps, 800000u + N, 8);
        for (double t : linspace(0, 2 * T, 10)) {
            int over = 0;
            for (const auto& s : r.samples) over += (s.censored || s.value > t);
            const double frac = static_cast<double>(over) / reps;
            const double sigma = std::sqrt(std::max(frac * (1 - frac), 1e-12) / reps);
            const double d = tv_worst(g, pi, t);
            if (d > frac + 3 * sigma) {
                std::ostringstream os;
                os << "bound broken at N=" << N << " t=" << t << ": d=" << d
                   << " > frac=" << frac << " + 3*" << sigma;
                return {false, os.str()};
            }
        }
    }
    return {true, "3 lattice sizes, 10 time points each, 10^4 replicates"};
}

// --- 9, 10, 11: scaling sweeps ---

Outcome crit_sfep_scaling() {
    std::vector<double> normalized;
    std::ostringstream os;
    std::uint64_t block = 0;
    for (int N : {64, 128, 256}) {
        const int k = (3 * N + 3) / 4;
        const int reps = N <= 64 ? 200 : N <= 128 ? 100 : 50;
        ExperimentResult r = coupling_time_sfep(N, k, reps, 910000u + (block++ << 20), 8);
        normalized.push_back(r.stats.mean / (N * static_cast<double>(N) * std::log(N - k)));
        os << "N=" << N << " norm=" << normalized.back() << " ";
    }
    const double ratio = spread_ratio(normalized);
    os << "ratio=" << ratio << " (limit 2)";
    return {ratio <= 2.0, os.str()};
}

Outcome crit_afep_slope() {
    std::vector<double> gaps, logs;
    std::uint64_t block = 0;
    for (int g : {4, 6, 8, 10}) {
        const int N = 2 * g + 2, k = g + 2;
        if (g < 4 * std::log10(static_cast<double>(N)))
            return {false, "grid violates the gap >> log N hypothesis"};
        ExperimentResult r = hitting_time(StartKind::AlmostErgodicSegment, N, k, 0.7, 200,
                                          1010000u + (block++ << 20), 8);
        gaps.push_back(g);
        logs.push_back(std::log(r.stats.mean));
    }
    LinearFit fit = fit_line(gaps, logs);
    const double target = std::log(0.7 / 0.3);
    std::ostringstream os;
    os << "slope=" << fit.slope << " +- " << fit.slope_error << ", target " << target
       << " +-25%";
    return {std::abs(fit.slope - target) <= 0.25 * target, os.str()};
}

Outcome crit_circle_scaling() {
    std::vector<double> normalized;
    std::ostringstream os;
    std::uint64_t block = 0;
    for (int N : {32, 64, 128}) {
        const int k = 3 * N / 4;
        ExperimentResult r = hitting_time(StartKind::CircleBlock, N, k, 0.5, 200,
                                          1110000u + (block++ << 20), 8);
        normalized.push_back(r.stats.mean / (N * static_cast<double>(N) * std::log(N)));
        os << "N=" << N << " norm=" << normalized.back() << " ";
    }
    const double ratio = spread_ratio(normalized);
    os << "ratio=" << ratio << " (limit 3)";
    return {ratio <= 3.0, os.str()};
}

// --- 12: survival of the rare set against the capacity bound ---

Outcome crit_aldous_brown() {
    double worst_margin = 0;
    for (int n = 1; n <= 6; ++n)
        for (int m = 1; m <= 6; ++m)
            for (double p : {0.6, 0.7, 0.8}) {
                AldousBrownResult r = aldous_brown_check(n, m, p, linspace(0, 50, 50));
                for (const auto& q : r.points) worst_margin = std::min(worst_margin, q.margin);
                if (r.p_first_site_one > r.lambda_pow * (1 + 1e-12)) {
                    std::ostringstream os;
                    os << "stationary mass exceeds lambda^(n-1) at n=" << n << " m=" << m
                       << " p=" << p;
                    return {false, os.str()};
                }
            }
    std::ostringstream os;
    os << "108 parameter triples, 50 times each; worst margin " << worst_margin;
    return {worst_margin >= -1e-12, os.str()};
}

// --- 13: equivalence of ensembles and correlation decay ---

Outcome crit_equivalence() {
    const double small = equivalence_error(200, 140, 4);
    const double large = equivalence_error(2000, 1400, 4);
    if (!(small > large))
        return {false, "deviation did not shrink with the system size"};
    if (large > 1e-2) return {false, "large-size deviation above 1e-2"};
    for (int ell = 2; ell <= 12; ++ell) {
        double total = 0;
        Bits sigma(static_cast<size_t>(ell), 0);
        for (std::uint32_t w = 0; w < (1u << ell); ++w) {
            for (int i = 0; i < ell; ++i) sigma[static_cast<size_t>(i)] = (w >> i) & 1u;
            total += grand_canonical(0.7, sigma);
        }
        if (std::abs(total - 1.0) > 1e-12)
            return {false, "window normalization off at length " + std::to_string(ell)};
    }
    double prev = kInfTime;
    for (int ell = 4; ell <= 20; ++ell) {
        CorrelationRatios r = correlation_ratio_gc(0.7, ell);
        double dev = 0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) dev = std::max(dev, std::abs(r.r[i][j] - 1.0));
        if (!(dev < prev))
            return {false, "correlation deviation not decreasing at length " + std::to_string(ell)};
        prev = dev;
    }
    std::ostringstream os;
    os << "deviations " << small << " -> " << large << "; decay strict over lengths 4..20";
    return {true, os.str()};
}

// --- 14: byte-identical reruns of the command line ---

#ifndef FEP_CLI_PATH
#define FEP_CLI_PATH "fep-cli"
#endif

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Outcome crit_cli_determinism() {
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / "fep-acceptance-14";
    std::error_code ec;
    fs::remove_all(root, ec);
    const std::vector<std::string> jobs = {
        "couple --n 10 --k 7 --reps 40 --seed 31 --threads 4",
        "hit --start sample --n 12 --k 8 --p 0.7 --reps 40 --seed 32 --threads 4",
        "exact tv --family fep-seg --n 6 --k 4 --p 0.5 --eps 0.25",
        "sweep afep-slope --p 0.7 --gaps 4,5,6 --reps 30 --seed 33 --threads 4",
    };
    for (const char* side : {"a", "b"}) {
        for (const auto& job : jobs) {
            std::string cmd = std::string("FEP_OUT_ROOT=") + (root / side).string() + " " +
                              FEP_CLI_PATH + " " + job + " > /dev/null";
            if (std::system(cmd.c_str()) != 0) return {false, "command failed: " + job};
        }
    }
    int files = 0;
    for (const auto& entry : fs::recursive_directory_iterator(root / "a")) {
        if (!entry.is_regular_file()) continue;
        const fs::path twin = root / "b" / fs::relative(entry.path(), root / "a");
        if (!fs::exists(twin)) return {false, "missing on rerun: " + twin.string()};
        if (slurp(entry.path()) != slurp(twin))
            return {false, "outputs differ: " + entry.path().filename().string()};
        ++files;
    }
    std::ostringstream os;
    os << files << " files byte-identical across reruns";
    return {files > 0, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::fprintf(stderr, "usage: acceptance <criterion 1..14>\n");
        return 2;
    }
    const int c = std::atoi(argv[1]);
    Outcome o;
    switch (c) {
        case 1: o = crit_counting(); break;
        case 2: o = crit_bijections(); break;
        case 3: o = crit_monotone(); break;
        case 4: o = crit_intertwinings(); break;
        case 5: o = crit_stationarity(); break;
        case 6: o = crit_eigenpair(); break;
        case 7: o = crit_hitting_identity(); break;
        case 8: o = crit_coupling_bound(); break;
        case 9: o = crit_sfep_scaling(); break;
        case 10: o = crit_afep_slope(); break;
        case 11: o = crit_circle_scaling(); break;
        case 12: o = crit_aldous_brown(); break;
        case 13: o = crit_equivalence(); break;
        case 14: o = crit_cli_determinism(); break;
        default:
            std::fprintf(stderr, "usage: acceptance <criterion 1..14>\n");
            return 2;
    }
    std::printf("acceptance %02d: %s  (%s)\n", c, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    return o.pass ? 0 : 1;
}
