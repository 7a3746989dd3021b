#include "fep/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "fep/lattice_path.hpp"
#include "fep/mappings.hpp"

namespace fep {

namespace {

template <class Fn>
std::vector<Replicate> run_replicates(int reps, std::uint64_t seed_base, int threads, Fn&& fn) {
    if (reps < 2) throw std::invalid_argument("need at least two replicates");
    std::vector<Replicate> out(static_cast<size_t>(reps));
    threads = std::clamp(threads, 1,
                         std::max(1, static_cast<int>(std::thread::hardware_concurrency())));
    std::atomic<int> next{0};
    std::vector<std::string> errors(static_cast<size_t>(threads));
    auto worker = [&](int tid) {
        try {
            for (int r = next.fetch_add(1); r < reps; r = next.fetch_add(1)) {
                const std::uint64_t seed = seed_base + static_cast<std::uint64_t>(r);
                const double v = fn(r, seed);
                out[static_cast<size_t>(r)] = {r, seed, v, !std::isfinite(v)};
            }
        } catch (const std::exception& e) {
            errors[static_cast<size_t>(tid)] = e.what();
        }
    };
    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (!e.empty()) throw std::runtime_error(e);
    return out;
}

double censored_fraction_of(const std::vector<Replicate>& samples) {
    int c = 0;
    for (const auto& s : samples) c += s.censored;
    return static_cast<double>(c) / static_cast<double>(samples.size());
}

// Runs the replicate set under the horizon policy: double the horizon while
// more than 1% of replicates censor, at most three times.
template <class Fn>
ExperimentResult run_with_policy(int reps, std::uint64_t seed_base, int threads, double horizon,
                                 Fn&& fn) {
    ExperimentResult res;
    res.horizon = horizon;
    for (int d = 0;; ++d) {
        res.samples = run_replicates(reps, seed_base, threads,
                                     [&](int r, std::uint64_t s) { return fn(r, s, res.horizon); });
        res.horizon_doublings = d;
        if (censored_fraction_of(res.samples) <= 0.01 || d == 3) break;
        res.horizon *= 2;
    }
    res.stats = summarize(res.samples);
    return res;
}

SegmentConfig segment_start(StartKind start, int N, int k) {
    switch (start) {
        case StartKind::MinimalSegment:
            return xi_minus(N, k);
        case StartKind::MaximalSegment:
            return xi_plus(N, k);
        case StartKind::AlmostErgodicSegment:
            return h_sample(N, k);
        default:
            throw std::invalid_argument("not a segment start");
    }
}

void check_segment_hit(const HeightSimulator& sim, bool require_cap) {
    SegmentConfig cfg = from_path(sim.path());
    if (!is_ergodic_segment(cfg)) throw std::runtime_error("hit state outside the ergodic component");
    ZrpConfig z = zrp_of_segment(cfg);
    for (int pile : z.w)
        if (pile < 1) throw std::runtime_error("pile image disagrees at the hit time");
    if (require_cap && sim.path().at(sim.path().k) != sim.path().right_cap())
        throw std::runtime_error("right endpoint below its cap at the hit time");
}

}  // namespace

SummaryStats summarize(const std::vector<Replicate>& samples) {
    SummaryStats s;
    s.replicates = static_cast<int>(samples.size());
    std::vector<double> vals;
    double sum = 0;
    for (const auto& r : samples) {
        if (r.censored) {
            ++s.censored;
            vals.push_back(kInfTime);
        } else {
            vals.push_back(r.value);
            sum += r.value;
        }
    }
    s.censored_fraction = samples.empty() ? 0 : static_cast<double>(s.censored) / s.replicates;
    const int n = s.replicates - s.censored;
    s.mean = n > 0 ? sum / n : kInfTime;
    if (n > 1) {
        double ss = 0;
        for (const auto& r : samples)
            if (!r.censored) ss += (r.value - s.mean) * (r.value - s.mean);
        s.std_error = std::sqrt(ss / (n - 1) / n);
    }
    std::sort(vals.begin(), vals.end());
    auto quant = [&](double q) {
        const size_t idx = static_cast<size_t>(std::llround((vals.size() - 1) * q));
        return vals[idx];
    };
    if (!vals.empty()) {
        s.q05 = quant(0.05);
        s.q50 = quant(0.50);
        s.q95 = quant(0.95);
        s.quantile_censored = !std::isfinite(s.q95);
    }
    return s;
}

ExperimentResult coupling_time_sfep(int N, int k, int reps, std::uint64_t seed_base, int threads,
                                    double horizon) {
    if (k == N) {
        // a full segment is a single configuration; the pair starts coupled
        ExperimentResult res;
        for (int r = 0; r < reps; ++r)
            res.samples.push_back({r, seed_base + static_cast<std::uint64_t>(r), 0.0, false});
        res.stats = summarize(res.samples);
        return res;
    }
    if (horizon <= 0) horizon = 10.0 * N * N * std::log(std::max(3, N));
    const LatticePath lo = eta_minus(N, k), hi = eta_plus(N, k);
    ExperimentResult res =
        run_with_policy(reps, seed_base, threads, horizon, [&](int, std::uint64_t seed, double h) {
            ClockField field{0.5, 0.5, seed};
            return coupling_time(lo, hi, field, h);
        });
    if (res.stats.censored_fraction > 0.05)
        throw std::runtime_error("coupling horizon misconfigured: censoring above 5%");
    return res;
}

ExperimentResult hitting_time(StartKind start, int N, int k, double p, int reps,
                              std::uint64_t seed_base, int threads, double horizon) {
    if (horizon <= 0) {
        if (start == StartKind::AlmostErgodicSegment && p > 0.5)
            horizon = 10.0 * std::pow(p / (1 - p), N - k);
        else
            horizon = 10.0 * N * N * std::log(std::max(3, N));
    }
    if (start == StartKind::CircleBlock) {
        CircleConfig block = [&] {
            Bits b(static_cast<size_t>(N), 0);
            for (int x = 0; x < k; ++x) b[static_cast<size_t>(x)] = 1;
            return CircleConfig(N, std::move(b));
        }();
        return run_with_policy(reps, seed_base, threads, horizon,
                               [&](int r, std::uint64_t seed, double h) {
                                   CircleSimulator sim(block, seed);
                                   const double t = sim.first_hit_ergodic(h);
                                   if (r < 8 && std::isfinite(t)) {
                                       ZrpConfig z = zrp_of_circle(sim.state(),
                                                                   first_hole_clockwise(sim.state()));
                                       for (int pile : z.w)
                                           if (pile < 1)
                                               throw std::runtime_error(
                                                   "pile image disagrees at the hit time");
                                   }
                                   return t;
                               });
    }
    const LatticePath start_path = to_path(segment_start(start, N, k));
    const bool require_cap = (start == StartKind::MinimalSegment);
    return run_with_policy(reps, seed_base, threads, horizon,
                           [&](int r, std::uint64_t seed, double h) {
                               ClockField field{p, 1 - p, seed};
                               HeightSimulator sim(start_path, field);
                               const double t = first_hitting(
                                   sim, h, [](const HeightSimulator& s) { return s.is_ergodic_now(); });
                               if (r < 8 && std::isfinite(t)) check_segment_hit(sim, require_cap);
                               return t;
                           });
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 3)
        throw std::invalid_argument("need at least three points");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0) throw std::invalid_argument("degenerate abscissae");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ssr = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (f.intercept + f.slope * x[i]);
        ssr += e * e;
    }
    if (x.size() > 2) f.slope_error = std::sqrt(ssr / (n - 2) / sxx);
    return f;
}

double spread_ratio(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("empty ratio input");
    double lo = values.front(), hi = values.front();
    for (double v : values) {
        if (!(v > 0)) throw std::invalid_argument("ratio entries must be positive");
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi / lo;
}

void write_experiment_csv(std::ostream& os, int N, int k, double p, const char* statistic,
                          const ExperimentResult& result) {
    os << "N,k,p,replicate,seed,statistic,value,censored\n";
    os << std::setprecision(17);
    for (const auto& s : result.samples) {
        os << N << ',' << k << ',' << p << ',' << s.index << ',' << s.seed << ',' << statistic << ','
           << (s.censored ? result.horizon : s.value) << ',' << (s.censored ? 1 : 0) << '\n';
    }
}

}  // namespace fep
