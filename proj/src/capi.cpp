#include "fep/fep.h"

#include <cmath>
#include <cstring>
#include <set>
#include <string>

#include <json.hpp>

#include "fep/exact.hpp"
#include "fep/experiments.hpp"
#include "fep/lattice_path.hpp"
#include "fep/mappings.hpp"
#include "fep/state.hpp"
#include "fep/verify.hpp"

using json = nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

using namespace fep;

[[noreturn]] void bad_request(const std::string& msg) { throw std::invalid_argument(msg); }

void allow_keys(const json& req, std::set<std::string> allowed) {
    allowed.insert("op");
    for (const auto& [key, value] : req.items()) {
        (void)value;
        if (!allowed.count(key)) bad_request("unknown key: " + key);
    }
}

const json& field(const json& req, const char* key) {
    auto it = req.find(key);
    if (it == req.end()) bad_request(std::string("missing key: ") + key);
    return *it;
}

int geti(const json& req, const char* key) {
    const json& v = field(req, key);
    if (!v.is_number_integer()) bad_request(std::string("expected integer: ") + key);
    return v.get<int>();
}

int geti(const json& req, const char* key, int dflt) {
    return req.contains(key) ? geti(req, key) : dflt;
}

double getd(const json& req, const char* key) {
    const json& v = field(req, key);
    if (!v.is_number()) bad_request(std::string("expected number: ") + key);
    return v.get<double>();
}

double getd(const json& req, const char* key, double dflt) {
    return req.contains(key) ? getd(req, key) : dflt;
}

std::string gets(const json& req, const char* key) {
    const json& v = field(req, key);
    if (!v.is_string()) bad_request(std::string("expected string: ") + key);
    return v.get<std::string>();
}

std::uint64_t get_seed(const json& req) {
    const json& v = field(req, "seed");
    if (!v.is_number_unsigned() && !v.is_number_integer()) bad_request("expected integer: seed");
    return v.get<std::uint64_t>();
}

Family family_of(const std::string& s) {
    if (s == "fep-seg") return Family::FepSegment;
    if (s == "fep-circle") return Family::FepCircle;
    if (s == "sep") return Family::Sep;
    if (s == "obep") return Family::Obep;
    if (s == "zrp-seg") return Family::ZrpSegment;
    if (s == "zrp-circle") return Family::ZrpCircle;
    if (s == "zrp-const") return Family::ZrpConstantRate;
    bad_request("unknown family: " + s);
}

bool lattice_family(Family f) { return f == Family::FepSegment || f == Family::FepCircle; }

FamilyParams params_of(const json& req, Family f) {
    FamilyParams prm;
    prm.p = getd(req, "p", 0.5);
    if (lattice_family(f)) {
        prm.N = geti(req, "n");
        prm.k = geti(req, "k");
    } else {
        prm.n = geti(req, "n");
        prm.m = geti(req, "m", 0);
    }
    if (f == Family::Obep)
        prm.obep = ObepParams{getd(req, "q", 0.5), getd(req, "alpha", 0), getd(req, "beta", 0),
                              getd(req, "gamma", 0), getd(req, "delta", 0)};
    return prm;
}

std::vector<double> linspace(double lo, double hi, int points) {
    if (points < 2) bad_request("need at least two grid points");
    std::vector<double> out;
    for (int i = 0; i < points; ++i)
        out.push_back(lo + (hi - lo) * i / (points - 1));
    return out;
}

json finite(double v) { return std::isfinite(v) ? json(v) : json(); }

json stats_json(const SummaryStats& s) {
    return {{"replicates", s.replicates},
            {"censored", s.censored},
            {"censored_fraction", s.censored_fraction},
            {"mean", finite(s.mean)},
            {"std_error", s.std_error},
            {"q05", finite(s.q05)},
            {"q50", finite(s.q50)},
            {"q95", finite(s.q95)}};
}

json result_json(const ExperimentResult& r) {
    json samples = json::array();
    for (const auto& s : r.samples)
        samples.push_back({{"replicate", s.index},
                           {"seed", s.seed},
                           {"value", s.censored ? r.horizon : s.value},
                           {"censored", s.censored}});
    return {{"samples", samples},
            {"stats", stats_json(r.stats)},
            {"horizon", r.horizon},
            {"horizon_doublings", r.horizon_doublings}};
}

StartKind start_of(const std::string& s) {
    if (s == "minimal") return StartKind::MinimalSegment;
    if (s == "maximal") return StartKind::MaximalSegment;
    if (s == "sample") return StartKind::AlmostErgodicSegment;
    if (s == "circle-block") return StartKind::CircleBlock;
    bad_request("unknown start: " + s);
}

json op_version(const json& req) {
    allow_keys(req, {});
    return {{"version", kVersion}};
}

json op_verify(const json& req) {
    allow_keys(req, {"max_n"});
    const int max_n = geti(req, "max_n", 12);
    if (max_n < 4 || max_n > 20) bad_request("max_n out of range [4, 20]");
    json checks = json::array();
    auto results = verify_all(max_n);
    for (const auto& c : results)
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    return {{"max_n", max_n}, {"passed", all_passed(results)}, {"checks", checks}};
}

json op_count(const json& req) {
    allow_keys(req, {"geometry", "n", "k"});
    const std::string geo = gets(req, "geometry");
    const int N = geti(req, "n"), k = geti(req, "k");
    std::uint64_t closed, enumerated = 0;
    if (geo == "segment")
        closed = count_ergodic_segment(N, k);
    else if (geo == "circle")
        closed = count_ergodic_circle(N, k);
    else
        bad_request("geometry must be segment or circle");
    json out{{"geometry", geo}, {"n", N}, {"k", k}, {"closed_form", closed}};
    if (N <= 20) {
        enumerated = geo == "segment" ? count_ergodic_segment_enum(N, k)
                                      : count_ergodic_circle_enum(N, k);
        out["enumerated"] = enumerated;
        out["match"] = closed == enumerated;
        if (closed != enumerated) throw std::runtime_error("closed form disagrees with enumeration");
    }
    return out;
}

json op_tv(const json& req) {
    allow_keys(req, {"family", "n", "k", "m", "p", "q", "alpha", "beta", "gamma", "delta", "eps",
                     "points"});
    const Family f = family_of(gets(req, "family"));
    const FamilyParams prm = params_of(req, f);
    const double eps = getd(req, "eps", 0.25);
    if (eps <= 0 || eps >= 1) bad_request("eps must lie in (0, 1)");
    const int points = geti(req, "points", 50);
    Generator g = build_generator(f, prm);
    DistVec pi = stationary(f, prm);
    const double T = mixing_time_exact(g, pi, eps);
    json curve = json::array();
    for (auto [t, d] : tv_curve(g, pi, linspace(0, 2 * T, points)))
        curve.push_back({t, d});
    return {{"mixing_time", T},
            {"eps", eps},
            {"worst_state", g.states[static_cast<size_t>(tv_worst_state(g, pi, T))]},
            {"curve", curve}};
}

json op_gap(const json& req) {
    allow_keys(req, {"family", "n", "k", "m", "p", "q", "alpha", "beta", "gamma", "delta"});
    const Family f = family_of(gets(req, "family"));
    const FamilyParams prm = params_of(req, f);
    Generator g = build_generator(f, prm);
    DistVec pi = stationary(f, prm);
    if (lattice_family(f)) {
        // restrict to the ergodic component, where the measure lives
        std::vector<int> keep;
        for (int s = 0; s < g.L.n; ++s)
            if (pi[static_cast<size_t>(s)] > 0) keep.push_back(s);
        g = restrict_closed(g, keep);
        DistVec sub;
        for (int s : keep) sub.push_back(pi[static_cast<size_t>(s)]);
        pi = std::move(sub);
    }
    return {{"gap", spectral_gap(g.L, pi)}, {"states", g.L.n}};
}

json op_a1(const json& req) {
    allow_keys(req, {"n", "k"});
    EigencheckResult r = eigencheck_a1(geti(req, "n"), geti(req, "k"));
    return {{"eigenvalue", r.eigenvalue}, {"residual", r.residual}, {"norm", r.norm}};
}

json op_aldous_brown(const json& req) {
    allow_keys(req, {"n", "m", "p", "t_max", "points"});
    const int n = geti(req, "n"), m = geti(req, "m");
    const double p = getd(req, "p");
    AldousBrownResult r =
        aldous_brown_check(n, m, p, linspace(0, getd(req, "t_max", 50.0), geti(req, "points", 50)));
    json pts = json::array();
    double min_margin = 0;
    for (const auto& q : r.points) {
        pts.push_back(
            {{"t", q.t}, {"survival", q.survival}, {"bound", q.bound}, {"margin", q.margin}});
        min_margin = std::min(min_margin, q.margin);
    }
    return {{"points", pts},
            {"p_first_site_one", r.p_first_site_one},
            {"lambda_pow", r.lambda_pow},
            {"min_margin", min_margin}};
}

json op_equivalence(const json& req) {
    allow_keys(req, {"n", "k", "window"});
    const int N = geti(req, "n"), k = geti(req, "k"), ell = geti(req, "window");
    return {{"n", N}, {"k", k}, {"window", ell}, {"error", equivalence_error(N, k, ell)}};
}

json op_window(const json& req) {
    allow_keys(req, {"rho", "window"});
    const double rho = getd(req, "rho");
    const int ell = geti(req, "window");
    if (ell < 2 || ell > 22) bad_request("window out of range [2, 22]");
    double total = 0;
    Bits sigma(static_cast<size_t>(ell), 0);
    for (std::uint32_t w = 0; w < (1u << ell); ++w) {
        for (int i = 0; i < ell; ++i) sigma[static_cast<size_t>(i)] = (w >> i) & 1u;
        total += grand_canonical(rho, sigma);
    }
    return {{"rho", rho}, {"window", ell}, {"normalization_error", std::abs(total - 1.0)}};
}

json op_correlation(const json& req) {
    allow_keys(req, {"rho", "n", "k", "window"});
    const int ell = geti(req, "window");
    CorrelationRatios r = req.contains("rho")
                              ? correlation_ratio_gc(getd(req, "rho"), ell)
                              : correlation_ratio_canonical(geti(req, "n"), geti(req, "k"), ell);
    return {{"window", ell},
            {"ratios", {{r.r[0][0], r.r[0][1]}, {r.r[1][0], r.r[1][1]}}}};
}

json op_simulate(const json& req) {
    allow_keys(req, {"geometry", "n", "k", "p", "q", "alpha", "beta", "gamma", "delta", "start",
                     "seed", "horizon"});
    const std::string geo = gets(req, "geometry");
    const std::uint64_t seed = get_seed(req);
    const double T = getd(req, "horizon");
    if (T <= 0) bad_request("horizon must be positive");
    json events = json::array();
    if (geo == "segment") {
        const int N = geti(req, "n"), k = geti(req, "k");
        const std::string start = gets(req, "start");
        SegmentConfig cfg = start == "minimal"   ? xi_minus(N, k)
                            : start == "maximal" ? xi_plus(N, k)
                            : start == "sample"  ? h_sample(N, k)
                                                 : SegmentConfig::from_string(start);
        ClockField fld{getd(req, "p", 0.5), 1 - getd(req, "p", 0.5), seed};
        Trajectory tr = simulate_path(to_path(cfg), fld, T);
        for (const auto& e : tr.events)
            events.push_back({{"t", e.t}, {"i", e.i}, {"y", e.y}, {"dir", e.dir}});
        return {{"initial", cfg.to_string()},
                {"final", from_path(tr.final).to_string()},
                {"events", events},
                {"horizon", T}};
    }
    if (geo == "circle") {
        const int N = geti(req, "n");
        CircleConfig cfg = CircleConfig::from_string(gets(req, "start"));
        if (cfg.N != N) bad_request("start length disagrees with n");
        CircleTrajectory tr = simulate_circle(cfg, seed, T);
        for (const auto& e : tr.events)
            events.push_back({{"t", e.t}, {"from", e.from}, {"to", e.to}});
        return {{"initial", cfg.to_string()},
                {"final", tr.final.to_string()},
                {"events", events},
                {"horizon", T}};
    }
    if (geo == "obep") {
        const std::string start = gets(req, "start");
        Bits b(start.size(), 0);
        for (size_t i = 0; i < start.size(); ++i) {
            if (start[i] != '0' && start[i] != '1') bad_request("start must be a bit string");
            b[i] = start[i] == '1';
        }
        ObepParams op{getd(req, "q", 0.5), getd(req, "alpha", 0), getd(req, "beta", 0),
                      getd(req, "gamma", 0), getd(req, "delta", 0)};
        ObepTrajectory tr = simulate_obep(b, op, seed, T);
        for (const auto& e : tr.events)
            events.push_back({{"t", e.t}, {"x", e.x}, {"to", e.to}});
        std::string fin(tr.final.size(), '0');
        for (size_t i = 0; i < tr.final.size(); ++i)
            if (tr.final[i]) fin[i] = '1';
        return {{"initial", start}, {"final", fin}, {"events", events}, {"horizon", T}};
    }
    bad_request("geometry must be segment, circle or obep");
}

json op_couple(const json& req) {
    allow_keys(req, {"n", "k", "reps", "seed", "threads", "horizon"});
    ExperimentResult r =
        coupling_time_sfep(geti(req, "n"), geti(req, "k"), geti(req, "reps"), get_seed(req),
                           geti(req, "threads", 1), getd(req, "horizon", 0));
    return result_json(r);
}

json op_hit(const json& req) {
    allow_keys(req, {"start", "n", "k", "p", "reps", "seed", "threads", "horizon"});
    ExperimentResult r = hitting_time(start_of(gets(req, "start")), geti(req, "n"), geti(req, "k"),
                                      getd(req, "p", 0.5), geti(req, "reps"), get_seed(req),
                                      geti(req, "threads", 1), getd(req, "horizon", 0));
    return result_json(r);
}

json op_sweep(const json& req) {
    allow_keys(req, {"kind", "p", "rho", "n_values", "gaps", "reps", "seed", "threads"});
    const std::string kind = gets(req, "kind");
    const int reps = geti(req, "reps");
    const int threads = geti(req, "threads", 1);
    const std::uint64_t seed = get_seed(req);
    constexpr std::uint64_t kBlock = 1u << 20;  // disjoint seed block per grid point

    json points = json::array();
    if (kind == "sfep-ratio" || kind == "circle-ratio") {
        const bool circle = kind == "circle-ratio";
        const double rho = circle ? getd(req, "rho", 0.75) : 0.75;
        std::vector<double> normalized;
        std::uint64_t block = 0;
        for (const json& nv : field(req, "n_values")) {
            const int N = nv.get<int>();
            const int k = circle ? static_cast<int>(std::lround(rho * N)) : (3 * N + 3) / 4;
            ExperimentResult r =
                circle ? hitting_time(StartKind::CircleBlock, N, k, 0.5, reps,
                                      seed + block * kBlock, threads)
                       : coupling_time_sfep(N, k, reps, seed + block * kBlock, threads);
            const double scale =
                circle ? N * static_cast<double>(N) * std::log(N)
                       : N * static_cast<double>(N) * std::log(N - k);
            normalized.push_back(r.stats.mean / scale);
            points.push_back({{"n", N},
                              {"k", k},
                              {"stats", stats_json(r.stats)},
                              {"normalized", r.stats.mean / scale}});
            ++block;
        }
        return {{"kind", kind}, {"points", points}, {"ratio", spread_ratio(normalized)}};
    }
    if (kind == "afep-slope") {
        const double p = getd(req, "p", 0.7);
        std::vector<double> gaps, logs;
        std::uint64_t block = 0;
        for (const json& gv : field(req, "gaps")) {
            const int g = gv.get<int>();
            const int N = 2 * g + 2, k = g + 2;  // keeps the gap well above log N
            ExperimentResult r = hitting_time(StartKind::AlmostErgodicSegment, N, k, p, reps,
                                              seed + block * kBlock, threads);
            gaps.push_back(g);
            logs.push_back(std::log(r.stats.mean));
            points.push_back({{"gap", g},
                              {"n", N},
                              {"k", k},
                              {"stats", stats_json(r.stats)},
                              {"log_mean", std::log(r.stats.mean)}});
            ++block;
        }
        LinearFit fit = fit_line(gaps, logs);
        return {{"kind", kind},
                {"p", p},
                {"points", points},
                {"slope", fit.slope},
                {"intercept", fit.intercept},
                {"slope_error", fit.slope_error},
                {"target_slope", std::log(p / (1 - p))}};
    }
    bad_request("unknown sweep kind: " + kind);
}

json dispatch(const json& req) {
    if (!req.is_object()) bad_request("request must be a JSON object");
    const std::string op = gets(req, "op");
    if (op == "version") return op_version(req);
    if (op == "verify") return op_verify(req);
    if (op == "count") return op_count(req);
    if (op == "tv") return op_tv(req);
    if (op == "gap") return op_gap(req);
    if (op == "a1") return op_a1(req);
    if (op == "aldous-brown") return op_aldous_brown(req);
    if (op == "equivalence") return op_equivalence(req);
    if (op == "window") return op_window(req);
    if (op == "correlation") return op_correlation(req);
    if (op == "simulate") return op_simulate(req);
    if (op == "couple") return op_couple(req);
    if (op == "hit") return op_hit(req);
    if (op == "sweep") return op_sweep(req);
    bad_request("unknown op: " + op);
}

}  // namespace

struct fep_ctx {
    std::string last_error;
};

extern "C" {

fep_ctx* fep_ctx_new(void) { return new fep_ctx; }

void fep_ctx_free(fep_ctx* ctx) { delete ctx; }

int fep_run_json(fep_ctx* ctx, const char* request, char** response) {
    if (!ctx || !request || !response) return 2;
    *response = nullptr;
    ctx->last_error.clear();
    try {
        json req = json::parse(request, nullptr, true, false);
        std::string out = dispatch(req).dump();
        *response = new char[out.size() + 1];
        std::memcpy(*response, out.c_str(), out.size() + 1);
        return 0;
    } catch (const json::exception& e) {
        ctx->last_error = e.what();
        return 2;
    } catch (const std::invalid_argument& e) {
        ctx->last_error = e.what();
        return 2;
    } catch (const std::exception& e) {
        ctx->last_error = e.what();
        return 1;
    }
}

const char* fep_ctx_last_error(const fep_ctx* ctx) {
    return ctx ? ctx->last_error.c_str() : "";
}

void fep_string_free(char* s) { delete[] s; }

const char* fep_version(void) { return kVersion; }

}  // extern "C"
