// Command-line front end; all numeric work goes through the C API.
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fep/fep.h"

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RunError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shortest round-trip decimal form, identical across runs.
std::string fmt(double v) { return json(v).dump(); }

json api(const std::string& op, json req) {
    req["op"] = op;
    fep_ctx* ctx = fep_ctx_new();
    char* resp = nullptr;
    const int rc = fep_run_json(ctx, req.dump().c_str(), &resp);
    std::string err = fep_ctx_last_error(ctx);
    json out;
    if (rc == 0) out = json::parse(resp);
    fep_string_free(resp);
    fep_ctx_free(ctx);
    if (rc == 2) throw ConfigError(err);
    if (rc != 0) throw RunError(err);
    return out;
}

// One flag per request key; values are kept as text until the overlay so a
// JSON config file and command-line overrides merge uniformly.
struct Binding {
    std::string key;
    char type;  // i int, u unsigned, d double, s string, l integer list
    std::string value;
};

struct Cmd {
    CLI::App* app = nullptr;
    std::deque<Binding> binds;  // stable addresses; CLI11 keeps references
    std::string config_path;

    void opt(const std::string& flag, const std::string& key, char type,
             const std::string& help) {
        binds.push_back({key, type, {}});
        app->add_option(flag, binds.back().value, help);
    }

    json request() const {
        json req = json::object();
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw ConfigError("cannot read config file: " + config_path);
            req = json::parse(in, nullptr, true, false);
            if (!req.is_object()) throw ConfigError("config file must hold a JSON object");
        }
        for (const auto& b : binds) {
            if (b.value.empty()) continue;
            switch (b.type) {
                case 'i':
                    req[b.key] = std::stoi(b.value);
                    break;
                case 'u':
                    req[b.key] = static_cast<std::uint64_t>(std::stoull(b.value));
                    break;
                case 'd':
                    req[b.key] = std::stod(b.value);
                    break;
                case 's':
                    req[b.key] = b.value;
                    break;
                case 'l': {
                    json arr = json::array();
                    std::stringstream ss(b.value);
                    std::string item;
                    while (std::getline(ss, item, ',')) arr.push_back(std::stoi(item));
                    req[b.key] = arr;
                    break;
                }
            }
        }
        return req;
    }
};

std::string out_root() {
    if (const char* env = std::getenv("FEP_OUT_ROOT")) return env;
    return "out";
}

// Stable short tag of the resolved request, used to name the run directory.
std::string request_tag(const json& req) {
    const std::string s = req.dump();  // keys sorted by the container
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%012llx", static_cast<unsigned long long>(h & 0xffffffffffffull));
    return buf;
}

void write_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw RunError("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, path);
}

fs::path make_run_dir(const std::string& out_dir, const std::string& subcommand, const json& req) {
    fs::path dir = out_dir.empty() ? fs::path(out_root()) : fs::path(out_dir);
    dir /= subcommand + "-" + request_tag(req);
    fs::create_directories(dir);
    json manifest{{"version", fep_version()}, {"subcommand", subcommand}, {"request", req}};
    write_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
    return dir;
}

std::string svg_chart(const std::vector<std::pair<double, double>>& pts, const std::string& xlabel,
                      const std::string& ylabel) {
    double x0 = pts.front().first, x1 = x0, y0 = pts.front().second, y1 = y0;
    for (auto [x, y] : pts) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
    }
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    const double W = 640, H = 480, M = 60;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 640 480\">\n"
       << "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n"
       << "<line x1=\"60\" y1=\"420\" x2=\"600\" y2=\"420\" stroke=\"black\"/>\n"
       << "<line x1=\"60\" y1=\"60\" x2=\"60\" y2=\"420\" stroke=\"black\"/>\n"
       << "<text x=\"320\" y=\"460\" text-anchor=\"middle\" font-size=\"14\">" << xlabel
       << "</text>\n"
       << "<text x=\"20\" y=\"240\" text-anchor=\"middle\" font-size=\"14\" "
          "transform=\"rotate(-90 20 240)\">"
       << ylabel << "</text>\n<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" "
                    "points=\"";
    for (size_t i = 0; i < pts.size(); ++i) {
        const double px = M + (pts[i].first - x0) / (x1 - x0) * (W - 2 * M + 20);
        const double py = H - M - (pts[i].second - y0) / (y1 - y0) * (H - 2 * M);
        os << (i ? " " : "") << fmt(px) << "," << fmt(py);
    }
    os << "\"/>\n</svg>\n";
    return os.str();
}

int exit_code_of(const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return dynamic_cast<const ConfigError*>(&e) ? 2 : 1;
}

std::string samples_csv(const json& resp, int N, int k, double p, const std::string& statistic) {
    std::ostringstream os;
    os << "N,k,p,replicate,seed,statistic,value,censored\n";
    for (const auto& s : resp["samples"]) {
        os << N << ',' << k << ',' << fmt(p) << ',' << s["replicate"].get<int>() << ','
           << s["seed"].get<std::uint64_t>() << ',' << statistic << ','
           << fmt(s["value"].get<double>()) << ',' << (s["censored"].get<bool>() ? 1 : 0) << '\n';
    }
    return os.str();
}

int run_verify(Cmd& c) {
    json resp = api("verify", c.request());
    for (const auto& chk : resp["checks"])
        std::cout << (chk["passed"].get<bool>() ? "ok   " : "FAIL ")
                  << chk["name"].get<std::string>() << "  (" << chk["detail"].get<std::string>()
                  << ")\n";
    return resp["passed"].get<bool>() ? 0 : 1;
}

int run_exact(Cmd& c, const std::string& quantity, const std::string& out_dir) {
    json req = c.request();
    json resp = api(quantity, req);
    fs::path dir = make_run_dir(out_dir, "exact-" + quantity, req);
    if (quantity == "tv") {
        std::ostringstream os;
        os << "t,d\n";
        for (const auto& pt : resp["curve"])
            os << fmt(pt[0].get<double>()) << ',' << fmt(pt[1].get<double>()) << '\n';
        write_atomic(dir / "curve.csv", os.str());
        std::cout << "T(" << fmt(resp["eps"].get<double>())
                  << ") = " << fmt(resp["mixing_time"].get<double>()) << "\n";
    } else {
        std::cout << resp.dump(2) << "\n";
    }
    write_atomic(dir / "result.json", resp.dump(2) + "\n");
    std::cout << "wrote " << dir.string() << "\n";
    return 0;
}

int run_simulate(Cmd& c, const std::string& out_dir) {
    json req = c.request();
    json resp = api("simulate", req);
    fs::path dir = make_run_dir(out_dir, "simulate", req);
    const std::string geo = req.value("geometry", "segment");
    std::ostringstream os;
    std::vector<std::string> cols = geo == "segment" ? std::vector<std::string>{"t", "i", "y", "dir"}
                                    : geo == "circle" ? std::vector<std::string>{"t", "from", "to"}
                                                      : std::vector<std::string>{"t", "x", "to"};
    for (size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
    for (const auto& e : resp["events"]) {
        for (size_t i = 0; i < cols.size(); ++i)
            os << (i ? "," : "") << (cols[i] == "t" ? fmt(e["t"].get<double>())
                                                    : std::to_string(e[cols[i]].get<int>()));
        os << '\n';
    }
    write_atomic(dir / "events.csv", os.str());
    json summary{{"initial", resp["initial"]},
                 {"final", resp["final"]},
                 {"events", resp["events"].size()},
                 {"horizon", resp["horizon"]}};
    write_atomic(dir / "summary.json", summary.dump(2) + "\n");
    std::cout << "wrote " << dir.string() << "\n";
    return 0;
}

int run_replicated(Cmd& c, const std::string& op, const std::string& out_dir) {
    json req = c.request();
    json resp = api(op, req);
    fs::path dir = make_run_dir(out_dir, op, req);
    const double p = op == "couple" ? 0.5 : req.value("p", 0.5);
    const std::string stat = op == "couple" ? "coupling_time" : "hitting_time";
    write_atomic(dir / "samples.csv",
                 samples_csv(resp, req["n"].get<int>(), req["k"].get<int>(), p, stat));
    json summary{{"stats", resp["stats"]},
                 {"horizon", resp["horizon"]},
                 {"horizon_doublings", resp["horizon_doublings"]}};
    write_atomic(dir / "summary.json", summary.dump(2) + "\n");
    std::cout << summary["stats"].dump(2) << "\nwrote " << dir.string() << "\n";
    return 0;
}

int run_sweep(Cmd& c, const std::string& kind, const std::string& out_dir) {
    json req = c.request();
    req["kind"] = kind;
    json resp = api("sweep", req);
    fs::path dir = make_run_dir(out_dir, "sweep", req);
    write_atomic(dir / "summary.json", resp.dump(2) + "\n");
    std::cout << resp.dump(2) << "\nwrote " << dir.string() << "\n";
    return 0;
}

int run_plotdata(const std::string& results) {
    fs::path dir(results);
    std::ifstream in(dir / "manifest.json");
    if (!in) throw ConfigError("no manifest in " + results);
    json manifest = json::parse(in, nullptr, true, false);
    if (manifest.value("version", "") != fep_version())
        throw ConfigError("manifest version mismatch");
    const std::string sub = manifest.value("subcommand", "");

    std::vector<std::pair<double, double>> pts;
    std::ostringstream csv;
    std::string xlabel, ylabel;
    if (sub == "exact-tv") {
        std::ifstream curve(dir / "curve.csv");
        if (!curve) throw ConfigError("missing curve.csv");
        std::string line;
        std::getline(curve, line);
        csv << "t,d\n";
        while (std::getline(curve, line)) {
            const auto comma = line.find(',');
            if (comma == std::string::npos) continue;
            pts.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
            csv << line << '\n';
        }
        xlabel = "t";
        ylabel = "distance";
    } else if (sub == "sweep") {
        std::ifstream sf(dir / "summary.json");
        if (!sf) throw ConfigError("missing summary.json");
        json summary = json::parse(sf, nullptr, true, false);
        const std::string kind = summary.value("kind", "");
        if (kind == "afep-slope") {
            csv << "# fit slope=" << fmt(summary["slope"].get<double>())
                << " intercept=" << fmt(summary["intercept"].get<double>())
                << " stderr=" << fmt(summary["slope_error"].get<double>()) << "\ngap,log_mean\n";
            for (const auto& p : summary["points"]) {
                pts.emplace_back(p["gap"].get<int>(), p["log_mean"].get<double>());
                csv << p["gap"].get<int>() << ',' << fmt(p["log_mean"].get<double>()) << '\n';
            }
            xlabel = "gap";
            ylabel = "log mean hitting time";
        } else if (kind == "sfep-ratio" || kind == "circle-ratio") {
            csv << "# ratio=" << fmt(summary["ratio"].get<double>()) << "\nn,normalized\n";
            for (const auto& p : summary["points"]) {
                pts.emplace_back(p["n"].get<int>(), p["normalized"].get<double>());
                csv << p["n"].get<int>() << ',' << fmt(p["normalized"].get<double>()) << '\n';
            }
            xlabel = "n";
            ylabel = "normalized mean";
        } else {
            throw ConfigError("sweep kind not plottable: " + kind);
        }
    } else {
        throw ConfigError("no figure analog for subcommand: " + sub);
    }
    if (pts.empty()) throw ConfigError("empty results");
    write_atomic(dir / "plot.csv", csv.str());
    write_atomic(dir / "plot.svg", svg_chart(pts, xlabel, ylabel));
    std::cout << "wrote " << (dir / "plot.csv").string() << " and plot.svg\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"facilitated exclusion toolkit"};
    app.require_subcommand(1);
    std::string out_dir, quantity, kind, results;

    std::deque<Cmd> cmds;  // stable addresses; CLI11 keeps references
    auto make = [&](const char* name, const char* help) -> Cmd& {
        Cmd& c = cmds.emplace_back();
        c.app = app.add_subcommand(name, help);
        c.app->add_option("--config", c.config_path, "JSON config file; flags override its keys");
        c.app->add_option("--out", out_dir, "output root (default $FEP_OUT_ROOT or ./out)");
        return c;
    };

    Cmd& verify = make("verify", "run the invariant suite");
    verify.opt("--max-n", "max_n", 'i', "largest lattice size");

    Cmd& exact = make("exact", "exact finite-size analyses");
    exact.app->add_option("quantity", quantity,
                          "tv | gap | a1 | aldous-brown | equivalence | window | correlation | "
                          "count")
        ->required();
    exact.opt("--family", "family", 's', "fep-seg | fep-circle | sep | obep | zrp-seg | "
                                         "zrp-circle | zrp-const");
    exact.opt("--geometry", "geometry", 's', "segment | circle (count)");
    exact.opt("--n", "n", 'i', "sites");
    exact.opt("--k", "k", 'i', "particles");
    exact.opt("--m", "m", 'i', "particles (site families)");
    exact.opt("--p", "p", 'd', "drift parameter");
    exact.opt("--q", "q", 'd', "open-boundary bulk rate");
    exact.opt("--alpha", "alpha", 'd', "entry rate at site 1");
    exact.opt("--beta", "beta", 'd', "exit rate at site n");
    exact.opt("--gamma", "gamma", 'd', "exit rate at site 1");
    exact.opt("--delta", "delta", 'd', "entry rate at site n");
    exact.opt("--eps", "eps", 'd', "mixing threshold");
    exact.opt("--points", "points", 'i', "grid points");
    exact.opt("--window", "window", 'i', "window length");
    exact.opt("--rho", "rho", 'd', "density");
    exact.opt("--t-max", "t_max", 'd', "largest grid time");

    Cmd& simulate = make("simulate", "sample one trajectory");
    simulate.opt("--geometry", "geometry", 's', "segment | circle | obep");
    simulate.opt("--n", "n", 'i', "sites");
    simulate.opt("--k", "k", 'i', "particles");
    simulate.opt("--p", "p", 'd', "drift parameter");
    simulate.opt("--q", "q", 'd', "open-boundary bulk rate");
    simulate.opt("--alpha", "alpha", 'd', "entry rate at site 1");
    simulate.opt("--beta", "beta", 'd', "exit rate at site n");
    simulate.opt("--gamma", "gamma", 'd', "exit rate at site 1");
    simulate.opt("--delta", "delta", 'd', "entry rate at site n");
    simulate.opt("--start", "start", 's', "minimal | maximal | sample | explicit state");
    simulate.opt("--seed", "seed", 'u', "base seed");
    simulate.opt("--horizon", "horizon", 'd', "time horizon");

    Cmd& hit = make("hit", "hitting time of the ergodic component");
    hit.opt("--start", "start", 's', "minimal | maximal | sample | circle-block");
    hit.opt("--n", "n", 'i', "sites");
    hit.opt("--k", "k", 'i', "particles");
    hit.opt("--p", "p", 'd', "drift parameter");
    hit.opt("--reps", "reps", 'i', "replicates");
    hit.opt("--seed", "seed", 'u', "base seed");
    hit.opt("--threads", "threads", 'i', "worker threads");
    hit.opt("--horizon", "horizon", 'd', "override the horizon policy");

    Cmd& couple = make("couple", "extremal-pair coupling time");
    couple.opt("--n", "n", 'i', "sites");
    couple.opt("--k", "k", 'i', "particles");
    couple.opt("--reps", "reps", 'i', "replicates");
    couple.opt("--seed", "seed", 'u', "base seed");
    couple.opt("--threads", "threads", 'i', "worker threads");
    couple.opt("--horizon", "horizon", 'd', "override the horizon policy");

    Cmd& sweep = make("sweep", "scaling sweeps with fits");
    sweep.app->add_option("kind", kind, "sfep-ratio | afep-slope | circle-ratio")->required();
    sweep.opt("--p", "p", 'd', "drift parameter");
    sweep.opt("--rho", "rho", 'd', "density (circle)");
    sweep.opt("--n-values", "n_values", 'l', "comma-separated sizes");
    sweep.opt("--gaps", "gaps", 'l', "comma-separated hole counts");
    sweep.opt("--reps", "reps", 'i', "replicates per point");
    sweep.opt("--seed", "seed", 'u', "base seed");
    sweep.opt("--threads", "threads", 'i', "worker threads");

    CLI::App* plotdata = app.add_subcommand("plotdata", "plot-ready CSV and SVG from a run");
    plotdata->add_option("results", results, "run directory with a manifest")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (verify.app->parsed()) return run_verify(verify);
        if (exact.app->parsed()) return run_exact(exact, quantity, out_dir);
        if (simulate.app->parsed()) return run_simulate(simulate, out_dir);
        if (hit.app->parsed()) return run_replicated(hit, "hit", out_dir);
        if (couple.app->parsed()) return run_replicated(couple, "couple", out_dir);
        if (sweep.app->parsed()) return run_sweep(sweep, kind, out_dir);
        if (plotdata->parsed()) return run_plotdata(results);
    } catch (const std::exception& e) {
        return exit_code_of(e);
    }
    return 2;
}
