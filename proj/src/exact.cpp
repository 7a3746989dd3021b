#include "fep/exact.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace fep {

namespace {

std::string bits_label(const Bits& b) {
    std::string s(b.size(), '0');
    for (size_t i = 0; i < b.size(); ++i)
        if (b[i]) s[i] = '1';
    return s;
}

Bits bits_of_label(const std::string& s) {
    Bits b(s.size());
    for (size_t i = 0; i < s.size(); ++i) b[i] = (s[i] == '1');
    return b;
}

std::string zrp_label(const std::vector<int>& w) {
    std::ostringstream os;
    for (size_t i = 0; i < w.size(); ++i) {
        if (i) os << ',';
        os << w[i];
    }
    return os.str();
}

std::vector<int> zrp_of_label(const std::string& s) {
    std::vector<int> w;
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, ',')) w.push_back(std::stoi(tok));
    return w;
}

std::vector<Bits> enumerate_bits(int n, int m) {
    std::vector<Bits> out;
    Bits cur(static_cast<size_t>(n), 0);
    auto rec = [&](auto&& self, int pos, int left) -> void {
        if (left == 0) {
            out.push_back(cur);
            return;
        }
        if (n - pos < left) return;
        cur[static_cast<size_t>(pos)] = 1;
        self(self, pos + 1, left - 1);
        cur[static_cast<size_t>(pos)] = 0;
        self(self, pos + 1, left);
    };
    rec(rec, 0, m);
    return out;
}

std::vector<std::vector<int>> enumerate_compositions(int n, int m) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<size_t>(n), 0);
    auto rec = [&](auto&& self, int pos, int left) -> void {
        if (pos == n - 1) {
            cur[static_cast<size_t>(pos)] = left;
            out.push_back(cur);
            return;
        }
        for (int v = 0; v <= left; ++v) {
            cur[static_cast<size_t>(pos)] = v;
            self(self, pos + 1, left - v);
        }
    };
    if (n > 0) rec(rec, 0, m);
    return out;
}

void check_size(size_t s) {
    if (s > static_cast<size_t>(kMaxStates)) throw std::runtime_error("state space too large");
}

void finish(Generator& g) {
    g.index.reserve(g.states.size());
    for (size_t i = 0; i < g.states.size(); ++i) g.index.emplace(g.states[i], static_cast<int>(i));
    g.L.resize(static_cast<int>(g.states.size()));
}

// Exclusion swap transitions shared by the segment families. Right jumps at
// rate r need need_left behind (facilitation); plain exclusion passes false.
void add_exclusion_rows(Generator& g, double right, double left, bool facilitated) {
    const int n = static_cast<int>(g.states.front().size());
    for (int s = 0; s < g.L.n; ++s) {
        Bits b = bits_of_label(g.states[static_cast<size_t>(s)]);
        for (int x = 1; x <= n; ++x) {
            const bool occ = b[static_cast<size_t>(x - 1)];
            if (!occ) continue;
            const bool lo = x > 1 && b[static_cast<size_t>(x - 2)];
            const bool hi = x < n && b[static_cast<size_t>(x)];
            if (x < n && !hi && (!facilitated || lo)) {
                std::swap(b[static_cast<size_t>(x - 1)], b[static_cast<size_t>(x)]);
                g.L.add(s, g.index.at(bits_label(b)), right);
                std::swap(b[static_cast<size_t>(x - 1)], b[static_cast<size_t>(x)]);
            }
            if (x > 1 && !lo && (!facilitated || hi)) {
                std::swap(b[static_cast<size_t>(x - 1)], b[static_cast<size_t>(x - 2)]);
                g.L.add(s, g.index.at(bits_label(b)), left);
                std::swap(b[static_cast<size_t>(x - 1)], b[static_cast<size_t>(x - 2)]);
            }
        }
    }
}

void add_zrp_rows(Generator& g, int n, bool circular, double right, double left, int threshold) {
    for (int s = 0; s < g.L.n; ++s) {
        std::vector<int> w = zrp_of_label(g.states[static_cast<size_t>(s)]);
        for (int i = 0; i < n; ++i) {
            if (w[static_cast<size_t>(i)] < threshold) continue;
            auto jump = [&](int j, double rate) {
                --w[static_cast<size_t>(i)];
                ++w[static_cast<size_t>(j)];
                g.L.add(s, g.index.at(zrp_label(w)), rate);
                --w[static_cast<size_t>(j)];
                ++w[static_cast<size_t>(i)];
            };
            if (circular) {
                if (n > 1) {
                    jump((i + 1) % n, right);
                    jump((i + n - 1) % n, left);
                }
            } else {
                if (i + 1 < n) jump(i + 1, right);
                if (i > 0) jump(i - 1, left);
            }
        }
    }
}

int hole_position_sum(const SegmentConfig& cfg) {
    int a = 0;
    for (int x = 1; x <= cfg.N; ++x)
        if (!cfg.at(x)) a += x;
    return a;
}

DistVec weights_to_dist(std::vector<double> w) {
    double total = std::accumulate(w.begin(), w.end(), 0.0);
    if (total <= 0) throw std::runtime_error("empty stationary support");
    for (double& v : w) v /= total;
    return w;
}

// Count of recurrent (closed) communicating classes via Kosaraju.
int closed_class_count(const RateMatrix& L) {
    const int n = L.n;
    std::vector<std::vector<int>> fwd(static_cast<size_t>(n)), rev(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        for (const auto& [j, r] : L.rows[static_cast<size_t>(i)]) {
            if (r <= 0) continue;
            fwd[static_cast<size_t>(i)].push_back(j);
            rev[static_cast<size_t>(j)].push_back(i);
        }
    }
    std::vector<int> order;
    order.reserve(static_cast<size_t>(n));
    std::vector<char> seen(static_cast<size_t>(n), 0);
    for (int s = 0; s < n; ++s) {
        if (seen[static_cast<size_t>(s)]) continue;
        std::vector<std::pair<int, size_t>> stack{{s, 0}};
        seen[static_cast<size_t>(s)] = 1;
        while (!stack.empty()) {
            auto& [u, it] = stack.back();
            if (it < fwd[static_cast<size_t>(u)].size()) {
                int v = fwd[static_cast<size_t>(u)][it++];
                if (!seen[static_cast<size_t>(v)]) {
                    seen[static_cast<size_t>(v)] = 1;
                    stack.emplace_back(v, 0);
                }
            } else {
                order.push_back(u);
                stack.pop_back();
            }
        }
    }
    std::vector<int> comp(static_cast<size_t>(n), -1);
    int ncomp = 0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if (comp[static_cast<size_t>(*it)] >= 0) continue;
        std::vector<int> stack{*it};
        comp[static_cast<size_t>(*it)] = ncomp;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v : rev[static_cast<size_t>(u)]) {
                if (comp[static_cast<size_t>(v)] < 0) {
                    comp[static_cast<size_t>(v)] = ncomp;
                    stack.push_back(v);
                }
            }
        }
        ++ncomp;
    }
    std::vector<char> open(static_cast<size_t>(ncomp), 0);
    for (int i = 0; i < n; ++i)
        for (int j : fwd[static_cast<size_t>(i)])
            if (comp[static_cast<size_t>(i)] != comp[static_cast<size_t>(j)])
                open[static_cast<size_t>(comp[static_cast<size_t>(i)])] = 1;
    int closed = 0;
    for (char o : open) closed += (o == 0);
    return closed;
}

double log_poisson(double rate, int m) {
    return -rate + m * std::log(rate) - std::lgamma(m + 1.0);
}

// One uniformization sweep producing exp(t_j L) d0 for every time at once.
// An optional keep mask turns the step substochastic (transitions into the
// complement are killed); callers read absorbed survival off the masses.
std::vector<DistVec> evolve_multi(const DistVec& d0, const RateMatrix& L,
                                  const std::vector<double>& times, const std::vector<char>* keep) {
    const int n = L.n;
    if (static_cast<int>(d0.size()) != n) throw std::invalid_argument("dimension mismatch");
    const double lam = L.max_exit();
    std::vector<DistVec> out(times.size(), DistVec(static_cast<size_t>(n), 0.0));
    std::vector<double> cum(times.size(), 0.0);
    DistVec cur = d0;
    if (keep) {
        for (int i = 0; i < n; ++i)
            if (!(*keep)[static_cast<size_t>(i)]) cur[static_cast<size_t>(i)] = 0;
    }
    if (lam == 0) {
        for (size_t j = 0; j < times.size(); ++j) out[j] = cur;
        return out;
    }
    constexpr double kTail = 1e-14;
    constexpr long kCap = 20'000'000;
    DistVec next(static_cast<size_t>(n));
    for (long m = 0;; ++m) {
        bool done = true;
        for (size_t j = 0; j < times.size(); ++j) {
            const double r = lam * times[j];
            double w = (r == 0) ? (m == 0 ? 1.0 : 0.0) : std::exp(log_poisson(r, static_cast<int>(m)));
            cum[j] += w;
            if (w > 0) {
                for (int i = 0; i < n; ++i) out[j][static_cast<size_t>(i)] += w * cur[static_cast<size_t>(i)];
            }
            if (cum[j] < 1.0 - kTail && m < static_cast<long>(r) + 10) done = false;
            if (cum[j] < 1.0 - kTail && std::exp(log_poisson(std::max(r, 1e-300), static_cast<int>(m))) > 1e-18)
                done = false;
        }
        if (done) break;
        if (m > kCap) throw std::runtime_error("uniformization series cap exceeded");
        // next = cur (I + L/lam)
        for (int i = 0; i < n; ++i)
            next[static_cast<size_t>(i)] =
                cur[static_cast<size_t>(i)] * (1.0 + L.diag[static_cast<size_t>(i)] / lam);
        for (int i = 0; i < n; ++i) {
            const double mass = cur[static_cast<size_t>(i)];
            if (mass == 0) continue;
            for (const auto& [j, rate] : L.rows[static_cast<size_t>(i)]) {
                if (keep && !(*keep)[static_cast<size_t>(j)]) continue;
                next[static_cast<size_t>(j)] += mass * rate / lam;
            }
        }
        cur.swap(next);
    }
    return out;
}

double lchoose(double a, double b) {
    if (b < 0 || b > a || a < 0) return -std::numeric_limits<double>::infinity();
    return std::lgamma(a + 1) - std::lgamma(b + 1) - std::lgamma(a - b + 1);
}

unsigned __int128 choose_exact(int a, int b) {
    if (b < 0 || b > a || a < 0) return 0;
    b = std::min(b, a - b);
    unsigned __int128 c = 1;
    for (int i = 1; i <= b; ++i) c = c * static_cast<unsigned>(a - b + i) / static_cast<unsigned>(i);
    return c;
}

bool window_admissible(const Bits& sigma) {
    for (size_t x = 0; x + 1 < sigma.size(); ++x)
        if (!sigma[x] && !sigma[x + 1]) return false;
    return true;
}

}  // namespace

void RateMatrix::resize(int size) {
    n = size;
    rows.assign(static_cast<size_t>(size), {});
    diag.assign(static_cast<size_t>(size), 0.0);
}

void RateMatrix::add(int i, int j, double rate) {
    if (rate < 0) throw std::invalid_argument("negative rate");
    if (i == j) throw std::invalid_argument("self loop");
    rows[static_cast<size_t>(i)].emplace_back(j, rate);
    diag[static_cast<size_t>(i)] -= rate;
}

double RateMatrix::at(int i, int j) const {
    if (i == j) return diag[static_cast<size_t>(i)];
    double r = 0;
    for (const auto& [c, v] : rows[static_cast<size_t>(i)])
        if (c == j) r += v;
    return r;
}

double RateMatrix::max_exit() const {
    double m = 0;
    for (double d : diag) m = std::max(m, -d);
    return m;
}

double RateMatrix::row_sum_error() const {
    double worst = 0;
    for (int i = 0; i < n; ++i) {
        double s = diag[static_cast<size_t>(i)];
        for (const auto& [j, r] : rows[static_cast<size_t>(i)]) s += r;
        worst = std::max(worst, std::abs(s));
    }
    return worst;
}

int Generator::find(const std::string& s) const {
    auto it = index.find(s);
    return it == index.end() ? -1 : it->second;
}

Generator build_generator(Family f, const FamilyParams& prm) {
    Generator g;
    g.family = f;
    g.params = prm;
    switch (f) {
        case Family::FepSegment: {
            for (const auto& c : enumerate_segment(prm.N, prm.k)) g.states.push_back(c.to_string());
            check_size(g.states.size());
            finish(g);
            add_exclusion_rows(g, prm.p, 1 - prm.p, true);
            break;
        }
        case Family::FepCircle: {
            for (const auto& c : enumerate_circle(prm.N, prm.k)) g.states.push_back(c.to_string());
            check_size(g.states.size());
            finish(g);
            const int n = prm.N;
            for (int s = 0; s < g.L.n; ++s) {
                Bits b = bits_of_label(g.states[static_cast<size_t>(s)]);
                auto occ = [&](int x) { return b[static_cast<size_t>(((x % n) + n) % n)] != 0; };
                for (int x = 0; x < n; ++x) {
                    if (!occ(x)) continue;
                    for (int d : {+1, -1}) {
                        if (occ(x - d) && !occ(x + d)) {
                            std::swap(b[static_cast<size_t>(x)],
                                      b[static_cast<size_t>(((x + d) % n + n) % n)]);
                            g.L.add(s, g.index.at(bits_label(b)), 0.5);
                            std::swap(b[static_cast<size_t>(x)],
                                      b[static_cast<size_t>(((x + d) % n + n) % n)]);
                        }
                    }
                }
            }
            break;
        }
        case Family::Sep: {
            for (const auto& b : enumerate_bits(prm.n, prm.m)) g.states.push_back(bits_label(b));
            check_size(g.states.size());
            finish(g);
            add_exclusion_rows(g, 1 - prm.p, prm.p, false);
            break;
        }
        case Family::Obep: {
            check_size(size_t{1} << prm.n);
            for (size_t mask = 0; mask < (size_t{1} << prm.n); ++mask) {
                Bits b(static_cast<size_t>(prm.n));
                for (int x = 0; x < prm.n; ++x) b[static_cast<size_t>(x)] = (mask >> x) & 1;
                g.states.push_back(bits_label(b));
            }
            finish(g);
            const auto& o = prm.obep;
            add_exclusion_rows(g, o.q, 1 - o.q, false);
            for (int s = 0; s < g.L.n; ++s) {
                Bits b = bits_of_label(g.states[static_cast<size_t>(s)]);
                auto flip = [&](int x, double rate) {
                    if (rate <= 0) return;
                    b[static_cast<size_t>(x)] ^= 1;
                    g.L.add(s, g.index.at(bits_label(b)), rate);
                    b[static_cast<size_t>(x)] ^= 1;
                };
                flip(0, b[0] ? o.gamma : o.alpha);
                flip(prm.n - 1, b[static_cast<size_t>(prm.n - 1)] ? o.beta : o.delta);
            }
            break;
        }
        case Family::ZrpSegment:
        case Family::ZrpCircle:
        case Family::ZrpConstantRate: {
            for (const auto& w : enumerate_compositions(prm.n, prm.m)) g.states.push_back(zrp_label(w));
            check_size(g.states.size());
            finish(g);
            const bool circular = (f == Family::ZrpCircle);
            const int threshold = (f == Family::ZrpConstantRate) ? 1 : 2;
            add_zrp_rows(g, prm.n, circular, prm.p, 1 - prm.p, threshold);
            break;
        }
    }
    return g;
}

Generator restrict_closed(const Generator& g, const std::vector<int>& keep) {
    std::vector<int> remap(static_cast<size_t>(g.L.n), -1);
    Generator out;
    out.family = g.family;
    out.params = g.params;
    for (size_t i = 0; i < keep.size(); ++i) {
        remap[static_cast<size_t>(keep[i])] = static_cast<int>(i);
        out.states.push_back(g.states[static_cast<size_t>(keep[i])]);
    }
    finish(out);
    for (size_t i = 0; i < keep.size(); ++i) {
        for (const auto& [j, r] : g.L.rows[static_cast<size_t>(keep[i])]) {
            if (r <= 0) continue;
            if (remap[static_cast<size_t>(j)] < 0)
                throw std::invalid_argument("subset is not closed under the dynamics");
            out.L.add(static_cast<int>(i), remap[static_cast<size_t>(j)], r);
        }
    }
    return out;
}

DistVec stationary_kernel(const RateMatrix& L) {
    const int classes = closed_class_count(L);
    if (classes != 1)
        throw std::runtime_error("stationary distribution not unique: " + std::to_string(classes) +
                                 " closed classes");
    const int n = L.n;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + 1, n);
    for (int i = 0; i < n; ++i) {
        a(i, i) = L.diag[static_cast<size_t>(i)];
        for (const auto& [j, r] : L.rows[static_cast<size_t>(i)]) a(j, i) += r;
    }
    for (int i = 0; i < n; ++i) a(n, i) = 1.0;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    rhs(n) = 1.0;
    Eigen::VectorXd x = a.colPivHouseholderQr().solve(rhs);
    DistVec pi(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) pi[static_cast<size_t>(i)] = std::max(0.0, x(i));
    return weights_to_dist(std::move(pi));
}

DistVec stationary(Family f, const FamilyParams& prm) {
    Generator g = build_generator(f, prm);
    const int n = g.L.n;
    std::vector<double> w(static_cast<size_t>(n), 0.0);
    switch (f) {
        case Family::FepSegment: {
            const double lam = (1 - prm.p) / prm.p;
            std::vector<int> a(static_cast<size_t>(n), -1);
            int amin = std::numeric_limits<int>::max();
            for (int s = 0; s < n; ++s) {
                SegmentConfig c = SegmentConfig::from_string(g.states[static_cast<size_t>(s)]);
                if (!is_ergodic_segment(c)) continue;
                a[static_cast<size_t>(s)] = hole_position_sum(c);
                amin = std::min(amin, a[static_cast<size_t>(s)]);
            }
            for (int s = 0; s < n; ++s)
                if (a[static_cast<size_t>(s)] >= 0)
                    w[static_cast<size_t>(s)] = std::pow(lam, a[static_cast<size_t>(s)] - amin);
            return weights_to_dist(std::move(w));
        }
        case Family::FepCircle: {
            for (int s = 0; s < n; ++s)
                if (is_ergodic_circle(CircleConfig::from_string(g.states[static_cast<size_t>(s)])))
                    w[static_cast<size_t>(s)] = 1.0;
            return weights_to_dist(std::move(w));
        }
        case Family::Sep: {
            const double lam = (1 - prm.p) / prm.p;
            for (int s = 0; s < n; ++s) {
                const std::string& lbl = g.states[static_cast<size_t>(s)];
                int sum = 0;
                for (int x = 1; x <= prm.n; ++x)
                    if (lbl[static_cast<size_t>(x - 1)] == '1') sum += x;
                w[static_cast<size_t>(s)] = std::pow(lam, sum);
            }
            return weights_to_dist(std::move(w));
        }
        case Family::ZrpConstantRate: {
            const double lam = (1 - prm.p) / prm.p;
            for (int s = 0; s < n; ++s) {
                std::vector<int> omega = zrp_of_label(g.states[static_cast<size_t>(s)]);
                long long e = 0;
                for (int x = 1; x <= prm.n; ++x)
                    e += static_cast<long long>(prm.n + 1 - x) * omega[static_cast<size_t>(x - 1)];
                w[static_cast<size_t>(s)] = std::pow(lam, static_cast<double>(e));
            }
            return weights_to_dist(std::move(w));
        }
        default:
            return stationary_kernel(g.L);
    }
}

double tv_distance(const DistVec& a, const DistVec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dimension mismatch");
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s / 2;
}

DistVec evolve(const DistVec& d0, const RateMatrix& L, double t) {
    if (t < 0) throw std::invalid_argument("negative time");
    return evolve_multi(d0, L, {t}, nullptr).front();
}

double tv_worst(const Generator& g, const DistVec& pi, double t) {
    double worst = 0;
    for (int s = 0; s < g.L.n; ++s) {
        DistVec d0(static_cast<size_t>(g.L.n), 0.0);
        d0[static_cast<size_t>(s)] = 1.0;
        worst = std::max(worst, tv_distance(evolve(d0, g.L, t), pi));
    }
    return worst;
}

int tv_worst_state(const Generator& g, const DistVec& pi, double t) {
    double worst = -1;
    int arg = 0;
    for (int s = 0; s < g.L.n; ++s) {
        DistVec d0(static_cast<size_t>(g.L.n), 0.0);
        d0[static_cast<size_t>(s)] = 1.0;
        const double d = tv_distance(evolve(d0, g.L, t), pi);
        if (d > worst) {
            worst = d;
            arg = s;
        }
    }
    return arg;
}

std::vector<std::pair<double, double>> tv_curve(const Generator& g, const DistVec& pi,
                                                const std::vector<double>& times) {
    std::vector<std::pair<double, double>> out;
    for (double t : times) out.emplace_back(t, 0.0);
    for (int s = 0; s < g.L.n; ++s) {
        DistVec d0(static_cast<size_t>(g.L.n), 0.0);
        d0[static_cast<size_t>(s)] = 1.0;
        auto evolved = evolve_multi(d0, g.L, times, nullptr);
        for (size_t j = 0; j < times.size(); ++j)
            out[j].second = std::max(out[j].second, tv_distance(evolved[j], pi));
    }
    return out;
}

double mixing_time_exact(const Generator& g, const DistVec& pi, double eps) {
    if (eps >= 1 || tv_worst(g, pi, 0) <= eps) return 0;
    double hi = 1.0;
    int guard = 0;
    while (tv_worst(g, pi, hi) > eps) {
        hi *= 2;
        if (++guard > 60) throw std::runtime_error("mixing time bracket not found");
    }
    double lo = (guard == 0) ? 0.0 : hi / 2;
    while (hi - lo > 1e-3 * hi) {
        const double mid = (lo + hi) / 2;
        (tv_worst(g, pi, mid) <= eps ? hi : lo) = mid;
    }
    return hi;
}

EigencheckResult eigencheck_a1(int N, int k) {
    FamilyParams prm;
    prm.N = N;
    prm.k = k;
    Generator full = build_generator(Family::FepCircle, prm);
    std::vector<int> keep;
    for (int s = 0; s < full.L.n; ++s)
        if (is_ergodic_circle(CircleConfig::from_string(full.states[static_cast<size_t>(s)])))
            keep.push_back(s);
    Generator g = restrict_closed(full, keep);
    const bool hole_side = 3 * k >= 2 * N;
    std::vector<double> a(static_cast<size_t>(g.L.n), 0.0);
    for (int s = 0; s < g.L.n; ++s) {
        CircleConfig c = CircleConfig::from_string(g.states[static_cast<size_t>(s)]);
        int label = 0;
        double v = 0;
        for (int x = 0; x < N; ++x) {
            if (!c.at(x)) continue;
            const bool right = c.at(x + 1);
            if (hole_side ? !right : right) v += std::cos(2 * M_PI * label / k);
            ++label;
        }
        a[static_cast<size_t>(s)] = v;
    }
    EigencheckResult res;
    res.eigenvalue = std::cos(2 * M_PI / k) - 1;
    for (int s = 0; s < g.L.n; ++s) {
        double la = g.L.diag[static_cast<size_t>(s)] * a[static_cast<size_t>(s)];
        for (const auto& [j, r] : g.L.rows[static_cast<size_t>(s)]) la += r * a[static_cast<size_t>(j)];
        res.residual = std::max(res.residual, std::abs(la - res.eigenvalue * a[static_cast<size_t>(s)]));
        res.norm = std::max(res.norm, std::abs(a[static_cast<size_t>(s)]));
    }
    return res;
}

AldousBrownResult aldous_brown_check(int n, int m, double p, const std::vector<double>& t_grid) {
    FamilyParams prm;
    prm.n = n;
    prm.m = m;
    prm.p = p;
    Generator g = build_generator(Family::ZrpConstantRate, prm);
    DistVec pi = stationary(Family::ZrpConstantRate, prm);
    const double lam = (1 - p) / p;

    std::vector<char> outside(static_cast<size_t>(g.L.n), 0);
    double pi_out = 0, pi_one = 0;
    for (int s = 0; s < g.L.n; ++s) {
        std::vector<int> w = zrp_of_label(g.states[static_cast<size_t>(s)]);
        if (w[0] == 0) {
            outside[static_cast<size_t>(s)] = 1;
            pi_out += pi[static_cast<size_t>(s)];
        }
        if (w[0] == 1) pi_one += pi[static_cast<size_t>(s)];
    }

    auto absorbed = evolve_multi(pi, g.L, t_grid, &outside);
    AldousBrownResult res;
    res.p_first_site_one = pi_one;
    res.lambda_pow = std::pow(lam, n - 1);
    const double capacity = p * pi_one;
    for (size_t j = 0; j < t_grid.size(); ++j) {
        AldousBrownPoint pt;
        pt.t = t_grid[j];
        pt.survival = std::accumulate(absorbed[j].begin(), absorbed[j].end(), 0.0);
        pt.bound = pi_out * std::exp(-pt.t * capacity / pi_out);
        pt.margin = pt.survival - pt.bound;
        res.points.push_back(pt);
    }
    return res;
}

double grand_canonical(double rho, const Bits& sigma) {
    if (!(rho > 0.5 && rho < 1)) throw std::invalid_argument("density out of range");
    if (sigma.size() < 2) throw std::invalid_argument("window too short");
    if (!window_admissible(sigma)) return 0;
    const int ell = static_cast<int>(sigma.size());
    int n = 0;
    for (auto b : sigma) n += b;
    const int ends = sigma.front() + sigma.back();
    return std::pow(rho, ends - n) * std::pow(1 - rho, ell - n) *
           std::pow(2 * rho - 1, 2 * n + 1 - ell - ends);
}

double canonical_marginal(int N, int k, const Bits& sigma) {
    if (sigma.size() < 2 || static_cast<int>(sigma.size()) > N)
        throw std::invalid_argument("window size out of range");
    if (!window_admissible(sigma)) return 0;
    const int ell = static_cast<int>(sigma.size());
    int n = 0;
    for (auto b : sigma) n += b;
    const int ends = sigma.front() + sigma.back();
    const double num = lchoose(k - (n + 1 - ends), N - k - (ell - n));
    const double den = lchoose(k, N - k);
    if (std::isinf(num)) return 0;
    return static_cast<double>(k) / N * std::exp(num - den);
}

double canonical_marginal_exact(int N, int k, const Bits& sigma) {
    if (N > 64) throw std::invalid_argument("exact path limited to N <= 64");
    if (sigma.size() < 2 || static_cast<int>(sigma.size()) > N)
        throw std::invalid_argument("window size out of range");
    if (!window_admissible(sigma)) return 0;
    const int ell = static_cast<int>(sigma.size());
    int n = 0;
    for (auto b : sigma) n += b;
    const int ends = sigma.front() + sigma.back();
    const unsigned __int128 num = choose_exact(k - (n + 1 - ends), N - k - (ell - n));
    const unsigned __int128 den = choose_exact(k, N - k);
    return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den) * k / N);
}

double equivalence_error(int N, int k, int ell) {
    const double rho = static_cast<double>(k) / N;
    double worst = 0;
    for (size_t mask = 0; mask < (size_t{1} << ell); ++mask) {
        Bits sigma(static_cast<size_t>(ell));
        for (int x = 0; x < ell; ++x) sigma[static_cast<size_t>(x)] = (mask >> x) & 1;
        worst = std::max(worst,
                         std::abs(canonical_marginal(N, k, sigma) - grand_canonical(rho, sigma)));
    }
    return worst;
}

CorrelationRatios correlation_ratio_gc(double rho, int ell) {
    if (ell < 2 || ell > 26) throw std::invalid_argument("window size out of range");
    double joint[2][2] = {{0, 0}, {0, 0}};
    for (size_t mask = 0; mask < (size_t{1} << ell); ++mask) {
        Bits sigma(static_cast<size_t>(ell));
        for (int x = 0; x < ell; ++x) sigma[static_cast<size_t>(x)] = (mask >> x) & 1;
        joint[sigma.front()][sigma.back()] += grand_canonical(rho, sigma);
    }
    const double norm = joint[0][0] + joint[0][1] + joint[1][0] + joint[1][1];
    CorrelationRatios res;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const double mi = joint[i][0] + joint[i][1];
            const double mj = joint[0][j] + joint[1][j];
            res.r[i][j] = joint[i][j] * norm / (mi * mj);
        }
    }
    return res;
}

CorrelationRatios correlation_ratio_canonical(int N, int k, int ell) {
    if (ell < 2 || ell > N) throw std::invalid_argument("window size out of range");
    double joint[2][2] = {{0, 0}, {0, 0}};
    double total = 0;
    for (const auto& c : enumerate_circle(N, k)) {
        if (!is_ergodic_circle(c)) continue;
        joint[c.at(0)][c.at(ell - 1)] += 1;
        total += 1;
    }
    CorrelationRatios res;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const double mi = joint[i][0] + joint[i][1];
            const double mj = joint[0][j] + joint[1][j];
            res.r[i][j] = joint[i][j] * total / (mi * mj);
        }
    }
    return res;
}

double spectral_gap(const RateMatrix& L, const DistVec& pi) {
    const int n = L.n;
    if (static_cast<int>(pi.size()) != n) throw std::invalid_argument("dimension mismatch");
    for (double v : pi)
        if (!(v > 0)) throw std::invalid_argument("stationary support must be full");
    if (n < 2) return 0;
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        s(i, i) = L.diag[static_cast<size_t>(i)];
        for (const auto& [j, r] : L.rows[static_cast<size_t>(i)])
            s(i, j) += r * std::sqrt(pi[static_cast<size_t>(i)] / pi[static_cast<size_t>(j)]);
    }
    const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
    if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
        throw std::invalid_argument("generator is not reversible for the given measure");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es((s + s.transpose()) / 2);
    return -es.eigenvalues()(n - 2);
}

}  // namespace fep
