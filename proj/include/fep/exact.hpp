#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fep/engine.hpp"
#include "fep/state.hpp"

namespace fep {

// Hard cap on enumerated state spaces.
inline constexpr int kMaxStates = 1 << 20;

// Sparse CTMC generator. Off-diagonal entries are stored per row; the
// diagonal is kept separately and always equals minus the row sum.
struct RateMatrix {
    int n = 0;
    std::vector<std::vector<std::pair<int, double>>> rows;
    std::vector<double> diag;

    void resize(int size);
    void add(int i, int j, double rate);
    double at(int i, int j) const;
    double max_exit() const;
    double row_sum_error() const;
};

using DistVec = std::vector<double>;

enum class Family {
    FepSegment,
    FepCircle,
    Sep,
    Obep,
    ZrpSegment,
    ZrpCircle,
    ZrpConstantRate,
};

// Shared parameter bundle. Conventions:
//   FepSegment:      N, k, p (right-jump rate; left q = 1-p).
//   FepCircle:       N, k; both directions at rate 1/2.
//   Sep:             n sites, m particles, p; a particle jumps right at
//                    rate 1-p and left at rate p (the image of the
//                    drift-p facilitated process under the step readout).
//   Obep:            n sites, boundary bundle in obep.
//   ZrpSegment:      n sites, m particles, p; piles of size >= 2 emit
//                    right at p (sites 1..n-1) and left at 1-p (2..n).
//   ZrpCircle:       n sites, m particles, p; same rule on the torus.
//   ZrpConstantRate: n sites, m particles, p; occupied sites emit.
struct FamilyParams {
    int N = 0, k = 0;
    int n = 0, m = 0;
    double p = 0.5;
    ObepParams obep;
};

struct Generator {
    Family family = Family::FepSegment;
    FamilyParams params;
    RateMatrix L;
    std::vector<std::string> states;  // canonical labels, index-aligned
    std::unordered_map<std::string, int> index;

    int find(const std::string& s) const;
};

Generator build_generator(Family f, const FamilyParams& prm);

// Restriction to a subset the dynamics never leaves; throws on leakage.
Generator restrict_closed(const Generator& g, const std::vector<int>& keep);

// Stationary distribution aligned to the build_generator enumeration.
// Closed forms where the family is reversible, kernel solve otherwise.
DistVec stationary(Family f, const FamilyParams& prm);

// Nullspace of the transpose; throws if the recurrent class is not unique.
DistVec stationary_kernel(const RateMatrix& L);

double tv_distance(const DistVec& a, const DistVec& b);

// exp(tL) applied to d0 by uniformization, Poisson tail below 1e-14.
DistVec evolve(const DistVec& d0, const RateMatrix& L, double t);

// Worst case total variation to pi over point-mass starts.
double tv_worst(const Generator& g, const DistVec& pi, double t);
int tv_worst_state(const Generator& g, const DistVec& pi, double t);
std::vector<std::pair<double, double>> tv_curve(const Generator& g, const DistVec& pi,
                                                const std::vector<double>& times);

// inf{t : tv_worst(t) <= eps}, bisection to relative tolerance 1e-3.
double mixing_time_exact(const Generator& g, const DistVec& pi, double eps);

// Applies the circle generator restricted to its ergodic component to the
// first Fourier statistic of the particle-label process, anchored at site
// 0, and reports the residual against eigenvalue cos(2 pi / k) - 1.
struct EigencheckResult {
    double eigenvalue = 0;
    double residual = 0;
    double norm = 0;  // inf-norm of the statistic
};
EigencheckResult eigencheck_a1(int N, int k);

// Survival of the rare set {first pile occupied} in the constant-rate
// process, against the capacity lower bound.
struct AldousBrownPoint {
    double t = 0, survival = 0, bound = 0, margin = 0;
};
struct AldousBrownResult {
    std::vector<AldousBrownPoint> points;
    double p_first_site_one = 0;  // stationary mass of {w(1) = 1}
    double lambda_pow = 0;        // lambda^{n-1}
};
AldousBrownResult aldous_brown_check(int n, int m, double p, const std::vector<double>& t_grid);

// Infinite-volume window law at density rho in (1/2, 1); zero off the
// no-adjacent-holes set.
double grand_canonical(double rho, const Bits& sigma);

// Finite-circle window marginal of the uniform ergodic measure, via
// log-gamma binomials; the exact integer path cross-checks it for N <= 64.
double canonical_marginal(int N, int k, const Bits& sigma);
double canonical_marginal_exact(int N, int k, const Bits& sigma);

// max over windows of |canonical - grand canonical at rho = k/N|.
double equivalence_error(int N, int k, int ell);

// Joint over product occupation probabilities at the two window ends.
struct CorrelationRatios {
    double r[2][2] = {{0, 0}, {0, 0}};
};
CorrelationRatios correlation_ratio_gc(double rho, int ell);
CorrelationRatios correlation_ratio_canonical(int N, int k, int ell);

// Smallest nonzero eigenvalue magnitude of -L after the reversible
// symmetrization by pi; throws if the pair is not reversible.
double spectral_gap(const RateMatrix& L, const DistVec& pi);

}  // namespace fep
