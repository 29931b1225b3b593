#ifndef QSMETRIC_VERIFIER_HPP
#define QSMETRIC_VERIFIER_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qsmetric/params.hpp"
#include "qsmetric/stochastic.hpp"

namespace qsmetric {

// Outcome of a sampled or exhaustive bound check. worst_margin is the minimum
// over samples of slack ratio (bound side over used side), so >= 1 means the
// bound held everywhere.
struct BoundsReport {
    std::string check;
    std::int64_t samples = 0;
    std::int64_t violations = 0;
    std::int64_t inconclusive = 0;  // samples lost to the node budget
    std::uint64_t seed = 0;
    double worst_margin = 0;
    bool pass = false;
    std::vector<std::pair<std::string, double>> extras;
};

// Exhaustive check of the neighbor comparability band [1/R, R] for all
// adjacent same-level cube pairs up to level_cap.
BoundsReport check_ratio_bound(const Params& params, int level_cap);

enum class BoundsCheck { path_monotone, metric_monotone, diameter, two_sided };

std::string bounds_check_name(BoundsCheck check);
BoundsCheck bounds_check_from_name(const std::string& name);

struct BoundsOptions {
    std::int64_t samples = 200;
    std::uint64_t seed = 1;
    std::int64_t node_budget = 1'500'000;
};

// Sampled verification of the graph-metric inequalities:
//   path_monotone   level-(k+1) length of a staircase in a cube dominates the
//                   level-k distance of its endpoints (up to lattice slack)
//   metric_monotone distances between skeleton points grow with the level
//   diameter        graph diameter of a cube star vs the analytic bound
//   two_sided       sampled pairs obey the lower bound and both upper bounds
BoundsReport bounds_report(const Params& params, BoundsCheck check, const BoundsOptions& opt);

// Capped variant: graph distance is Lipschitz against (M-2n+1) |x-y|.
BoundsReport lipschitz_check(const Params& params, std::int64_t pairs, std::uint64_t seed,
                             std::int64_t node_budget = 1'500'000);

// One quasisymmetry sample: distance ratio against the envelope at t.
struct QsTriple {
    double t = 0;       // |x-y| / |x-z|
    double ratio = 0;   // lambda-slack graph distance ratio
    double eta = 0;     // envelope value at t
};

struct QsReport {
    std::int64_t triples = 0;
    std::int64_t inconclusive = 0;
    std::uint64_t seed = 0;
    double worst_margin = 0;    // min over triples of eta / ratio
    double max_ratio_low = 0;   // max ratio over t in [1e-3, 1e-2]
    double max_ratio_high = 0;  // max ratio over t in [1e-1, 1]
    bool decay_visible = false;
    bool pass = false;
    std::vector<QsTriple> rows;
};

// Stratified scatter: seven log-uniform buckets of target t over [1e-6, 10],
// reusing one base pair (x, z) per bucket cycle.
QsReport qs_scatter(const Params& params, std::int64_t triples, std::uint64_t seed,
                    std::int64_t node_budget = 1'500'000);

// Parameter plan targeting content dimension alpha with L = M^beta.
struct PlanStage {
    int m = 0;
    std::int64_t k = 0;         // selected digit count, nondecreasing in m
    bool k_found = false;
    double fraction = 0;        // sampled pass fraction at k
    double wilson_lower = 0;
    double eps_log10 = 0;       // log10 of 2nC1 (2 mu / M)^k
    double bound_log10 = 0;     // log10 of (2nC1)^alpha rho*^m
};

struct DimensionPlan {
    explicit DimensionPlan(Params params_) : params(std::move(params_)) {}

    Params params;              // uncapped, L = M^beta
    Rational alpha;
    Rational beta;
    GeometricMean mu;
    double rho_star = 0;        // M^(n-alpha) (2 mu)^alpha
    double log10_rho_star = 0;
    bool mu_lt_one = false;     // exact integer comparison
    bool contraction = false;   // exact: M^(n-alpha) mu^alpha < 2^-alpha
    bool feasible = false;
    std::string certificate;    // the exact inequality that was decided
    std::vector<PlanStage> stages;
};

DimensionPlan make_plan(int n, const Rational& alpha, int beta, int M, int m_max,
                        std::int64_t km_samples, std::uint64_t seed);

// Ladder search: smallest beta in {1,3,5,7,9} with alpha > n/(1+beta), then
// smallest M in {8,16,32,64} that is exactly feasible. Infeasible ladders
// return a plan with feasible == false and an explanatory certificate.
DimensionPlan choose_parameters(int n, const Rational& alpha, int m_max = 3,
                                std::int64_t km_samples = 4000, std::uint64_t seed = 1);

// Content-sum comparison at the plan's digit counts: analytic geometric bound
// vs a Monte Carlo estimate of the surviving-content sum, all in log10.
struct ContentRow {
    int m = 0;
    std::int64_t k = 0;
    double eps_log10 = 0;
    double bound_log10 = 0;
    double empirical_log10 = 0;  // -inf when no sampled cube survived
    double fraction = 0;         // surviving fraction in this sample
};

std::vector<ContentRow> content_table(const DimensionPlan& plan, std::int64_t samples,
                                      std::uint64_t seed);

}  // namespace qsmetric

#endif
