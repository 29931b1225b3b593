#ifndef QSMETRIC_STOCHASTIC_HPP
#define QSMETRIC_STOCHASTIC_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qsmetric/params.hpp"

namespace qsmetric {

// Law of the per-digit weight multiplier when a cell is drawn uniformly from
// the M^n subdivision of a cube: ring, buffer and interior zones.
struct MultiplierLaw {
    Rational p1, p2, p3;  // zone probabilities, sum to one
    Rational v1, v2, v3;  // multipliers 1, M-2n+1, 1/L
};

MultiplierLaw multiplier_law(const Params& params);

// Birth-death law of the capped exponent gap: +1 with probability p (ring or
// buffer digit), -1 with probability q (interior digit).
struct WalkLaw {
    Rational p, q;
};

WalkLaw walk_law(const Params& params);

// Geometric mean mu = (M-2n+1)^{p2} L^{-p3} of the multiplier law.
struct GeometricMean {
    double value = 0;
    double log_value = 0;      // natural log
    std::string digits;        // 40 significant decimal digits
    std::string log_digits;    // 40 significant digits of ln mu
};

GeometricMean geometric_mean(const Params& params);

// Variance of ln X under the multiplier law.
double log_multiplier_variance(const Params& params);

// Strong-law experiment: per point, the mean log-multiplier of `steps`
// independent digits; the grand mean is compared against ln mu.
struct LlnBatch {
    std::int64_t index = 0;
    double sum_log = 0;       // sum of per-point mean log-multipliers
    std::int64_t count = 0;
};

struct LlnStats {
    std::int64_t points = 0;
    std::int64_t steps = 0;
    std::uint64_t seed = 0;
    double mean = 0;          // grand mean of per-point values
    double stddev = 0;        // sample standard deviation of those values
    double log_mu = 0;
    double deviation = 0;     // |mean - ln mu|
    double limit = 0;         // 3 stddev / sqrt(points)
    bool pass = false;
    std::vector<LlnBatch> batches;  // fixed batches of 1024 points
};

LlnStats simulate_lln(const Params& params, std::int64_t points, std::int64_t steps,
                      std::uint64_t seed);

// Reflected-at-nothing walk of the exponent gap started from zero; a walk
// "hits" when it first reaches +1 (the capping event). Walks always run the
// full horizon so the terminal drift is unbiased.
struct WalkReport {
    WalkLaw law;
    std::string status;              // "transient" or "recurrent/critical: r = 1"
    std::optional<Rational> r;       // hitting probability, only when q > 1/2
    std::optional<Rational> escape;  // 1 - r, the never-capped fraction
    std::int64_t walks = 0;
    std::int64_t horizon = 0;
    std::uint64_t seed = 0;
    std::int64_t hits = 0;
    double hit_fraction = 0;
    double hit_se = 0;               // binomial standard error at hit_fraction
    double mean_hit_time = 0;        // among hitting walks, NaN when none hit
    double drift = 0;                // mean terminal value / horizon
    double drift_expected = 0;       // p - q
    bool pass = false;               // transient: |hit_fraction - r| <= 3 SE
    std::string note;                // finite-horizon bias remark
};

WalkReport walk_analysis(const Params& params, std::int64_t walks, std::int64_t horizon,
                         std::uint64_t seed);

// Pass test for uncapped k-digit products against the cut ((1+2^-m) mu)^k,
// in logs with an exact rational tie-break.
class SurvivalCut {
  public:
    SurvivalCut(const Params& params, int m);
    bool passes(std::int64_t a, std::int64_t b, std::int64_t k) const;
    int m() const { return m_; }

  private:
    Params params_;
    int m_;
    double log_mult_ = 0;
    double log_l_ = 0;
    double log_per_digit_ = 0;  // log((1+2^-m) mu)
};

// Digit-count selection: smallest k from {m, 2m, 4m, ...} whose sampled
// fraction of k-digit products with w <= ((1+2^-m) mu)^k clears 1 - 2^-m at
// 95% confidence (Wilson lower bound). Products are uncapped.
struct KmProbe {
    std::int64_t k = 0;
    std::int64_t passed = 0;
    double fraction = 0;
    double wilson_lower = 0;
    bool pass = false;
};

struct KmResult {
    int m = 0;
    double threshold = 0;  // 1 - 2^-m
    std::int64_t samples = 0;
    std::uint64_t seed = 0;
    int scan_doublings = 0;
    std::vector<KmProbe> probes;
    std::int64_t k = 0;    // selected count; best probe when not found
    bool found = false;
};

KmResult select_km(const Params& params, int m, std::int64_t samples, std::uint64_t seed,
                   int scan_doublings = 12);

}  // namespace qsmetric

#endif
