#include "qsmetric/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "qsmetric/cubes.hpp"
#include "qsmetric/errors.hpp"
#include "qsmetric/parallel.hpp"
#include "qsmetric/rng.hpp"

namespace qsmetric {

namespace {

constexpr double kWilsonZ = 1.959963984540054;  // two-sided 95%

double wilson_lower(double fraction, std::int64_t samples) {
    const double z = kWilsonZ;
    const double n = static_cast<double>(samples);
    const double den = 1.0 + z * z / n;
    return (fraction + z * z / (2.0 * n) -
            z * std::sqrt(fraction * (1.0 - fraction) / n + z * z / (4.0 * n * n))) /
           den;
}

std::uint64_t rational_uint(const Rational& r) {
    return boost::multiprecision::numerator(r).convert_to<std::uint64_t>();
}

}  // namespace

MultiplierLaw multiplier_law(const Params& params) {
    const ZoneCounts zc = zone_counts(params);
    const Rational cells(params.cells_per_cube());
    MultiplierLaw law;
    law.p1 = Rational(zc.c1) / cells;
    law.p2 = Rational(zc.c2) / cells;
    law.p3 = Rational(zc.c3) / cells;
    law.v1 = 1;
    law.v2 = params.multiplier();
    law.v3 = Rational(1) / params.L;
    return law;
}

WalkLaw walk_law(const Params& params) {
    const ZoneCounts zc = zone_counts(params);
    const Rational cells(params.cells_per_cube());
    return {Rational(zc.c1 + zc.c2) / cells, Rational(zc.c3) / cells};
}

GeometricMean geometric_mean(const Params& params) {
    const ZoneCounts zc = zone_counts(params);
    const Float50 cells(params.cells_per_cube());
    const Float50 log_mult = log(Float50(params.multiplier()));
    const Float50 log_l = log(to_float50(params.L));
    const Float50 log_mu = (Float50(zc.c2) * log_mult - Float50(zc.c3) * log_l) / cells;
    const Float50 mu = exp(log_mu);
    GeometricMean out;
    out.value = mu.convert_to<double>();
    out.log_value = log_mu.convert_to<double>();
    out.digits = mu.str(40);
    out.log_digits = log_mu.str(40);
    return out;
}

double log_multiplier_variance(const Params& params) {
    const ZoneCounts zc = zone_counts(params);
    const Float50 cells(params.cells_per_cube());
    const Float50 p2 = Float50(zc.c2) / cells;
    const Float50 p3 = Float50(zc.c3) / cells;
    const Float50 log_mult = log(Float50(params.multiplier()));
    const Float50 log_l = log(to_float50(params.L));
    const Float50 mean = p2 * log_mult - p3 * log_l;
    const Float50 second = p2 * log_mult * log_mult + p3 * log_l * log_l;
    return (second - mean * mean).convert_to<double>();
}

LlnStats simulate_lln(const Params& params, std::int64_t points, std::int64_t steps,
                      std::uint64_t seed) {
    if (points <= 0) throw domain_error("simulate_lln: points must be positive");
    if (steps <= 0) throw domain_error("simulate_lln: steps must be positive");

    const ZoneCounts zc = zone_counts(params);
    const auto cells = static_cast<std::uint64_t>(params.cells_per_cube());
    const auto t1 = static_cast<std::uint64_t>(zc.c1);
    const auto t2 = static_cast<std::uint64_t>(zc.c1 + zc.c2);
    const double log_mult = params.log_multiplier();
    const double log_l = params.log_L();
    const std::uint64_t base = stream_seed(seed, StreamPurpose::lln);

    std::vector<double> vals(static_cast<std::size_t>(points));
    parallel_for(points, [&](std::int64_t i) {
        Rng rng(item_seed(base, static_cast<std::uint64_t>(i)));
        std::int64_t a = 0, b = 0;
        for (std::int64_t j = 0; j < steps; ++j) {
            const std::uint64_t v = rng.below(cells);
            if (v >= t2) {
                ++b;
            } else if (v >= t1) {
                ++a;
            }
        }
        vals[static_cast<std::size_t>(i)] =
            (static_cast<double>(a) * log_mult - static_cast<double>(b) * log_l) /
            static_cast<double>(steps);
    });

    LlnStats stats;
    stats.points = points;
    stats.steps = steps;
    stats.seed = seed;

    constexpr std::int64_t kBatch = 1024;
    double total = 0.0;
    for (std::int64_t lo = 0, index = 0; lo < points; lo += kBatch, ++index) {
        const std::int64_t hi = std::min(points, lo + kBatch);
        double sum = 0.0;
        for (std::int64_t i = lo; i < hi; ++i) sum += vals[static_cast<std::size_t>(i)];
        stats.batches.push_back({index, sum, hi - lo});
        total += sum;
    }
    stats.mean = total / static_cast<double>(points);

    double s2 = 0.0;
    for (const double v : vals) s2 += (v - stats.mean) * (v - stats.mean);
    stats.stddev = points > 1 ? std::sqrt(s2 / static_cast<double>(points - 1)) : 0.0;

    stats.log_mu = geometric_mean(params).log_value;
    stats.deviation = std::fabs(stats.mean - stats.log_mu);
    stats.limit = 3.0 * stats.stddev / std::sqrt(static_cast<double>(points));
    stats.pass = stats.deviation <= stats.limit;
    return stats;
}

WalkReport walk_analysis(const Params& params, std::int64_t walks, std::int64_t horizon,
                         std::uint64_t seed) {
    if (walks <= 0) throw domain_error("walk_analysis: walks must be positive");
    if (horizon <= 0) throw domain_error("walk_analysis: horizon must be positive");

    WalkReport report;
    report.law = walk_law(params);
    report.walks = walks;
    report.horizon = horizon;
    report.seed = seed;

    const Rational& p = report.law.p;
    const Rational& q = report.law.q;
    const bool transient = q > Rational(1, 2);
    if (transient) {
        report.status = "transient";
        report.r = p / q;
        report.escape = 1 - p / q;
    } else {
        report.status = "recurrent/critical: r = 1";
    }
    report.drift_expected = to_double(p - q);

    // cpp_rational is always canonical, so this is the reduced fraction.
    const std::uint64_t num = rational_uint(p);
    const std::uint64_t pden = boost::multiprecision::denominator(p).convert_to<std::uint64_t>();

    std::vector<std::int32_t> terminal(static_cast<std::size_t>(walks));
    std::vector<std::int32_t> hit_time(static_cast<std::size_t>(walks));
    const std::uint64_t base = stream_seed(seed, StreamPurpose::walk);
    parallel_for(walks, [&](std::int64_t i) {
        Rng rng(item_seed(base, static_cast<std::uint64_t>(i)));
        std::int32_t y = 0;
        std::int32_t ht = -1;
        for (std::int64_t j = 0; j < horizon; ++j) {
            y += rng.bernoulli(num, pden) ? 1 : -1;
            if (ht < 0 && y == 1) ht = static_cast<std::int32_t>(j + 1);
        }
        terminal[static_cast<std::size_t>(i)] = y;
        hit_time[static_cast<std::size_t>(i)] = ht;
    });

    std::int64_t hits = 0;
    std::int64_t terminal_sum = 0;
    double hit_time_sum = 0.0;
    for (std::int64_t i = 0; i < walks; ++i) {
        terminal_sum += terminal[static_cast<std::size_t>(i)];
        const std::int32_t ht = hit_time[static_cast<std::size_t>(i)];
        if (ht >= 0) {
            ++hits;
            hit_time_sum += static_cast<double>(ht);
        }
    }

    report.hits = hits;
    report.hit_fraction = static_cast<double>(hits) / static_cast<double>(walks);
    report.hit_se = std::sqrt(report.hit_fraction * (1.0 - report.hit_fraction) /
                              static_cast<double>(walks));
    report.mean_hit_time = hits > 0 ? hit_time_sum / static_cast<double>(hits)
                                    : std::numeric_limits<double>::quiet_NaN();
    report.drift = static_cast<double>(terminal_sum) /
                   (static_cast<double>(walks) * static_cast<double>(horizon));

    if (transient) {
        const double diff = report.hit_fraction - to_double(*report.r);
        report.pass = std::fabs(diff) <= 3.0 * report.hit_se;
    } else {
        report.pass = true;
    }

    const double four_pq = 4.0 * to_double(p) * to_double(q);
    char note[160];
    if (four_pq < 1.0) {
        const double tail = std::exp(0.5 * static_cast<double>(horizon) * std::log(four_pq));
        std::snprintf(note, sizeof(note),
                      "finite horizon only misses late first hits, so the hit fraction "
                      "estimates the hitting probability from below; residual tail mass "
                      "~%.1e",
                      tail);
    } else {
        std::snprintf(note, sizeof(note),
                      "critical walk: finite-horizon hit fraction is biased low by "
                      "O(horizon^-1/2)");
    }
    report.note = note;
    return report;
}

namespace {

// Exact tie-break for the pass test, raising both sides to the M^n-th power
// so all exponents are integers.
bool cut_pass_exact(const Params& params, std::int64_t a, std::int64_t b, int m,
                    std::int64_t k) {
    const ZoneCounts zc = zone_counts(params);
    const std::int64_t cells = params.cells_per_cube();
    const Rational one_plus(ipow(2, static_cast<std::uint64_t>(m)) + 1,
                            ipow(2, static_cast<std::uint64_t>(m)));
    const Rational lhs = rational_pow(Rational(params.multiplier()), a * cells) *
                         rational_pow(params.L, -b * cells);
    const Rational rhs = rational_pow(one_plus, k * cells) *
                         rational_pow(Rational(params.multiplier()), k * zc.c2) *
                         rational_pow(params.L, -k * zc.c3);
    return lhs <= rhs;
}

}  // namespace

SurvivalCut::SurvivalCut(const Params& params, int m) : params_(params), m_(m) {
    if (m < 1 || m > 40) throw domain_error("SurvivalCut: m must be in [1, 40]");
    log_mult_ = params.log_multiplier();
    log_l_ = params.log_L();
    log_per_digit_ = std::log1p(std::ldexp(1.0, -m)) + geometric_mean(params).log_value;
}

bool SurvivalCut::passes(std::int64_t a, std::int64_t b, std::int64_t k) const {
    const double lhs = static_cast<double>(a) * log_mult_ - static_cast<double>(b) * log_l_;
    const double rhs = static_cast<double>(k) * log_per_digit_;
    const double scale = std::max({std::fabs(lhs), std::fabs(rhs), 1.0});
    if (std::fabs(lhs - rhs) <= 1e-9 * scale) return cut_pass_exact(params_, a, b, m_, k);
    return lhs < rhs;
}

KmResult select_km(const Params& params, int m, std::int64_t samples, std::uint64_t seed,
                   int scan_doublings) {
    if (m < 1 || m > 40) throw domain_error("select_km: m must be in [1, 40]");
    if (samples <= 0) throw domain_error("select_km: samples must be positive");
    if (scan_doublings < 0 || scan_doublings > 24) {
        throw domain_error("select_km: scan_doublings must be in [0, 24]");
    }

    KmResult result;
    result.m = m;
    result.threshold = 1.0 - std::ldexp(1.0, -m);
    result.samples = samples;
    result.seed = seed;
    result.scan_doublings = scan_doublings;

    const ZoneCounts zc = zone_counts(params);
    const auto cells = static_cast<std::uint64_t>(params.cells_per_cube());
    const auto t1 = static_cast<std::uint64_t>(zc.c1);
    const auto t2 = static_cast<std::uint64_t>(zc.c1 + zc.c2);
    const SurvivalCut cut(params, m);
    const std::uint64_t base = stream_seed(seed, StreamPurpose::km);

    std::vector<std::uint8_t> passed(static_cast<std::size_t>(samples));
    for (int doubling = 0; doubling <= scan_doublings; ++doubling) {
        const std::int64_t k = static_cast<std::int64_t>(m) << doubling;
        parallel_for(samples, [&](std::int64_t i) {
            Rng rng(item_seed(base, static_cast<std::uint64_t>(i)));
            std::int64_t a = 0, b = 0;
            for (std::int64_t j = 0; j < k; ++j) {
                const std::uint64_t v = rng.below(cells);
                if (v >= t2) {
                    ++b;
                } else if (v >= t1) {
                    ++a;
                }
            }
            passed[static_cast<std::size_t>(i)] = cut.passes(a, b, k) ? 1 : 0;
        });

        KmProbe probe;
        probe.k = k;
        probe.passed = 0;
        for (const std::uint8_t f : passed) probe.passed += f;
        probe.fraction = static_cast<double>(probe.passed) / static_cast<double>(samples);
        probe.wilson_lower = wilson_lower(probe.fraction, samples);
        probe.pass = probe.wilson_lower >= result.threshold;
        result.probes.push_back(probe);
        if (probe.pass) {
            result.k = k;
            result.found = true;
            return result;
        }
    }

    const auto best = std::max_element(
        result.probes.begin(), result.probes.end(),
        [](const KmProbe& x, const KmProbe& y) { return x.wilson_lower < y.wilson_lower; });
    result.k = best->k;
    result.found = false;
    return result;
}

}  // namespace qsmetric
