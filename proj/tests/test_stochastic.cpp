#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "qsmetric/stochastic.hpp"

using namespace qsmetric;

namespace {

Float50 parse50(const char* s) { return Float50(s); }

bool close50(const Float50& a, const char* expected, double rel = 1e-20) {
    const Float50 e = parse50(expected);
    return abs(a - e) <= abs(e) * Float50(rel);
}

}  // namespace

TEST_SUITE("stochastic") {

TEST_CASE("multiplier law matches zone counts") {
    const Params p(2, 8, 8);
    const MultiplierLaw law = multiplier_law(p);
    CHECK(law.p1 == Rational(7, 16));
    CHECK(law.p2 == Rational(5, 16));
    CHECK(law.p3 == Rational(1, 4));
    CHECK(law.p1 + law.p2 + law.p3 == 1);
    CHECK(law.v1 == 1);
    CHECK(law.v2 == 5);
    CHECK(law.v3 == Rational(1, 8));

    const MultiplierLaw big = multiplier_law(Params::from_beta(2, 16, 3));
    CHECK(big.p1 == Rational(60, 256));
    CHECK(big.p2 == Rational(52, 256));
    CHECK(big.p3 == Rational(144, 256));
    CHECK(big.v2 == 13);
    CHECK(big.v3 == Rational(1, 4096));
}

TEST_CASE("walk law and hitting probability") {
    const WalkLaw a = walk_law(Params(2, 8, 8));
    CHECK(a.p == Rational(3, 4));
    CHECK(a.q == Rational(1, 4));
    CHECK(a.p + a.q == 1);

    const WalkLaw b = walk_law(Params::from_beta(2, 16, 3));
    CHECK(b.p == Rational(7, 16));
    CHECK(b.q == Rational(9, 16));

    // r = p/q solves r = p + q r^2; the other root is 1.
    const Rational r = b.p / b.q;
    CHECK(r == Rational(7, 9));
    CHECK(r == b.p + b.q * r * r);
    CHECK(Rational(1) == b.p + b.q * 1);
}

TEST_CASE("geometric mean to forty digits") {
    const GeometricMean small = geometric_mean(Params(2, 8, 8));
    CHECK(close50(parse50(small.digits.c_str()),
                  "0.9832311511659941636443676029383034931139"));
    CHECK(close50(parse50(small.log_digits.c_str()),
                  "-0.01691103778430261500018679946044878870487"));
    CHECK(small.value == doctest::Approx(0.98323115116599416).epsilon(1e-15));
    CHECK(small.log_value == doctest::Approx(-0.016911037784302615).epsilon(1e-14));

    const GeometricMean plan = geometric_mean(Params::from_beta(2, 16, 3));
    CHECK(close50(parse50(plan.digits.c_str()),
                  "0.01564290013317370701087641088635931351077"));
    CHECK(close50(parse50(plan.log_digits.c_str()),
                  "-4.157738130545256189055452183274736492909"));
}

TEST_CASE("log multiplier variance") {
    CHECK(log_multiplier_variance(Params(2, 8, 8)) ==
          doctest::Approx(1.89019904623583451517).epsilon(1e-15));
    CHECK(log_multiplier_variance(Params::from_beta(2, 16, 3)) ==
          doctest::Approx(22.9662600727226434779).epsilon(1e-15));
}

TEST_CASE("strong law simulation") {
    const LlnStats stats = simulate_lln(Params(2, 8, 8), 100000, 1000, 1);
    CHECK(stats.mean == doctest::Approx(-0.017016670).epsilon(1e-6));
    CHECK(stats.stddev == doctest::Approx(0.043714).epsilon(1e-4));
    CHECK(stats.deviation <= stats.limit);
    CHECK(stats.pass);

    REQUIRE(stats.batches.size() == 98);
    CHECK(stats.batches.front().count == 1024);
    CHECK(stats.batches.back().count == 672);
    std::int64_t total = 0;
    double sum = 0;
    for (const auto& b : stats.batches) {
        total += b.count;
        sum += b.sum_log;
    }
    CHECK(total == 100000);
    CHECK(sum / 100000 == doctest::Approx(stats.mean).epsilon(1e-15));

    CHECK_THROWS_AS(simulate_lln(Params(2, 8, 8), 0, 10, 1), domain_error);
    CHECK_THROWS_AS(simulate_lln(Params(2, 8, 8), 10, 0, 1), domain_error);
}

TEST_CASE("strong law is thread-count independent") {
    setenv("QSMETRIC_THREADS", "1", 1);
    const LlnStats one = simulate_lln(Params(2, 8, 8), 5000, 64, 7);
    setenv("QSMETRIC_THREADS", "3", 1);
    const LlnStats three = simulate_lln(Params(2, 8, 8), 5000, 64, 7);
    unsetenv("QSMETRIC_THREADS");
    CHECK(one.mean == three.mean);
    CHECK(one.stddev == three.stddev);
    REQUIRE(one.batches.size() == three.batches.size());
    for (std::size_t i = 0; i < one.batches.size(); ++i) {
        CHECK(one.batches[i].sum_log == three.batches[i].sum_log);
    }
}

TEST_CASE("transient walk") {
    const WalkReport report = walk_analysis(Params::from_beta(2, 16, 3), 100000, 10000, 1);
    CHECK(report.status == "transient");
    REQUIRE(report.r.has_value());
    CHECK(*report.r == Rational(7, 9));
    CHECK(*report.escape == Rational(2, 9));
    CHECK(report.hits == 77664);
    CHECK(report.hit_fraction == doctest::Approx(0.77664).epsilon(1e-12));
    CHECK(report.pass);
    CHECK(report.drift == doctest::Approx(-0.125).epsilon(2e-4));
    CHECK(report.drift_expected == doctest::Approx(-0.125).epsilon(1e-15));
    CHECK(report.mean_hit_time == doctest::Approx(7.88).epsilon(1e-2));
    CHECK(report.note.find("below") != std::string::npos);
}

TEST_CASE("recurrent walk regime") {
    const WalkReport report = walk_analysis(Params(2, 8, 8), 2000, 200, 1);
    CHECK(report.status == "recurrent/critical: r = 1");
    CHECK_FALSE(report.r.has_value());
    CHECK_FALSE(report.escape.has_value());
    CHECK(report.hit_fraction > 0.95);
    CHECK(report.pass);
    CHECK(report.drift_expected == doctest::Approx(0.5).epsilon(1e-15));

    CHECK_THROWS_AS(walk_analysis(Params(2, 8, 8), 0, 10, 1), domain_error);
}

TEST_CASE("digit count selection") {
    const Params plan = Params::from_beta(2, 16, 3);
    const KmResult one = select_km(plan, 1, 4000, 1);
    CHECK(one.found);
    CHECK(one.k == 1);
    CHECK(one.threshold == 0.5);
    REQUIRE(one.probes.size() == 1);
    CHECK(one.probes[0].passed == 2257);
    CHECK(one.probes[0].fraction == doctest::Approx(0.56425).epsilon(1e-12));
    CHECK(one.probes[0].wilson_lower == doctest::Approx(0.54883).epsilon(1e-4));

    const KmResult two = select_km(plan, 2, 4000, 1);
    CHECK(two.found);
    CHECK(two.k >= 2);
    CHECK(two.k % 2 == 0);
    // each probe doubles the digit count starting at m
    for (std::size_t i = 0; i < two.probes.size(); ++i) {
        CHECK(two.probes[i].k == (2LL << i));
    }

    CHECK_THROWS_AS(select_km(plan, 0, 100, 1), domain_error);
    CHECK_THROWS_AS(select_km(plan, 1, 0, 1), domain_error);
}

TEST_CASE("scan failure is reported") {
    // with one doubling the (2,16) plan cannot reach confidence at m=2
    const KmResult r = select_km(Params::from_beta(2, 16, 3), 2, 4000, 1, 1);
    CHECK_FALSE(r.found);
    CHECK(r.probes.size() == 2);
    CHECK((r.k == 2 || r.k == 4));
}

}  // TEST_SUITE
