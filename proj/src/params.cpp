#include "qsmetric/params.hpp"

#include <cmath>

namespace qsmetric {

BigInt ipow(const BigInt& base, std::uint64_t exp) {
    BigInt out = 1, b = base;
    while (exp) {
        if (exp & 1) out *= b;
        exp >>= 1;
        if (exp) b *= b;
    }
    return out;
}

Rational rational_pow(const Rational& base, std::int64_t exp) {
    if (exp == 0) return Rational(1);
    if (base == 0) {
        if (exp < 0) throw domain_error("rational_pow: zero base, negative exponent");
        return Rational(0);
    }
    const auto e = static_cast<std::uint64_t>(exp < 0 ? -exp : exp);
    BigInt num = ipow(numerator(base), e);
    BigInt den = ipow(denominator(base), e);
    if (exp < 0) num.swap(den);
    return Rational(num, den);
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Float50 to_float50(const Rational& r) {
    return Float50(numerator(r)) / Float50(denominator(r));
}

double log_rational(const Rational& r) {
    if (r <= 0) throw domain_error("log_rational: nonpositive argument");
    const Float50 v = log(Float50(numerator(r))) - log(Float50(denominator(r)));
    return v.convert_to<double>();
}

namespace {

// Largest integer r with r^q <= v, by bisection.
BigInt floor_root(const BigInt& v, std::uint64_t q) {
    if (v <= 1 || q == 1) return v;
    BigInt lo = 1, hi = 1;
    while (ipow(hi, q) <= v) hi <<= 1;
    while (hi - lo > 1) {
        BigInt mid = (lo + hi) >> 1;
        if (ipow(mid, q) <= v)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

std::optional<BigInt> exact_root(const BigInt& v, std::uint64_t q) {
    BigInt r = floor_root(v, q);
    if (ipow(r, q) == v) return r;
    return std::nullopt;
}

}  // namespace

Params::Params(int n_, int M_, Rational L_, bool capped_)
    : n(n_), M(M_), L(std::move(L_)), capped(capped_) {
    if (n < 2) throw domain_error("Params: n must be >= 2");
    if (M <= 2 * n) throw domain_error("Params: M must exceed 2n");
    if (L <= 1) throw domain_error("Params: L must exceed 1");
    if (capped && L < M) throw domain_error("Params: capped variant requires L >= M");
}

Params Params::from_beta(int n_, int M_, const Rational& beta_, bool capped_) {
    if (beta_ <= 0) throw domain_error("Params: beta must be positive");
    const BigInt p = numerator(beta_);
    const BigInt q = denominator(beta_);
    if (p > 64 || q > 64) throw domain_error("Params: beta out of supported range");
    const BigInt mp = ipow(BigInt(M_), p.convert_to<std::uint64_t>());
    const auto root = exact_root(mp, q.convert_to<std::uint64_t>());
    if (!root) throw domain_error("Params: M^beta is irrational for the given beta");
    Params out(n_, M_, Rational(*root), capped_);
    out.beta = beta_;
    return out;
}

std::int64_t Params::cells_per_cube() const {
    std::int64_t out = 1;
    for (int i = 0; i < n; ++i) out *= M;
    return out;
}

double Params::log_multiplier() const { return std::log(static_cast<double>(multiplier())); }

double Params::log_L() const { return log_rational(L); }

bool operator==(const Params& a, const Params& b) {
    return a.n == b.n && a.M == b.M && a.L == b.L && a.capped == b.capped;
}

}  // namespace qsmetric
