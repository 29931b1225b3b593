#ifndef QSMETRIC_PARAMS_HPP
#define QSMETRIC_PARAMS_HPP

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <optional>

#include "qsmetric/errors.hpp"

namespace qsmetric {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using Float50 = boost::multiprecision::cpp_bin_float_50;

BigInt ipow(const BigInt& base, std::uint64_t exp);
Rational rational_pow(const Rational& base, std::int64_t exp);
double to_double(const Rational& r);
Float50 to_float50(const Rational& r);
double log_rational(const Rational& r);  // natural log, via 50-digit floats

// Construction parameters: dimension n >= 2, subdivision arity M > 2n,
// attenuation L > 1 (rational; optionally L = M^beta), capped variant flag.
struct Params {
    int n;
    int M;
    Rational L;
    bool capped = false;
    std::optional<Rational> beta;  // recorded when L was derived from M^beta

    Params(int n_, int M_, Rational L_, bool capped_ = false);
    static Params from_beta(int n_, int M_, const Rational& beta_, bool capped_ = false);

    // Weight multiplier of the buffer zone.
    int multiplier() const { return M - 2 * n + 1; }
    // R = L(M-2n+1), always recomputed.
    Rational R() const { return L * multiplier(); }
    std::int64_t cells_per_cube() const;  // M^n
    double log_multiplier() const;
    double log_L() const;
};

bool operator==(const Params& a, const Params& b);

}  // namespace qsmetric

#endif
