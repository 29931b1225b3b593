#include "qsmetric/constants.hpp"

#include <cmath>

namespace qsmetric {

Constants constants(const Params& params) {
    Constants c;
    const int n = params.n, M = params.M;
    c.R = params.R();
    // 1 - (M-2n+1)/M = (2n-1)/M
    c.C1 = Rational(2 * n * M * params.multiplier()) * c.R * M / (2 * n - 1);
    const std::int64_t e = 2 * std::int64_t(n) * M + 2;
    c.C2 = (rational_pow(c.R, e) - 1) / (c.R - 1);
    c.log_C1 = log_rational(c.C1);
    c.log_C2 = log_rational(c.C2);
    c.log10_C2 = c.log_C2 / std::log(10.0);
    c.log_R = log_rational(c.R);
    return c;
}

double EtaCurve::log_eta(double t) const {
    if (!(t > 0)) throw domain_error("eta: t must be positive");
    const double u = 2.0 * n * M * t;
    if (t <= t_star) {
        const double e = std::max(0.0, -std::log(u) / std::log(double(M)));
        return log_amplitude + e * std::log(theta);
    }
    return log_amplitude + 2.0 * std::log(u);
}

double EtaCurve::eta(double t) const { return std::exp(log_eta(t)); }

EtaCurve eta_curve(const Params& params) {
    const Constants c = constants(params);
    EtaCurve curve;
    curve.n = params.n;
    curve.M = params.M;
    curve.t_star = 1.0 / (2.0 * params.n * params.M);
    curve.theta = double(params.multiplier()) / params.M;
    curve.log_amplitude = std::log(4.0 * params.n * params.n * params.M * params.M) +
                          c.log_C1 + c.log_C2 + c.log_R;
    return curve;
}

double eta_bound(const Params& params, double t) { return eta_curve(params).eta(t); }

}  // namespace qsmetric
