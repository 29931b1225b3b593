#ifndef QSMETRIC_CONSTANTS_HPP
#define QSMETRIC_CONSTANTS_HPP

#include <string>

#include "qsmetric/params.hpp"

namespace qsmetric {

// Comparison constants of the two-sided metric estimates.
struct Constants {
    Rational R;
    Rational C1;  // 2nM(M-2n+1)R / (1-(M-2n+1)/M)
    Rational C2;  // (R^(2nM+2)-1)/(R-1), exact; use the log fields at scale
    double log_C1 = 0;
    double log_C2 = 0;
    double log10_C2 = 0;
    double log_R = 0;
};

Constants constants(const Params& params);

// Distortion envelope eta(t): amplitude 4 n^2 M^2 C1 C2 R, decay branch
// theta^max(0, -log(2nMt)/log M) below t* = 1/(2nM), growth branch (2nMt)^2
// above; the branches agree at t*.
struct EtaCurve {
    int n = 0;
    int M = 0;
    double t_star = 0;
    double theta = 0;          // (M-2n+1)/M
    double log_amplitude = 0;  // natural log of 4 n^2 M^2 C1 C2 R

    double log_eta(double t) const;
    double eta(double t) const;
};

EtaCurve eta_curve(const Params& params);
double eta_bound(const Params& params, double t);

}  // namespace qsmetric

#endif
