#pragma once

#include <span>
#include <vector>

#include "fitsim/errors.hpp"

namespace fitsim {

// A probability clamped into [1e-300, 1] so downstream logs stay finite.
struct PValue {
    double value = 1.0;

    static PValue clamped(double p);
    explicit operator double() const { return value; }
};

// ln Gamma(x) for x > 0, accurate to ~1e-14 relative (Lanczos).
double ln_gamma(double x);

// Regularized incomplete beta I_x(a,b) by continued fraction, switching to
// the symmetric tail at x > (a+1)/(a+b+2). Absolute error <= ~1e-13.
double reg_inc_beta(double a, double b, double x);

// Standard normal CDF.
double normal_cdf(double x);

// Inverse standard normal CDF for p in (0,1), |error| <= 1e-9.
double normal_quantile(double p);

// Two-sided p of a t statistic with df degrees of freedom,
// p = I_{df/(df+t^2)}(df/2, 1/2). Even in t, monotone decreasing in |t|.
PValue t_two_sided_p(double t, double df);

struct ShapiroWilkResult {
    double w = 0.0;
    PValue p;
};

// Shapiro-Wilk normality test for 3 <= n <= 5000 samples, following
// Royston's 1995 approximation (normal-quantile weights, log-normal /
// normal null transforms of 1-W). Throws DegenerateSample when all values
// are identical.
ShapiroWilkResult shapiro_wilk(std::span<const double> xs);

}  // namespace fitsim
