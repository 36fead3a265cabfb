#include "fitsim/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fitsim {

PValue PValue::clamped(double p) {
    if (std::isnan(p)) throw DomainError("p-value is NaN");
    return PValue{std::clamp(p, 1e-300, 1.0)};
}

double ln_gamma(double x) {
    if (!(x > 0.0)) throw DomainError("ln_gamma requires x > 0");
    // Lanczos with g = 607/128, 15 terms (Godfrey coefficients).
    static constexpr double kG = 607.0 / 128.0;
    static constexpr double kCoef[15] = {
        0.99999999999999709182,     57.156235665862923517,   -59.597960355475491248,
        14.136097974741747174,      -0.49191381609762019978, 0.33994649984811888699e-4,
        0.46523628927048575665e-4,  -0.98374475304879564677e-4, 0.15808870322491248884e-3,
        -0.21026444172410488319e-3, 0.21743961811521264320e-3,  -0.16431810653676389022e-3,
        0.84418223983852743293e-4,  -0.26190838401581408670e-4, 0.36899182659531622704e-5,
    };
    if (x < 0.5) {
        // Reflection keeps the Lanczos sum in its accurate range.
        return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - ln_gamma(1.0 - x);
    }
    double sum = kCoef[0];
    for (int i = 1; i < 15; ++i) sum += kCoef[i] / (x - 1.0 + i);
    const double t = x + kG - 0.5;
    constexpr double half_log_two_pi = 0.91893853320467274178;  // ln(2*pi)/2
    return half_log_two_pi + (x - 0.5) * std::log(t) - t + std::log(sum);
}

namespace {

// Continued fraction for the incomplete beta (Lentz's method).
double beta_cont_frac(double a, double b, double x) {
    constexpr double kTiny = 1e-300;
    constexpr double kEps = 1e-16;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw DomainError("incomplete beta continued fraction did not converge");
}

}  // namespace

double reg_inc_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("reg_inc_beta requires a,b > 0");
    if (std::isnan(x) || x < 0.0 || x > 1.0) {
        throw DomainError("reg_inc_beta requires x in [0,1]");
    }
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_cont_frac(a, b, x) / a;
    }
    return 1.0 - front * beta_cont_frac(b, a, 1.0 - x) / b;
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0);
}

double normal_quantile(double p) {
    if (!(p > 0.0) || !(p < 1.0)) throw DomainError("normal_quantile requires p in (0,1)");
    // Acklam's rational approximation, then one Halley refinement against
    // the erfc-based CDF.
    static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
    x = x - u / (1.0 + x * u / 2.0);
    return x;
}

PValue t_two_sided_p(double t, double df) {
    if (!std::isfinite(t)) throw DomainError("t statistic must be finite");
    if (!(df >= 1.0)) throw DomainError("t test requires df >= 1");
    const double x = df / (df + t * t);
    return PValue::clamped(reg_inc_beta(df / 2.0, 0.5, x));
}

ShapiroWilkResult shapiro_wilk(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n < 3 || n > 5000) throw DomainError("shapiro_wilk supports n in [3,5000]");

    std::vector<double> x(xs.begin(), xs.end());
    std::sort(x.begin(), x.end());
    if (x.front() == x.back()) {
        throw DegenerateSample("all sample values identical");
    }

    // Expected normal order statistics via Blom's approximation, then
    // Royston's polynomial-corrected weights.
    const double nd = static_cast<double>(n);
    std::vector<double> m(n);
    double ssumm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = normal_quantile((static_cast<double>(i + 1) - 0.375) / (nd + 0.25));
        ssumm2 += m[i] * m[i];
    }

    std::vector<double> a(n);
    if (n == 3) {
        a[0] = -std::numbers::sqrt2 / 2.0;
        a[1] = 0.0;
        a[2] = -a[0];
    } else {
        const double rsn = 1.0 / std::sqrt(nd);
        auto poly_c1 = [&](double cn) {
            return -2.706056 * std::pow(rsn, 5) + 4.434685 * std::pow(rsn, 4) -
                   2.071190 * std::pow(rsn, 3) - 0.147981 * rsn * rsn + 0.221157 * rsn + cn;
        };
        auto poly_c2 = [&](double cn) {
            return -3.582633 * std::pow(rsn, 5) + 5.682633 * std::pow(rsn, 4) -
                   1.752461 * std::pow(rsn, 3) - 0.293762 * rsn * rsn + 0.042981 * rsn + cn;
        };
        const double norm = std::sqrt(ssumm2);
        const double an = poly_c1(m[n - 1] / norm);
        double phi;
        if (n > 5) {
            const double an1 = poly_c2(m[n - 2] / norm);
            phi = (ssumm2 - 2.0 * m[n - 1] * m[n - 1] - 2.0 * m[n - 2] * m[n - 2]) /
                  (1.0 - 2.0 * an * an - 2.0 * an1 * an1);
            a[n - 1] = an;
            a[n - 2] = an1;
            a[0] = -an;
            a[1] = -an1;
            for (std::size_t i = 2; i < n - 2; ++i) a[i] = m[i] / std::sqrt(phi);
        } else {
            phi = (ssumm2 - 2.0 * m[n - 1] * m[n - 1]) / (1.0 - 2.0 * an * an);
            a[n - 1] = an;
            a[0] = -an;
            for (std::size_t i = 1; i < n - 1; ++i) a[i] = m[i] / std::sqrt(phi);
        }
    }

    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= nd;
    double numer = 0.0;
    double denom = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        numer += a[i] * x[i];
        denom += (x[i] - mean) * (x[i] - mean);
    }
    double w = numer * numer / denom;
    w = std::min(w, 1.0);

    double p;
    if (n == 3) {
        constexpr double pi6 = 6.0 / std::numbers::pi;
        constexpr double stqr = 1.047197551196598;  // asin(sqrt(3/4))
        p = pi6 * (std::asin(std::sqrt(w)) - stqr);
        p = std::clamp(p, 0.0, 1.0);
    } else {
        const double one_minus_w = std::max(1.0 - w, 1e-15);
        double mu, sigma, z;
        if (n <= 11) {
            const double g = -2.273 + 0.459 * nd;
            mu = 0.5440 - 0.39978 * nd + 0.025054 * nd * nd - 0.0006714 * nd * nd * nd;
            sigma = std::exp(1.3822 - 0.77857 * nd + 0.062767 * nd * nd -
                             0.0020322 * nd * nd * nd);
            z = (-std::log(g - std::log(one_minus_w)) - mu) / sigma;
        } else {
            const double ln_n = std::log(nd);
            mu = -1.5861 - 0.31082 * ln_n - 0.083751 * ln_n * ln_n +
                 0.0038915 * ln_n * ln_n * ln_n;
            sigma = std::exp(-0.4803 - 0.082676 * ln_n + 0.0030302 * ln_n * ln_n);
            z = (std::log(one_minus_w) - mu) / sigma;
        }
        p = 1.0 - normal_cdf(z);
    }
    return ShapiroWilkResult{w, PValue::clamped(p)};
}

}  // namespace fitsim
