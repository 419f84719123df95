#include "excast/bayes.hpp"

#include <cmath>
#include <stdexcept>

namespace excast {

namespace {

// Continued-fraction evaluation of the incomplete beta (Lentz's method).
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kFpMin = 1e-300;

    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (x < 0.0 || x > 1.0) throw std::invalid_argument("incomplete_beta requires x in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double x, double df) {
    if (df <= 0.0) throw std::invalid_argument("degrees of freedom must be positive");
    if (x == 0.0) return 0.5;
    const double half = 0.5 * incomplete_beta(0.5 * df, 0.5, df / (df + x * x));
    return x > 0.0 ? 1.0 - half : half;
}

BayesComparison bayes_correlated_ttest(const std::vector<double>& diffs, double rho,
                                       double rope_halfwidth) {
    const std::size_t n = diffs.size();
    if (n < 2) throw std::invalid_argument("correlated t-test needs at least 2 differences");
    if (rho < 0.0 || rho >= 1.0) throw std::invalid_argument("rho must lie in [0, 1)");
    if (rope_halfwidth < 0.0) throw std::invalid_argument("rope halfwidth must be nonnegative");

    double mean = 0.0;
    for (double d : diffs) mean += d;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double d : diffs) var += (d - mean) * (d - mean);
    var /= static_cast<double>(n - 1);

    BayesComparison out;
    out.rope_halfwidth = rope_halfwidth;
    const double scale =
        std::sqrt((1.0 / static_cast<double>(n) + rho / (1.0 - rho)) * var);
    if (scale == 0.0) {
        // Point posterior at the mean.
        if (mean < -rope_halfwidth)
            out.p_left = 1.0;
        else if (mean > rope_halfwidth)
            out.p_right = 1.0;
        else
            out.p_rope = 1.0;
        return out;
    }
    const double df = static_cast<double>(n - 1);
    const double f_lo = student_t_cdf((-rope_halfwidth - mean) / scale, df);
    const double f_hi = student_t_cdf((rope_halfwidth - mean) / scale, df);
    out.p_left = f_lo;
    out.p_rope = f_hi - f_lo;
    out.p_right = 1.0 - f_hi;
    return out;
}

}  // namespace excast
