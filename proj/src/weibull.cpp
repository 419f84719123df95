#include "excast/weibull.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace excast {

WeibullParams fit_weibull_mle(const std::vector<double>& values) {
    const std::size_t n = values.size();
    if (n < 10) throw std::invalid_argument("Weibull fit needs at least 10 values");
    for (double v : values)
        if (!(v > 0.0)) throw std::invalid_argument("Weibull fit requires strictly positive values");
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    if (*mn == *mx) throw std::runtime_error("Weibull fit cannot converge on all-equal values");

    std::vector<double> logs(n);
    double lbar = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        logs[i] = std::log(values[i]);
        lbar += logs[i];
    }
    lbar /= static_cast<double>(n);
    double lvar = 0.0;
    for (double l : logs) lvar += (l - lbar) * (l - lbar);
    lvar /= static_cast<double>(n);

    // Method-of-moments start: log of a Weibull is Gumbel with variance
    // pi^2 / (6 alpha^2).
    const double pi = std::acos(-1.0);
    double alpha = pi / std::sqrt(6.0 * lvar);
    if (!(alpha > 0.0) || !std::isfinite(alpha)) alpha = 1.0;
    const double lmax = *std::max_element(logs.begin(), logs.end());

    // Profile equation g(a) = sum(x^a l)/sum(x^a) - 1/a - lbar = 0,
    // evaluated with exp(a (l - lmax)) scaling for stability.
    auto profile = [&](double a, double& g, double& dg) {
        double s0 = 0.0, s1 = 0.0, s2 = 0.0;
        for (double l : logs) {
            const double e = std::exp(a * (l - lmax));
            s0 += e;
            s1 += l * e;
            s2 += l * l * e;
        }
        const double r1 = s1 / s0;
        g = r1 - 1.0 / a - lbar;
        dg = (s2 / s0 - r1 * r1) + 1.0 / (a * a);
    };

    double g = 0.0, dg = 0.0;
    bool converged = false;
    for (int iter = 0; iter < 200; ++iter) {
        profile(alpha, g, dg);
        if (std::fabs(g) < 1e-10) {
            converged = true;
            break;
        }
        double step = g / dg;
        double next = alpha - step;
        while (next <= 0.0) {
            step *= 0.5;
            next = alpha - step;
        }
        if (std::fabs(next - alpha) < 1e-14 * alpha) {
            alpha = next;
            profile(alpha, g, dg);
            converged = std::fabs(g) < 1e-8;
            break;
        }
        alpha = next;
    }
    if (!converged) {
        profile(alpha, g, dg);
        if (std::fabs(g) >= 1e-8)
            throw std::runtime_error("Weibull MLE did not converge (profile residual " +
                                     std::to_string(g) + ")");
    }

    double s0 = 0.0;
    for (double l : logs) s0 += std::exp(alpha * (l - lmax));
    const double beta = std::exp(lmax + std::log(s0 / static_cast<double>(n)) / alpha);
    return {alpha, beta};
}

double weibull_cdf(double x, const WeibullParams& params, double location) {
    if (params.shape <= 0.0 || params.scale <= 0.0)
        throw std::invalid_argument("Weibull parameters must be positive");
    if (x <= location) return 0.0;
    return -std::expm1(-std::pow((x - location) / params.scale, params.shape));
}

double weibull_quantile(double p, const WeibullParams& params, double location) {
    if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("quantile argument must lie in (0, 1)");
    return location + params.scale * std::pow(-std::log1p(-p), 1.0 / params.shape);
}

double weibull_mean_offset(const WeibullParams& params) {
    return params.scale * std::tgamma(1.0 + 1.0 / params.shape);
}

ProbabilityEstimate exceedance_from_forecast(double y_hat, const ExceedanceConfig& cfg,
                                             const WeibullParams& params, int horizon) {
    if (!std::isfinite(cfg.tau)) throw std::invalid_argument("threshold must be finite");
    double location = y_hat;
    if (cfg.location_mode == ExceedanceConfig::LocationMode::MeanCentered)
        location = y_hat - weibull_mean_offset(params);
    const double p = 1.0 - weibull_cdf(cfg.tau, params, location);
    return {p, ProbabilityEstimate::Source::Cdf, horizon};
}

ProbabilityEstimate exceedance_direct(const std::vector<double>& member_forecasts, double tau,
                                      int horizon) {
    if (member_forecasts.empty())
        throw std::invalid_argument("direct estimator needs at least one member forecast");
    std::size_t count = 0;
    for (double f : member_forecasts)
        if (f >= tau) ++count;
    return {static_cast<double>(count) / static_cast<double>(member_forecasts.size()),
            ProbabilityEstimate::Source::Direct, horizon};
}

std::vector<std::pair<double, double>> exceedance_curve(double y_hat,
                                                        const std::vector<double>& taus,
                                                        const ExceedanceConfig& cfg,
                                                        const WeibullParams& params) {
    for (std::size_t i = 1; i < taus.size(); ++i)
        if (taus[i] <= taus[i - 1])
            throw std::invalid_argument("curve thresholds must be strictly increasing");
    std::vector<std::pair<double, double>> curve;
    curve.reserve(taus.size());
    for (double tau : taus) {
        ExceedanceConfig point_cfg = cfg;
        point_cfg.tau = tau;
        curve.emplace_back(tau, exceedance_from_forecast(y_hat, point_cfg, params).p);
    }
    return curve;
}

}  // namespace excast
