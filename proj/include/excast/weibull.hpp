#pragma once

#include <utility>
#include <vector>

namespace excast {

struct WeibullParams {
    double shape = 1.0;  // alpha
    double scale = 1.0;  // beta
};

struct ExceedanceConfig {
    enum class LocationMode { Literal, MeanCentered };
    LocationMode location_mode = LocationMode::Literal;
    double tau = 0.0;
};

struct ProbabilityEstimate {
    enum class Source { Cdf, Direct, Classifier };
    double p = 0.0;
    Source source = Source::Cdf;
    int horizon = 1;
};

/**
 * Maximum-likelihood fit of the two-parameter Weibull distribution.
 * Newton iteration on the profile-likelihood shape equation, scale
 * recovered in closed form; initialized from the moments of log values.
 */
WeibullParams fit_weibull_mle(const std::vector<double>& values);

/// Three-parameter CDF: F(x) = 1 - exp(-((x - location)/scale)^shape)
/// for x > location, else 0.
double weibull_cdf(double x, const WeibullParams& params, double location = 0.0);

/// Inverse of weibull_cdf on (0, 1).
double weibull_quantile(double p, const WeibullParams& params, double location = 0.0);

/// Mean of the shifted distribution minus its location: scale * Gamma(1 + 1/shape).
double weibull_mean_offset(const WeibullParams& params);

/// Converts a point forecast into an exceedance probability. Literal mode
/// places the distribution's location at the forecast itself; mean-centered
/// mode shifts it so the predictive mean equals the forecast.
ProbabilityEstimate exceedance_from_forecast(double y_hat, const ExceedanceConfig& cfg,
                                             const WeibullParams& params, int horizon = 1);

/// Fraction of ensemble member forecasts at or above tau.
ProbabilityEstimate exceedance_direct(const std::vector<double>& member_forecasts, double tau,
                                      int horizon = 1);

/// Exceedance probability at each threshold of a strictly increasing list.
std::vector<std::pair<double, double>> exceedance_curve(double y_hat,
                                                        const std::vector<double>& taus,
                                                        const ExceedanceConfig& cfg,
                                                        const WeibullParams& params);

}  // namespace excast
