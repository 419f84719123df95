#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "excast/rng.hpp"
#include "excast/weibull.hpp"

using namespace excast;

namespace {

std::vector<double> weibull_sample(double shape, double scale, std::size_t n,
                                   std::uint64_t seed) {
    std::mt19937_64 gen(rng::mix(seed));
    std::vector<double> v(n);
    for (auto& x : v) x = rng::weibull(gen, shape, scale);
    return v;
}

// Simpson quadrature of the three-parameter Weibull density.
double cdf_by_quadrature(double x, const WeibullParams& p, double loc) {
    if (x <= loc) return 0.0;
    const auto pdf = [&](double t) {
        const double z = (t - loc) / p.scale;
        return p.shape / p.scale * std::pow(z, p.shape - 1.0) *
               std::exp(-std::pow(z, p.shape));
    };
    const int n = 20000;
    const double a = loc + 1e-12, h = (x - a) / n;
    double sum = pdf(a) + pdf(x);
    for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * pdf(a + i * h);
    return sum * h / 3.0;
}

}  // namespace

TEST_CASE("weibull MLE recovers generator parameters") {
    for (auto [shape, scale] : std::vector<std::pair<double, double>>{
             {1.5, 2.0}, {1.0, 1.0}, {2.5, 0.7}}) {
        const auto sample = weibull_sample(shape, scale, 10000, 123);
        const auto fit = fit_weibull_mle(sample);
        CHECK(std::fabs(fit.shape - shape) / shape < 0.05);
        CHECK(std::fabs(fit.scale - scale) / scale < 0.05);
    }
}

TEST_CASE("exponential data fits shape near 1") {
    const auto sample = weibull_sample(1.0, 3.0, 10000, 321);
    const auto fit = fit_weibull_mle(sample);
    CHECK(fit.shape >= 0.95);
    CHECK(fit.shape <= 1.05);
}

TEST_CASE("weibull MLE domain errors") {
    auto sample = weibull_sample(1.5, 2.0, 100, 5);
    sample[10] = 0.0;
    CHECK_THROWS_AS(fit_weibull_mle(sample), std::invalid_argument);
    CHECK_THROWS_AS(fit_weibull_mle({1, 2, 3}), std::invalid_argument);  // n < 10
    CHECK_THROWS_AS(fit_weibull_mle(std::vector<double>(20, 2.0)), std::runtime_error);
}

TEST_CASE("refitting a sample from the fit contracts toward the truth") {
    const double shape = 1.8, scale = 1.3;
    const auto fit1 = fit_weibull_mle(weibull_sample(shape, scale, 10000, 77));
    std::mt19937_64 gen(rng::mix(78));
    std::vector<double> resampled(10000);
    for (auto& x : resampled) x = rng::weibull(gen, fit1.shape, fit1.scale);
    const auto fit2 = fit_weibull_mle(resampled);
    CHECK(std::fabs(fit2.shape - shape) / shape < 0.05);
    CHECK(std::fabs(fit2.scale - scale) / scale < 0.05);
}

TEST_CASE("weibull CDF analytic spots") {
    WeibullParams exp1{1.0, 2.0};
    CHECK(weibull_cdf(2.0, exp1, 0.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
    CHECK(weibull_cdf(0.0, exp1, 0.0) == 0.0);
    CHECK(weibull_cdf(-5.0, exp1, 1.0) == 0.0);
    CHECK(weibull_cdf(1.0, exp1, 1.0) == 0.0);

    WeibullParams p{2.0, 2.0};
    CHECK(weibull_cdf(3.0, p, 1.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
    CHECK(weibull_cdf(3.0, p, 1.0) ==
          doctest::Approx(cdf_by_quadrature(3.0, p, 1.0)).epsilon(1e-8));
}

TEST_CASE("CDF is monotone and hits its limits") {
    WeibullParams p{1.7, 0.9};
    double prev = -1.0;
    for (double x = -1.0; x < 10.0; x += 0.05) {
        const double f = weibull_cdf(x, p, 0.5);
        CHECK(f >= prev);
        CHECK(f >= 0.0);
        CHECK(f <= 1.0);
        prev = f;
    }
    CHECK(weibull_cdf(1e9, p, 0.5) == doctest::Approx(1.0));
}

TEST_CASE("quantile inverts the CDF on (0.01, 0.99)") {
    WeibullParams p{2.2, 1.4};
    for (double q = 0.01; q < 0.995; q += 0.01) {
        const double x = weibull_quantile(q, p, 0.3);
        CHECK(weibull_cdf(x, p, 0.3) == doctest::Approx(q).epsilon(1e-9));
    }
}

TEST_CASE("exceedance_from_forecast literal mode") {
    WeibullParams p{1.0, 2.0};
    ExceedanceConfig cfg;
    cfg.tau = 3.0;

    SUBCASE("forecast at or above tau saturates to 1") {
        CHECK(exceedance_from_forecast(3.0, cfg, p).p == 1.0);
        CHECK(exceedance_from_forecast(5.0, cfg, p).p == 1.0);
    }
    SUBCASE("alpha=1, y_hat = tau - beta gives exp(-1)") {
        CHECK(exceedance_from_forecast(1.0, cfg, p).p ==
              doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    }
    SUBCASE("probability estimate carries source and horizon") {
        const auto est = exceedance_from_forecast(1.0, cfg, p, 6);
        CHECK(est.source == ProbabilityEstimate::Source::Cdf);
        CHECK(est.horizon == 6);
    }
}

TEST_CASE("mean-centered mode matches a Monte Carlo frequency") {
    WeibullParams p{1.5, 2.0};
    ExceedanceConfig cfg;
    cfg.location_mode = ExceedanceConfig::LocationMode::MeanCentered;
    cfg.tau = 4.0;
    const double y_hat = 3.0;
    const double analytic = exceedance_from_forecast(y_hat, cfg, p).p;

    const double loc = y_hat - weibull_mean_offset(p);
    std::mt19937_64 gen(rng::mix(2024));
    std::size_t hits = 0;
    const std::size_t n = 1000000;
    for (std::size_t i = 0; i < n; ++i)
        if (loc + rng::weibull(gen, p.shape, p.scale) >= cfg.tau) ++hits;
    CHECK(std::fabs(analytic - static_cast<double>(hits) / n) < 0.003);
}

TEST_CASE("mean-centered mode makes the predictive mean equal the forecast") {
    WeibullParams p{1.5, 2.0};
    const double y_hat = 3.0;
    const double loc = y_hat - weibull_mean_offset(p);
    CHECK(loc + weibull_mean_offset(p) == doctest::Approx(y_hat).epsilon(1e-12));
    // tau at or below the location saturates to 1.
    ExceedanceConfig cfg;
    cfg.location_mode = ExceedanceConfig::LocationMode::MeanCentered;
    cfg.tau = loc - 0.1;
    CHECK(exceedance_from_forecast(y_hat, cfg, p).p == 1.0);
}

TEST_CASE("p is monotone in the forecast and in tau") {
    WeibullParams p{1.3, 1.1};
    for (auto mode : {ExceedanceConfig::LocationMode::Literal,
                      ExceedanceConfig::LocationMode::MeanCentered}) {
        ExceedanceConfig cfg;
        cfg.location_mode = mode;
        cfg.tau = 3.0;
        double prev = -1.0;
        for (double y = 0.0; y < 6.0; y += 0.1) {
            const double pr = exceedance_from_forecast(y, cfg, p).p;
            CHECK(pr >= prev);
            prev = pr;
        }
        prev = 2.0;
        for (double tau = 0.0; tau < 6.0; tau += 0.1) {
            cfg.tau = tau;
            const double pr = exceedance_from_forecast(2.5, cfg, p).p;
            CHECK(pr <= prev);
            prev = pr;
        }
    }
}

TEST_CASE("exceedance_direct counts the boundary as exceedance") {
    CHECK(exceedance_direct({4.0, 2.0, 3.5, 1.0}, 3.0).p == 0.5);
    CHECK(exceedance_direct({1.0, 2.0}, 3.0).p == 0.0);
    CHECK(exceedance_direct({3.0, 3.0, 3.0}, 3.0).p == 1.0);
    CHECK(exceedance_direct({5.0}, 3.0).source == ProbabilityEstimate::Source::Direct);
    CHECK_THROWS_AS(exceedance_direct({}, 3.0), std::invalid_argument);
}

TEST_CASE("exceedance_curve consistency and validation") {
    WeibullParams p{1.5, 2.0};
    ExceedanceConfig cfg;
    const std::vector<double> repeated = {1.0, 1.0};
    const std::vector<double> decreasing = {2.0, 1.0};
    CHECK_THROWS_AS(exceedance_curve(2.0, repeated, cfg, p), std::invalid_argument);
    CHECK_THROWS_AS(exceedance_curve(2.0, decreasing, cfg, p), std::invalid_argument);

    const std::vector<double> taus = {1.0, 2.0, 3.0, 4.5, 6.0};
    const auto curve = exceedance_curve(2.0, taus, cfg, p);
    REQUIRE(curve.size() == 5);
    double prev = 2.0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        CHECK(curve[i].first == taus[i]);
        ExceedanceConfig point = cfg;
        point.tau = taus[i];
        CHECK(curve[i].second == exceedance_from_forecast(2.0, point, p).p);
        CHECK(curve[i].second <= prev);
        prev = curve[i].second;
    }
}
