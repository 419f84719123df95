#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace excast {

/**
 * Regularly sampled multivariate series with an hourly step.
 * Missing values are stored as NaN; timestamps are unix seconds.
 */
struct TimeSeriesFrame {
    std::vector<std::int64_t> timestamps;
    std::vector<std::string> channel_names;
    std::vector<std::vector<double>> channels;  // [channel][t]
    std::size_t target_index = 0;

    static constexpr std::int64_t kStepSeconds = 3600;

    std::size_t length() const { return timestamps.size(); }
    std::size_t channel_count() const { return channels.size(); }
    const std::vector<double>& target() const { return channels[target_index]; }

    static bool is_missing(double v) { return std::isnan(v); }

    /// Throws std::invalid_argument if an invariant is violated.
    void validate() const;

    /// Day of year (1..366) for the sample at index t.
    int day_of_year(std::size_t t) const;
};

/// Column mapping for CSV ingestion. Channel names double as CSV headers.
struct CsvSchema {
    std::string timestamp_column = "timestamp";
    std::vector<std::string> channel_columns;
    std::string target_channel;
};

/// Reads a CSV with ISO timestamps (YYYY-MM-DD HH:MM:SS). Gaps in the
/// hourly grid are materialized as missing rows so the step stays constant.
TimeSeriesFrame load_csv(const std::string& path, const CsvSchema& schema);

/// Writes the frame back out in the same CSV dialect (empty cell = missing).
void write_csv(const TimeSeriesFrame& frame, const std::string& path);

/**
 * Seeded generator for a positive, right-skewed hourly series with
 * autoregressive and seasonal structure, plus coupled covariate channels.
 */
struct SyntheticConfig {
    std::size_t length = 10000;
    std::uint64_t seed = 0;
    std::vector<double> ar_coefficients = {0.85, 0.1};
    double seasonal_amplitude = 1.0;
    double seasonal_period_hours = 24.0 * 365.25;
    double noise_shape = 1.5;   // Weibull innovation shape
    double noise_scale = 0.4;   // Weibull innovation scale
    std::vector<double> covariate_coupling = {0.8};
    std::string target_channel = "swh";
};

TimeSeriesFrame generate_synthetic(const SyntheticConfig& cfg);

/// Largest companion-matrix eigenvalue magnitude of an AR polynomial.
double ar_spectral_radius(const std::vector<double>& coefficients);

std::int64_t parse_timestamp(const std::string& text);
std::string format_timestamp(std::int64_t unix_seconds);

}  // namespace excast
