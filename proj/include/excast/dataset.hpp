#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "excast/timeseries.hpp"

namespace excast {

struct EmbeddingConfig {
    int lag_count = 6;
    std::vector<int> horizons = {1};
    bool include_day_of_year = true;
    std::string target_channel;

    void validate() const;
};

struct ThresholdSpec {
    enum class Mode { Percentile, Fixed };
    Mode mode = Mode::Percentile;
    double percentile = 99.0;
    double fixed_value = 0.0;

    static ThresholdSpec fixed(double tau) {
        return {Mode::Fixed, 99.0, tau};
    }
};

/**
 * Embedded design matrix with per-horizon numeric and binary targets.
 *
 * Row i corresponds to a forecasting origin t = origins[i]: the lag
 * features are the q most recent values ending at t, and y[h][i] is the
 * target channel h steps after t. b[h][i] = 1 iff y[h][i] >= tau.
 */
struct SupervisedDataset {
    std::vector<std::vector<double>> X;  // row-major, n x p
    std::vector<int> horizons;
    std::vector<std::vector<double>> y;        // [horizon][row]
    std::vector<std::vector<std::uint8_t>> b;  // [horizon][row]
    double tau = 0.0;
    std::vector<std::string> feature_names;
    std::vector<std::size_t> target_lag_columns;
    std::vector<std::size_t> origins;  // frame index of the last known lag

    std::size_t rows() const { return X.size(); }
    std::size_t cols() const { return X.empty() ? 0 : X.front().size(); }

    std::size_t horizon_slot(int h) const;  // throws if h absent

    /// Copies the given rows (in the given order) into a new dataset.
    SupervisedDataset subset(const std::vector<std::size_t>& row_indices) const;

    /// Replaces tau and recomputes every binary target.
    void set_threshold(double new_tau);
};

/// Quantile of the values under linear interpolation between closest ranks;
/// in fixed mode simply echoes the configured value.
double compute_threshold(const std::vector<double>& values, const ThresholdSpec& spec);

SupervisedDataset embed(const TimeSeriesFrame& frame, const EmbeddingConfig& cfg,
                        const ThresholdSpec& spec);

/// Drops rows where any lag of the target channel already meets tau.
SupervisedDataset filter_ongoing_exceedance(const SupervisedDataset& ds);

}  // namespace excast
