#include "excast/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace excast {

void EmbeddingConfig::validate() const {
    if (lag_count < 1) throw std::invalid_argument("lag_count must be >= 1");
    if (horizons.empty()) throw std::invalid_argument("horizons must be nonempty");
    for (int h : horizons)
        if (h < 1) throw std::invalid_argument("every horizon must be >= 1");
}

std::size_t SupervisedDataset::horizon_slot(int h) const {
    for (std::size_t i = 0; i < horizons.size(); ++i)
        if (horizons[i] == h) return i;
    throw std::invalid_argument("horizon " + std::to_string(h) + " not in dataset");
}

SupervisedDataset SupervisedDataset::subset(const std::vector<std::size_t>& row_indices) const {
    SupervisedDataset out;
    out.horizons = horizons;
    out.tau = tau;
    out.feature_names = feature_names;
    out.target_lag_columns = target_lag_columns;
    out.X.reserve(row_indices.size());
    out.origins.reserve(row_indices.size());
    out.y.resize(horizons.size());
    out.b.resize(horizons.size());
    for (std::size_t i : row_indices) {
        out.X.push_back(X[i]);
        out.origins.push_back(origins[i]);
        for (std::size_t h = 0; h < horizons.size(); ++h) {
            out.y[h].push_back(y[h][i]);
            out.b[h].push_back(b[h][i]);
        }
    }
    return out;
}

void SupervisedDataset::set_threshold(double new_tau) {
    tau = new_tau;
    for (std::size_t h = 0; h < horizons.size(); ++h) {
        b[h].resize(y[h].size());
        for (std::size_t i = 0; i < y[h].size(); ++i)
            b[h][i] = y[h][i] >= tau ? 1 : 0;
    }
}

double compute_threshold(const std::vector<double>& values, const ThresholdSpec& spec) {
    if (spec.mode == ThresholdSpec::Mode::Fixed) return spec.fixed_value;
    if (values.empty()) throw std::invalid_argument("cannot take a percentile of no values");
    if (spec.percentile <= 0.0 || spec.percentile >= 100.0)
        throw std::invalid_argument("percentile must lie in (0, 100)");
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const double h = (static_cast<double>(sorted.size()) - 1.0) * spec.percentile / 100.0;
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

SupervisedDataset embed(const TimeSeriesFrame& frame, const EmbeddingConfig& cfg,
                        const ThresholdSpec& spec) {
    cfg.validate();
    frame.validate();
    if (frame.channel_names[frame.target_index] != cfg.target_channel)
        throw std::invalid_argument("embedding target channel '" + cfg.target_channel +
                                    "' does not match the frame's target");
    const std::size_t q = static_cast<std::size_t>(cfg.lag_count);
    const int max_h = *std::max_element(cfg.horizons.begin(), cfg.horizons.end());
    if (frame.length() <= q + static_cast<std::size_t>(max_h))
        throw std::runtime_error("frame too short to embed: no valid origins");

    SupervisedDataset ds;
    ds.horizons = cfg.horizons;
    ds.y.resize(cfg.horizons.size());
    ds.b.resize(cfg.horizons.size());

    for (std::size_t c = 0; c < frame.channel_count(); ++c)
        for (std::size_t j = 1; j <= q; ++j) {
            ds.feature_names.push_back(frame.channel_names[c] + "_lag" + std::to_string(j));
            if (c == frame.target_index)
                ds.target_lag_columns.push_back(ds.feature_names.size() - 1);
        }
    if (cfg.include_day_of_year) ds.feature_names.push_back("day_of_year");

    const auto& target = frame.target();
    for (std::size_t t = q - 1; t + static_cast<std::size_t>(max_h) < frame.length(); ++t) {
        bool ok = true;
        for (std::size_t c = 0; c < frame.channel_count() && ok; ++c)
            for (std::size_t j = 0; j < q; ++j)
                if (TimeSeriesFrame::is_missing(frame.channels[c][t - j])) {
                    ok = false;
                    break;
                }
        for (int h : cfg.horizons)
            if (ok && TimeSeriesFrame::is_missing(target[t + static_cast<std::size_t>(h)]))
                ok = false;
        if (!ok) continue;

        std::vector<double> row;
        row.reserve(ds.feature_names.size());
        for (std::size_t c = 0; c < frame.channel_count(); ++c)
            for (std::size_t j = 0; j < q; ++j) row.push_back(frame.channels[c][t - j]);
        if (cfg.include_day_of_year)
            row.push_back(static_cast<double>(frame.day_of_year(t)));
        ds.X.push_back(std::move(row));
        ds.origins.push_back(t);
        for (std::size_t h = 0; h < cfg.horizons.size(); ++h)
            ds.y[h].push_back(target[t + static_cast<std::size_t>(cfg.horizons[h])]);
    }
    if (ds.X.empty()) throw std::runtime_error("embedding produced an empty dataset");

    std::vector<double> train_values;
    for (double v : target)
        if (!TimeSeriesFrame::is_missing(v)) train_values.push_back(v);
    ds.set_threshold(compute_threshold(train_values, spec));
    return ds;
}

SupervisedDataset filter_ongoing_exceedance(const SupervisedDataset& ds) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        bool ongoing = false;
        for (std::size_t col : ds.target_lag_columns)
            if (ds.X[i][col] >= ds.tau) {
                ongoing = true;
                break;
            }
        if (!ongoing) keep.push_back(i);
    }
    return ds.subset(keep);
}

}  // namespace excast
