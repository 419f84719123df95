#include "excast/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "excast/rng.hpp"

namespace excast {

EnsembleModel EnsembleModel::fit(const SupervisedDataset& ds, const std::vector<ModelSpec>& specs,
                                 double validation_fraction, int horizon) {
    if (specs.size() < 2) throw std::invalid_argument("ensemble needs at least 2 member specs");
    if (validation_fraction <= 0.0 || validation_fraction >= 1.0)
        throw std::invalid_argument("validation_fraction must lie in (0, 1)");
    const std::size_t n = ds.rows();
    const std::size_t n_val = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(validation_fraction * static_cast<double>(n))));
    if (n_val >= n) throw std::invalid_argument("validation slice leaves no training rows");

    std::vector<std::size_t> fit_rows(n - n_val), val_rows(n_val);
    std::iota(fit_rows.begin(), fit_rows.end(), 0);
    std::iota(val_rows.begin(), val_rows.end(), n - n_val);
    const SupervisedDataset fit_ds = ds.subset(fit_rows);
    const SupervisedDataset val_ds = ds.subset(val_rows);
    const std::size_t slot = ds.horizon_slot(horizon);

    EnsembleModel out;
    out.horizon_ = horizon;
    out.validation_maes_.resize(specs.size());
    for (std::size_t m = 0; m < specs.size(); ++m) {
        ModelSpec spec = specs[m];
        spec.horizon = horizon;
        const auto model = fit_model(fit_ds, spec);
        double abs_err = 0.0;
        for (std::size_t i = 0; i < val_ds.rows(); ++i)
            abs_err += std::fabs(model->predict(val_ds.X[i]) - val_ds.y[slot][i]);
        out.validation_maes_[m] = abs_err / static_cast<double>(val_ds.rows());
    }

    // Keep the better-scoring half (rounding up), preserving spec order.
    std::vector<std::size_t> rank(specs.size());
    std::iota(rank.begin(), rank.end(), 0);
    std::stable_sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) {
        return out.validation_maes_[a] < out.validation_maes_[b];
    });
    const std::size_t kept = (specs.size() + 1) / 2;
    rank.resize(kept);
    std::sort(rank.begin(), rank.end());
    out.kept_spec_indices_ = rank;

    for (std::size_t m : out.kept_spec_indices_) {
        ModelSpec spec = specs[m];
        spec.horizon = horizon;
        out.members_.push_back(fit_model(ds, spec));
    }
    return out;
}

double EnsembleModel::predict(std::span<const double> x) const {
    double sum = 0.0;
    for (const auto& m : members_) sum += m->predict(x);
    return sum / static_cast<double>(members_.size());
}

std::vector<double> EnsembleModel::predict_members(std::span<const double> x) const {
    std::vector<double> out;
    out.reserve(members_.size());
    for (const auto& m : members_) out.push_back(m->predict(x));
    return out;
}

nlohmann::json EnsembleModel::to_json() const {
    nlohmann::json members = nlohmann::json::array();
    for (const auto& m : members_) members.push_back(m->to_json());
    return {{"format_version", 1},
            {"horizon", horizon_},
            {"members", std::move(members)},
            {"kept_spec_indices", kept_spec_indices_},
            {"validation_maes", validation_maes_}};
}

EnsembleModel EnsembleModel::from_json(const nlohmann::json& j) {
    if (j.value("format_version", 0) != 1)
        throw std::runtime_error("unsupported ensemble document version");
    EnsembleModel out;
    out.horizon_ = j.at("horizon").get<int>();
    for (const auto& mj : j.at("members")) out.members_.push_back(model_from_json(mj));
    out.kept_spec_indices_ = j.at("kept_spec_indices").get<std::vector<std::size_t>>();
    out.validation_maes_ = j.at("validation_maes").get<std::vector<double>>();
    return out;
}

std::vector<ModelSpec> default_ensemble_specs(std::uint64_t seed) {
    std::vector<ModelSpec> specs;
    auto add = [&](ModelSpec s) {
        s.seed = rng::mix(seed + specs.size() + 1);
        specs.push_back(s);
    };
    for (double lambda : {0.25, 1.0}) {
        ModelSpec s;
        s.family = ModelFamily::LinearLasso;
        s.lambda = lambda;
        add(s);
        s.family = ModelFamily::LinearRidge;
        add(s);
    }
    for (bool dist : {false, true}) {
        ModelSpec s;
        s.family = ModelFamily::Knn;
        s.k = 10;
        s.distance_weights = dist;
        add(s);
    }
    for (int depth : {-1, 3}) {
        ModelSpec s;
        s.family = ModelFamily::ForestRegressor;
        s.n_trees = 50;
        s.max_depth = depth;
        add(s);
    }
    return specs;
}

}  // namespace excast
