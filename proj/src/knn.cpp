#include "excast/knn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace excast {

std::unique_ptr<KnnModel> KnnModel::fit(const std::vector<std::vector<double>>& X,
                                        const std::vector<double>& y, const ModelSpec& spec,
                                        const std::vector<std::string>& feature_names) {
    if (X.empty() || X.size() != y.size()) throw std::invalid_argument("bad training data shape");
    if (static_cast<std::size_t>(spec.k) > X.size())
        throw std::invalid_argument("k exceeds the number of training rows");

    auto model = std::make_unique<KnnModel>();
    model->spec_ = spec;
    model->feature_names_ = feature_names;
    model->target_summary_ = summarize_target(y);
    model->scaler_.fit(X);
    model->train_X_.reserve(X.size());
    for (const auto& row : X) model->train_X_.push_back(model->scaler_.transform(row));
    model->train_y_ = y;
    return model;
}

double KnnModel::predict_impl(std::span<const double> x) const {
    const auto z = scaler_.transform(x);
    const std::size_t n = train_X_.size();
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        double d2 = 0.0;
        for (std::size_t j = 0; j < z.size(); ++j) {
            const double d = z[j] - train_X_[i][j];
            d2 += d * d;
        }
        dist[i] = std::sqrt(d2);
    }
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    const std::size_t k = static_cast<std::size_t>(spec_.k);
    std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&](std::size_t a, std::size_t b) {
        return dist[a] != dist[b] ? dist[a] < dist[b] : a < b;
    });

    if (!spec_.distance_weights) {
        double sum = 0.0;
        for (std::size_t i = 0; i < k; ++i) sum += train_y_[idx[i]];
        return sum / static_cast<double>(k);
    }
    // Exact hits dominate inverse-distance weighting.
    constexpr double kEps = 1e-12;
    double exact_sum = 0.0;
    std::size_t exact_count = 0;
    for (std::size_t i = 0; i < k; ++i)
        if (dist[idx[i]] < kEps) {
            exact_sum += train_y_[idx[i]];
            ++exact_count;
        }
    if (exact_count > 0) return exact_sum / static_cast<double>(exact_count);
    double wsum = 0.0, vsum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double w = 1.0 / dist[idx[i]];
        wsum += w;
        vsum += w * train_y_[idx[i]];
    }
    return vsum / wsum;
}

void KnnModel::params_to_json(nlohmann::json& j) const {
    j["standardizer"] = scaler_.to_json();
    j["train_X"] = train_X_;
    j["train_y"] = train_y_;
}

std::unique_ptr<KnnModel> KnnModel::from_json(const nlohmann::json& j) {
    auto model = std::make_unique<KnnModel>();
    model->scaler_ = Standardizer::from_json(j.at("standardizer"));
    model->train_X_ = j.at("train_X").get<std::vector<std::vector<double>>>();
    model->train_y_ = j.at("train_y").get<std::vector<double>>();
    return model;
}

std::unique_ptr<Model> fit_knn(const SupervisedDataset& ds, const ModelSpec& spec) {
    const std::size_t slot = ds.horizon_slot(spec.horizon);
    return KnnModel::fit(ds.X, ds.y[slot], spec, ds.feature_names);
}

}  // namespace excast
