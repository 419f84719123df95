#include "excast/linear.hpp"

#include <cmath>
#include <stdexcept>

namespace excast {

namespace {

double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

}  // namespace

std::unique_ptr<LinearModel> LinearModel::fit(const std::vector<std::vector<double>>& X,
                                              const std::vector<double>& y,
                                              const ModelSpec& spec,
                                              const std::vector<std::string>& feature_names) {
    const std::size_t n = X.size();
    if (n == 0 || n != y.size()) throw std::invalid_argument("bad training data shape");
    const std::size_t p = X.front().size();
    const bool lasso = spec.family == ModelFamily::LinearLasso;

    auto model = std::make_unique<LinearModel>();
    model->spec_ = spec;
    model->feature_names_ = feature_names;
    model->target_summary_ = summarize_target(y);
    model->scaler_.fit(X);

    std::vector<std::vector<double>> Z(n);
    for (std::size_t i = 0; i < n; ++i) Z[i] = model->scaler_.transform(X[i]);

    // Zero-variance features stay at coefficient 0 (their standardized
    // column is identically zero).
    std::vector<double> col_sq(p, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) col_sq[j] += Z[i][j] * Z[i][j];

    const double ybar = model->target_summary_.mean;
    std::vector<double> resid(n);
    for (std::size_t i = 0; i < n; ++i) resid[i] = y[i] - ybar;

    std::vector<double> w(p, 0.0);
    const double nd = static_cast<double>(n);
    const int max_iter = 100000;
    for (int iter = 0; iter < max_iter; ++iter) {
        double max_delta = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            if (col_sq[j] == 0.0) continue;
            double rho = 0.0;
            for (std::size_t i = 0; i < n; ++i) rho += Z[i][j] * resid[i];
            rho = rho / nd + w[j] * col_sq[j] / nd;
            const double denom = col_sq[j] / nd;
            double w_new;
            if (lasso)
                w_new = soft_threshold(rho, spec.lambda) / denom;
            else
                w_new = rho / (denom + spec.lambda);
            const double delta = w_new - w[j];
            if (delta != 0.0) {
                for (std::size_t i = 0; i < n; ++i) resid[i] -= delta * Z[i][j];
                w[j] = w_new;
            }
            max_delta = std::max(max_delta, std::fabs(delta));
        }
        if (max_delta < 1e-12) break;
    }

    model->weights_ = std::move(w);
    model->intercept_ = ybar;
    return model;
}

double LinearModel::predict_impl(std::span<const double> x) const {
    const auto z = scaler_.transform(x);
    double out = intercept_;
    for (std::size_t j = 0; j < z.size(); ++j) out += weights_[j] * z[j];
    return out;
}

void LinearModel::params_to_json(nlohmann::json& j) const {
    j["standardizer"] = scaler_.to_json();
    j["weights"] = weights_;
    j["intercept"] = intercept_;
}

std::unique_ptr<LinearModel> LinearModel::from_json(const nlohmann::json& j) {
    auto model = std::make_unique<LinearModel>();
    model->scaler_ = Standardizer::from_json(j.at("standardizer"));
    model->weights_ = j.at("weights").get<std::vector<double>>();
    model->intercept_ = j.at("intercept").get<double>();
    return model;
}

std::unique_ptr<Model> fit_linear(const SupervisedDataset& ds, const ModelSpec& spec) {
    const std::size_t slot = ds.horizon_slot(spec.horizon);
    return LinearModel::fit(ds.X, ds.y[slot], spec, ds.feature_names);
}

}  // namespace excast
