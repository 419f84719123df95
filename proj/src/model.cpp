#include "excast/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "excast/ensemble.hpp"
#include "excast/forest.hpp"
#include "excast/knn.hpp"
#include "excast/linear.hpp"
#include "excast/logistic.hpp"

namespace excast {

std::string family_name(ModelFamily f) {
    switch (f) {
        case ModelFamily::LinearLasso: return "linear_lasso";
        case ModelFamily::LinearRidge: return "linear_ridge";
        case ModelFamily::Knn: return "knn";
        case ModelFamily::ForestRegressor: return "tree_ensemble_regressor";
        case ModelFamily::ForestClassifier: return "tree_ensemble_classifier";
        case ModelFamily::Logistic: return "logistic";
    }
    throw std::logic_error("unknown model family");
}

ModelFamily family_from_name(const std::string& name) {
    if (name == "linear_lasso") return ModelFamily::LinearLasso;
    if (name == "linear_ridge") return ModelFamily::LinearRidge;
    if (name == "knn") return ModelFamily::Knn;
    if (name == "tree_ensemble_regressor") return ModelFamily::ForestRegressor;
    if (name == "tree_ensemble_classifier") return ModelFamily::ForestClassifier;
    if (name == "logistic") return ModelFamily::Logistic;
    throw std::invalid_argument("unknown model family: '" + name + "'");
}

bool family_is_classifier(ModelFamily f) {
    return f == ModelFamily::ForestClassifier || f == ModelFamily::Logistic;
}

void ModelSpec::validate() const {
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    if (lambda < 0) throw std::invalid_argument("lambda must be >= 0");
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (n_trees < 1) throw std::invalid_argument("n_trees must be >= 1");
    if (feature_fraction <= 0 || feature_fraction > 1)
        throw std::invalid_argument("feature_fraction must lie in (0, 1]");
    if (min_leaf < 1) throw std::invalid_argument("min_leaf must be >= 1");
    if (l2 < 0) throw std::invalid_argument("l2 must be >= 0");
}

nlohmann::json ModelSpec::to_json() const {
    return {
        {"family", family_name(family)},
        {"horizon", horizon},
        {"lambda", lambda},
        {"k", k},
        {"distance_weights", distance_weights},
        {"n_trees", n_trees},
        {"max_depth", max_depth},
        {"feature_fraction", feature_fraction},
        {"min_leaf", min_leaf},
        {"bootstrap", bootstrap},
        {"l2", l2},
        {"seed", seed},
    };
}

ModelSpec ModelSpec::from_json(const nlohmann::json& j) {
    ModelSpec s;
    s.family = family_from_name(j.at("family").get<std::string>());
    s.horizon = j.value("horizon", 1);
    s.lambda = j.value("lambda", 0.0);
    s.k = j.value("k", 5);
    s.distance_weights = j.value("distance_weights", false);
    s.n_trees = j.value("n_trees", 100);
    s.max_depth = j.value("max_depth", -1);
    s.feature_fraction = j.value("feature_fraction", 1.0 / 3.0);
    s.min_leaf = j.value("min_leaf", 5);
    s.bootstrap = j.value("bootstrap", true);
    s.l2 = j.value("l2", 1e-4);
    s.seed = j.value("seed", std::uint64_t{0});
    s.validate();
    return s;
}

void Standardizer::fit(const std::vector<std::vector<double>>& X) {
    const std::size_t n = X.size();
    const std::size_t p = X.empty() ? 0 : X.front().size();
    mean.assign(p, 0.0);
    sd.assign(p, 1.0);
    if (n == 0) return;
    for (const auto& row : X)
        for (std::size_t j = 0; j < p; ++j) mean[j] += row[j];
    for (std::size_t j = 0; j < p; ++j) mean[j] /= static_cast<double>(n);
    std::vector<double> var(p, 0.0);
    for (const auto& row : X)
        for (std::size_t j = 0; j < p; ++j) {
            const double d = row[j] - mean[j];
            var[j] += d * d;
        }
    for (std::size_t j = 0; j < p; ++j) {
        const double s = std::sqrt(var[j] / static_cast<double>(n));
        sd[j] = s > 0 ? s : 1.0;
    }
}

std::vector<double> Standardizer::transform(std::span<const double> x) const {
    std::vector<double> z(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) z[j] = (x[j] - mean[j]) / sd[j];
    return z;
}

nlohmann::json Standardizer::to_json() const {
    return {{"mean", mean}, {"sd", sd}};
}

Standardizer Standardizer::from_json(const nlohmann::json& j) {
    Standardizer s;
    s.mean = j.at("mean").get<std::vector<double>>();
    s.sd = j.at("sd").get<std::vector<double>>();
    return s;
}

TargetSummary summarize_target(const std::vector<double>& y) {
    TargetSummary s;
    if (y.empty()) return s;
    s.min = *std::min_element(y.begin(), y.end());
    s.max = *std::max_element(y.begin(), y.end());
    double sum = 0.0;
    for (double v : y) sum += v;
    s.mean = sum / static_cast<double>(y.size());
    return s;
}

void Model::check_input(std::span<const double> x) const {
    if (x.size() != feature_names_.size())
        throw std::invalid_argument("feature arity mismatch: got " + std::to_string(x.size()) +
                                    ", model expects " + std::to_string(feature_names_.size()));
    for (double v : x)
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite feature value");
}

double Model::predict(std::span<const double> x) const {
    check_input(x);
    double out = predict_impl(x);
    if (is_classifier()) out = clip_probability(out);
    if (!std::isfinite(out)) throw std::runtime_error("model produced a non-finite prediction");
    return out;
}

nlohmann::json Model::to_json() const {
    nlohmann::json j;
    j["format_version"] = 1;
    j["spec"] = spec_.to_json();
    j["feature_names"] = feature_names_;
    j["target_summary"] = {{"mean", target_summary_.mean},
                           {"min", target_summary_.min},
                           {"max", target_summary_.max}};
    params_to_json(j);
    return j;
}

std::unique_ptr<Model> fit_model(const SupervisedDataset& ds, const ModelSpec& spec) {
    spec.validate();
    if (ds.rows() == 0) throw std::invalid_argument("cannot fit on an empty dataset");
    switch (spec.family) {
        case ModelFamily::LinearLasso:
        case ModelFamily::LinearRidge:
            return fit_linear(ds, spec);
        case ModelFamily::Knn:
            return fit_knn(ds, spec);
        case ModelFamily::ForestRegressor:
        case ModelFamily::ForestClassifier:
            return fit_tree_ensemble(ds, spec);
        case ModelFamily::Logistic:
            return fit_logistic(ds, spec);
    }
    throw std::logic_error("unknown model family");
}

std::unique_ptr<Model> model_from_json(const nlohmann::json& j) {
    if (j.value("format_version", 0) != 1)
        throw std::runtime_error("unsupported model document version");
    const ModelSpec spec = ModelSpec::from_json(j.at("spec"));
    std::unique_ptr<Model> model;
    switch (spec.family) {
        case ModelFamily::LinearLasso:
        case ModelFamily::LinearRidge:
            model = LinearModel::from_json(j);
            break;
        case ModelFamily::Knn:
            model = KnnModel::from_json(j);
            break;
        case ModelFamily::ForestRegressor:
        case ModelFamily::ForestClassifier:
            model = ForestModel::from_json(j);
            break;
        case ModelFamily::Logistic:
            model = LogisticModel::from_json(j);
            break;
    }
    model->spec_ = spec;
    model->feature_names_ = j.at("feature_names").get<std::vector<std::string>>();
    const auto& ts = j.at("target_summary");
    model->target_summary_ = {ts.at("mean").get<double>(), ts.at("min").get<double>(),
                              ts.at("max").get<double>()};
    return model;
}

}  // namespace excast
