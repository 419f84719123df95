#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "excast/dataset.hpp"

namespace excast {

enum class ModelFamily {
    LinearLasso,
    LinearRidge,
    Knn,
    ForestRegressor,
    ForestClassifier,
    Logistic,
};

std::string family_name(ModelFamily f);
ModelFamily family_from_name(const std::string& name);
bool family_is_classifier(ModelFamily f);

struct ModelSpec {
    ModelFamily family = ModelFamily::ForestRegressor;
    int horizon = 1;
    // linear
    double lambda = 0.0;
    // knn
    int k = 5;
    bool distance_weights = false;
    // tree ensembles
    int n_trees = 100;
    int max_depth = -1;  // < 0 means unbounded
    double feature_fraction = 1.0 / 3.0;
    int min_leaf = 5;
    bool bootstrap = true;
    // logistic
    double l2 = 1e-4;
    std::uint64_t seed = 0;

    void validate() const;
    nlohmann::json to_json() const;
    static ModelSpec from_json(const nlohmann::json& j);
};

/// Per-feature standardization fitted on training data and replayed at
/// inference. Zero-variance features map to 0.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> sd;

    void fit(const std::vector<std::vector<double>>& X);
    std::vector<double> transform(std::span<const double> x) const;
    nlohmann::json to_json() const;
    static Standardizer from_json(const nlohmann::json& j);
};

struct TargetSummary {
    double mean = 0.0, min = 0.0, max = 0.0;
};

/**
 * A fitted per-horizon model. Regressors return point forecasts from
 * predict(); classifiers return the class-1 probability, clipped away
 * from 0 and 1 for downstream log loss.
 */
class Model {
public:
    virtual ~Model() = default;

    double predict(std::span<const double> x) const;
    bool is_classifier() const { return family_is_classifier(spec_.family); }

    const ModelSpec& spec() const { return spec_; }
    const std::vector<std::string>& feature_names() const { return feature_names_; }
    const TargetSummary& target_summary() const { return target_summary_; }

    nlohmann::json to_json() const;

protected:
    virtual double predict_impl(std::span<const double> x) const = 0;
    virtual void params_to_json(nlohmann::json& j) const = 0;
    void check_input(std::span<const double> x) const;

    ModelSpec spec_;
    std::vector<std::string> feature_names_;
    TargetSummary target_summary_;

    friend std::unique_ptr<Model> model_from_json(const nlohmann::json& j);
    friend std::unique_ptr<Model> fit_model(const SupervisedDataset& ds, const ModelSpec& spec);
};

constexpr double kProbClip = 1e-15;

inline double clip_probability(double p) {
    if (p < kProbClip) return kProbClip;
    if (p > 1.0 - kProbClip) return 1.0 - kProbClip;
    return p;
}

/// Fits the family named by the spec on the spec's horizon. Classifier
/// families train on the binary targets, the rest on the numeric ones.
std::unique_ptr<Model> fit_model(const SupervisedDataset& ds, const ModelSpec& spec);

std::unique_ptr<Model> model_from_json(const nlohmann::json& j);

TargetSummary summarize_target(const std::vector<double>& y);

}  // namespace excast
