#pragma once

#include "excast/model.hpp"

namespace excast {

/// Nearest-neighbor regression on standardized features with uniform or
/// inverse-distance weighting.
class KnnModel : public Model {
public:
    static std::unique_ptr<KnnModel> fit(const std::vector<std::vector<double>>& X,
                                         const std::vector<double>& y,
                                         const ModelSpec& spec,
                                         const std::vector<std::string>& feature_names);
    static std::unique_ptr<KnnModel> from_json(const nlohmann::json& j);

protected:
    double predict_impl(std::span<const double> x) const override;
    void params_to_json(nlohmann::json& j) const override;

private:
    Standardizer scaler_;
    std::vector<std::vector<double>> train_X_;  // standardized
    std::vector<double> train_y_;
};

std::unique_ptr<Model> fit_knn(const SupervisedDataset& ds, const ModelSpec& spec);

}  // namespace excast
