#pragma once

#include "excast/model.hpp"

namespace excast {

/**
 * L1- or L2-penalized least squares solved by cyclic coordinate descent
 * on standardized features. With lambda = 0 this reduces to ordinary
 * least squares.
 */
class LinearModel : public Model {
public:
    static std::unique_ptr<LinearModel> fit(const std::vector<std::vector<double>>& X,
                                            const std::vector<double>& y,
                                            const ModelSpec& spec,
                                            const std::vector<std::string>& feature_names);
    static std::unique_ptr<LinearModel> from_json(const nlohmann::json& j);

    const std::vector<double>& coefficients() const { return weights_; }
    double intercept() const { return intercept_; }
    const Standardizer& standardizer() const { return scaler_; }

protected:
    double predict_impl(std::span<const double> x) const override;
    void params_to_json(nlohmann::json& j) const override;

private:
    Standardizer scaler_;
    std::vector<double> weights_;  // in standardized feature space
    double intercept_ = 0.0;
};

std::unique_ptr<Model> fit_linear(const SupervisedDataset& ds, const ModelSpec& spec);

}  // namespace excast
