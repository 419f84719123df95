#pragma once

#include "excast/model.hpp"

namespace excast {

/**
 * L2-regularized logistic regression fitted by Newton iterations on
 * standardized features. The intercept is not penalized.
 */
class LogisticModel : public Model {
public:
    static std::unique_ptr<LogisticModel> fit(const std::vector<std::vector<double>>& X,
                                              const std::vector<std::uint8_t>& b,
                                              const ModelSpec& spec,
                                              const std::vector<std::string>& feature_names);
    static std::unique_ptr<LogisticModel> from_json(const nlohmann::json& j);

    bool converged() const { return converged_; }
    double gradient_norm() const { return gradient_norm_; }
    const std::vector<double>& coefficients() const { return weights_; }
    double intercept() const { return intercept_; }

protected:
    double predict_impl(std::span<const double> x) const override;
    void params_to_json(nlohmann::json& j) const override;

private:
    Standardizer scaler_;
    std::vector<double> weights_;
    double intercept_ = 0.0;
    bool converged_ = false;
    double gradient_norm_ = 0.0;
};

std::unique_ptr<Model> fit_logistic(const SupervisedDataset& ds, const ModelSpec& spec);

}  // namespace excast
