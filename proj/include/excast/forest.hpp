#pragma once

#include "excast/model.hpp"

namespace excast {

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;  // leaf: mean target (regression) or class-1 fraction
};

struct Tree {
    std::vector<TreeNode> nodes;
    double predict(std::span<const double> x) const;
};

/**
 * Bootstrap-sampled, feature-subsampled CART ensemble. Regression
 * averages tree means; classification reports the fraction of trees
 * voting for class 1.
 */
class ForestModel : public Model {
public:
    static std::unique_ptr<ForestModel> fit(const std::vector<std::vector<double>>& X,
                                            const std::vector<double>& y, bool classification,
                                            const ModelSpec& spec,
                                            const std::vector<std::string>& feature_names);
    static std::unique_ptr<ForestModel> from_json(const nlohmann::json& j);

    /// Per-tree predictions, in stable tree order.
    std::vector<double> member_predictions(std::span<const double> x) const;

    const std::vector<Tree>& trees() const { return trees_; }

protected:
    double predict_impl(std::span<const double> x) const override;
    void params_to_json(nlohmann::json& j) const override;

private:
    std::vector<Tree> trees_;
    bool classification_ = false;
};

std::unique_ptr<Model> fit_tree_ensemble(const SupervisedDataset& ds, const ModelSpec& spec);

}  // namespace excast
