#pragma once

#include "excast/model.hpp"

namespace excast {

/**
 * Heterogeneous regression ensemble: members are fitted on the
 * chronologically earlier part of the training rows, ranked by MAE on
 * the trailing validation slice, trimmed to the better half, refitted
 * on the full training set, and combined by uniform averaging.
 */
class EnsembleModel {
public:
    static EnsembleModel fit(const SupervisedDataset& ds, const std::vector<ModelSpec>& specs,
                             double validation_fraction, int horizon);
    static EnsembleModel from_json(const nlohmann::json& j);

    double predict(std::span<const double> x) const;
    std::vector<double> predict_members(std::span<const double> x) const;

    std::size_t member_count() const { return members_.size(); }
    const std::vector<std::size_t>& kept_spec_indices() const { return kept_spec_indices_; }
    const std::vector<double>& validation_maes() const { return validation_maes_; }
    int horizon() const { return horizon_; }

    nlohmann::json to_json() const;

private:
    std::vector<std::unique_ptr<Model>> members_;  // kept members, stable order
    std::vector<std::size_t> kept_spec_indices_;   // indices into the original spec list
    std::vector<double> validation_maes_;          // one per original spec
    int horizon_ = 1;
};

/// The reduced default member roster (linear, kNN and tree families).
std::vector<ModelSpec> default_ensemble_specs(std::uint64_t seed);

}  // namespace excast
