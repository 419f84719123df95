#pragma once

#include <cstdint>
#include <vector>

namespace excast {

struct PointMetrics {
    double mae = 0.0;
    double rmse = 0.0;
    double mape = 0.0;  // NaN when any true value is zero
    double r2 = 0.0;
};

PointMetrics point_metrics(const std::vector<double>& y_true, const std::vector<double>& y_pred);

/// Mann-Whitney AUC with tie handling, computed by sort in O(n log n).
/// Throws when only one class is present.
double roc_auc(const std::vector<std::uint8_t>& b_true, const std::vector<double>& scores);

/// Mean negative Bernoulli log-likelihood; probabilities are clipped to
/// [1e-15, 1 - 1e-15] first.
double log_loss(const std::vector<std::uint8_t>& b_true, const std::vector<double>& p);

}  // namespace excast
