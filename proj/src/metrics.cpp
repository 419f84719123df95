#include "excast/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace excast {

PointMetrics point_metrics(const std::vector<double>& y_true, const std::vector<double>& y_pred) {
    const std::size_t n = y_true.size();
    if (n == 0 || n != y_pred.size())
        throw std::invalid_argument("point_metrics needs equal nonzero lengths");

    double abs_sum = 0.0, sq_sum = 0.0, ape_sum = 0.0, mean = 0.0;
    bool mape_defined = true;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y_pred[i] - y_true[i];
        abs_sum += std::fabs(e);
        sq_sum += e * e;
        if (y_true[i] == 0.0)
            mape_defined = false;
        else
            ape_sum += std::fabs(e / y_true[i]);
        mean += y_true[i];
    }
    mean /= static_cast<double>(n);
    double sst = 0.0;
    for (double v : y_true) sst += (v - mean) * (v - mean);

    PointMetrics m;
    m.mae = abs_sum / static_cast<double>(n);
    m.rmse = std::sqrt(sq_sum / static_cast<double>(n));
    m.mape = mape_defined ? ape_sum / static_cast<double>(n)
                          : std::numeric_limits<double>::quiet_NaN();
    m.r2 = sst > 0.0 ? 1.0 - sq_sum / sst : (sq_sum == 0.0 ? 1.0 : -std::numeric_limits<double>::infinity());
    return m;
}

double roc_auc(const std::vector<std::uint8_t>& b_true, const std::vector<double>& scores) {
    const std::size_t n = b_true.size();
    if (n == 0 || n != scores.size()) throw std::invalid_argument("roc_auc length mismatch");
    std::size_t n_pos = 0;
    for (auto b : b_true) n_pos += b ? 1 : 0;
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw std::runtime_error("AUC undefined: only one class present");

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Sum of average ranks of the positives (ranks are 1-based; ties share
    // the mean rank of their block).
    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[idx[j]] == scores[idx[i]]) ++j;
        const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (std::size_t t = i; t < j; ++t)
            if (b_true[idx[t]]) pos_rank_sum += avg_rank;
        i = j;
    }
    const double np = static_cast<double>(n_pos);
    return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

double log_loss(const std::vector<std::uint8_t>& b_true, const std::vector<double>& p) {
    const std::size_t n = b_true.size();
    if (n == 0 || n != p.size()) throw std::invalid_argument("log_loss length mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double q = std::clamp(p[i], 1e-15, 1.0 - 1e-15);
        sum -= b_true[i] ? std::log(q) : std::log1p(-q);
    }
    return sum / static_cast<double>(n);
}

}  // namespace excast
