#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "excast/bayes.hpp"
#include "excast/dataset.hpp"
#include "excast/model.hpp"
#include "excast/timeseries.hpp"
#include "excast/weibull.hpp"

namespace excast {

struct CvConfig {
    int folds = 10;
    double train_frac = 0.5;
    double test_frac = 0.2;
    std::uint64_t seed = 0;

    void validate() const;
};

/// One Monte Carlo fold: a contiguous training block immediately followed
/// by a contiguous test block. Half-open index intervals.
struct FoldSpec {
    int fold_index = 0;
    std::size_t train_begin = 0, train_end = 0;
    std::size_t test_begin = 0, test_end = 0;
};

/// Draws each fold's cut point uniformly from the feasible range;
/// deterministic given the seed. Folds may overlap one another.
std::vector<FoldSpec> monte_carlo_splits(std::size_t n, const CvConfig& cfg);

enum class ProbSource { Classifier, Cdf, Direct };

std::string prob_source_name(ProbSource s);
ProbSource prob_source_from_name(const std::string& name);

/// A benchmark entry: how to produce exceedance probabilities for one
/// method id. Classifier methods train on the binary target (optionally
/// SMOTE-balanced); cdf/direct methods train a regressor (a single model
/// or a trimmed heterogeneous ensemble).
struct MethodSpec {
    std::string id;
    ProbSource source = ProbSource::Cdf;
    ModelSpec model;
    bool smote = false;
    int smote_k = 5;
    bool hre = false;
    std::vector<ModelSpec> members;  // HRE roster; empty selects the default
    double validation_fraction = 0.2;
    ExceedanceConfig::LocationMode location_mode = ExceedanceConfig::LocationMode::Literal;

    void validate() const;
    nlohmann::json to_json() const;
    static MethodSpec from_json(const nlohmann::json& j);
};

struct MetricReport {
    std::string method;
    int horizon = 0;
    int fold = 0;
    double mae = 0, rmse = 0, mape = 0, r2 = 0;  // NaN for classifiers
    double auc = 0;                              // NaN when a class is absent
    double log_loss = 0;
};

struct BenchmarkResult {
    std::vector<MetricReport> reports;
    std::vector<BayesComparison> comparisons;
    std::vector<double> fold_taus;
    std::vector<WeibullParams> fold_weibull;
    std::vector<std::uint64_t> split_hashes;
    int skipped_auc_cells = 0;

    /// Mean AUC over folds with a defined value; NaN if none.
    double mean_auc(const std::string& method, int horizon) const;
};

BenchmarkResult run_benchmark(const TimeSeriesFrame& frame, const EmbeddingConfig& emb_cfg,
                              const ThresholdSpec& thr_spec,
                              const std::vector<MethodSpec>& roster, const CvConfig& cv_cfg,
                              double rope_halfwidth = 0.01);

void write_metrics_csv(const BenchmarkResult& result, const std::string& path);
nlohmann::json summarize_benchmark(const BenchmarkResult& result,
                                   const std::vector<MethodSpec>& roster,
                                   const std::vector<int>& horizons);

}  // namespace excast
