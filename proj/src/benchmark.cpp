#include "excast/benchmark.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "excast/ensemble.hpp"
#include "excast/forest.hpp"
#include "excast/logistic.hpp"
#include "excast/metrics.hpp"
#include "excast/rng.hpp"
#include "excast/smote.hpp"

namespace excast {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xffu;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void append_number(std::string& out, double v) {
    if (std::isnan(v)) return;  // empty cell
    char buf[40];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    out.append(buf, p);
}

}  // namespace

void CvConfig::validate() const {
    if (folds < 1) throw std::invalid_argument("fold count must be >= 1");
    if (train_frac <= 0 || test_frac <= 0 || train_frac + test_frac > 1.0)
        throw std::invalid_argument("train/test fractions must be positive and sum to <= 1");
}

std::vector<FoldSpec> monte_carlo_splits(std::size_t n, const CvConfig& cfg) {
    cfg.validate();
    const std::size_t n_train = static_cast<std::size_t>(
        std::llround(cfg.train_frac * static_cast<double>(n)));
    const std::size_t n_test = static_cast<std::size_t>(
        std::llround(cfg.test_frac * static_cast<double>(n)));
    if (n_train < 1 || n_test < 1 || n_train + n_test > n)
        throw std::invalid_argument("dataset too small for the requested fractions");

    std::mt19937_64 gen(rng::mix(cfg.seed));
    std::vector<FoldSpec> folds;
    folds.reserve(static_cast<std::size_t>(cfg.folds));
    const std::size_t span = n - n_test - n_train + 1;  // feasible cut positions
    for (int f = 0; f < cfg.folds; ++f) {
        const std::size_t cut = n_train + rng::bounded(gen, span);
        FoldSpec fold;
        fold.fold_index = f;
        fold.train_begin = cut - n_train;
        fold.train_end = cut;
        fold.test_begin = cut;
        fold.test_end = cut + n_test;
        folds.push_back(fold);
    }
    return folds;
}

std::string prob_source_name(ProbSource s) {
    switch (s) {
        case ProbSource::Classifier: return "classifier";
        case ProbSource::Cdf: return "cdf";
        case ProbSource::Direct: return "direct";
    }
    throw std::logic_error("unknown probability source");
}

ProbSource prob_source_from_name(const std::string& name) {
    if (name == "classifier") return ProbSource::Classifier;
    if (name == "cdf") return ProbSource::Cdf;
    if (name == "direct") return ProbSource::Direct;
    throw std::invalid_argument("unknown probability source: '" + name + "'");
}

void MethodSpec::validate() const {
    if (id.empty()) throw std::invalid_argument("method id must be nonempty");
    model.validate();
    if (source == ProbSource::Classifier) {
        if (!family_is_classifier(model.family))
            throw std::invalid_argument("method '" + id + "': classifier source needs a classifier family");
    } else {
        if (!hre && family_is_classifier(model.family))
            throw std::invalid_argument("method '" + id + "': regression source needs a regressor family");
        if (source == ProbSource::Direct && !hre && model.family != ModelFamily::ForestRegressor)
            throw std::invalid_argument("method '" + id + "': direct source needs an ensemble model");
    }
    if (validation_fraction <= 0 || validation_fraction >= 1)
        throw std::invalid_argument("validation_fraction must lie in (0, 1)");
    if (smote_k < 1) throw std::invalid_argument("smote_k must be >= 1");
    for (const auto& m : members) m.validate();
}

nlohmann::json MethodSpec::to_json() const {
    nlohmann::json j = {
        {"id", id},
        {"source", prob_source_name(source)},
        {"model", model.to_json()},
        {"smote", smote},
        {"smote_k", smote_k},
        {"hre", hre},
        {"validation_fraction", validation_fraction},
        {"location_mode",
         location_mode == ExceedanceConfig::LocationMode::Literal ? "literal" : "mean_centered"},
    };
    if (!members.empty()) {
        nlohmann::json ms = nlohmann::json::array();
        for (const auto& m : members) ms.push_back(m.to_json());
        j["members"] = std::move(ms);
    }
    return j;
}

MethodSpec MethodSpec::from_json(const nlohmann::json& j) {
    MethodSpec s;
    s.id = j.at("id").get<std::string>();
    s.source = prob_source_from_name(j.at("source").get<std::string>());
    if (j.contains("model")) s.model = ModelSpec::from_json(j.at("model"));
    s.smote = j.value("smote", false);
    s.smote_k = j.value("smote_k", 5);
    s.hre = j.value("hre", false);
    s.validation_fraction = j.value("validation_fraction", 0.2);
    const std::string loc = j.value("location_mode", std::string("literal"));
    if (loc == "literal")
        s.location_mode = ExceedanceConfig::LocationMode::Literal;
    else if (loc == "mean_centered")
        s.location_mode = ExceedanceConfig::LocationMode::MeanCentered;
    else
        throw std::invalid_argument("unknown location_mode: '" + loc + "'");
    if (j.contains("members"))
        for (const auto& mj : j.at("members")) s.members.push_back(ModelSpec::from_json(mj));
    s.validate();
    return s;
}

double BenchmarkResult::mean_auc(const std::string& method, int horizon) const {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& r : reports)
        if (r.method == method && r.horizon == horizon && !std::isnan(r.auc)) {
            sum += r.auc;
            ++count;
        }
    return count > 0 ? sum / static_cast<double>(count) : kNaN;
}

namespace {

struct FoldOutput {
    std::vector<MetricReport> reports;
    double tau = 0.0;
    WeibullParams weibull;
    std::uint64_t split_hash = 0;
    int skipped_auc = 0;
};

std::vector<std::size_t> range_indices(std::size_t begin, std::size_t end) {
    std::vector<std::size_t> idx(end - begin);
    std::iota(idx.begin(), idx.end(), begin);
    return idx;
}

FoldOutput evaluate_fold(const SupervisedDataset& full, const FoldSpec& fold,
                         const ThresholdSpec& thr_spec, const std::vector<MethodSpec>& roster,
                         std::uint64_t harness_seed) {
    FoldOutput out;
    out.split_hash = fnv1a(fnv1a(fnv1a(0xcbf29ce484222325ULL, fold.train_begin), fold.test_begin),
                           fold.test_end);

    // Training values of the target series: its most recent lag column.
    const std::size_t value_col = full.target_lag_columns.front();
    std::vector<double> train_values;
    train_values.reserve(fold.train_end - fold.train_begin);
    for (std::size_t i = fold.train_begin; i < fold.train_end; ++i)
        train_values.push_back(full.X[i][value_col]);

    out.tau = compute_threshold(train_values, thr_spec);

    SupervisedDataset train = full.subset(range_indices(fold.train_begin, fold.train_end));
    SupervisedDataset test = full.subset(range_indices(fold.test_begin, fold.test_end));
    train.set_threshold(out.tau);
    test.set_threshold(out.tau);
    train = filter_ongoing_exceedance(train);
    test = filter_ongoing_exceedance(test);
    if (train.rows() == 0 || test.rows() == 0)
        throw std::runtime_error("fold has no usable rows after exceedance filtering");

    std::vector<double> positive_values;
    for (double v : train_values)
        if (v > 0.0) positive_values.push_back(v);
    out.weibull = fit_weibull_mle(positive_values);

    for (const auto& method : roster) {
        for (std::size_t slot = 0; slot < full.horizons.size(); ++slot) {
            const int h = full.horizons[slot];
            MetricReport rep;
            rep.method = method.id;
            rep.horizon = h;
            rep.fold = fold.fold_index;
            rep.mae = rep.rmse = rep.mape = rep.r2 = rep.auc = rep.log_loss = kNaN;

            const auto& b_test = test.b[slot];
            bool test_both_classes = false;
            {
                bool t0 = false, t1 = false;
                for (auto v : b_test) (v ? t1 : t0) = true;
                test_both_classes = t0 && t1;
            }

            std::vector<double> probs(test.rows());
            const std::uint64_t cell_seed =
                rng::mix(harness_seed ^ rng::mix(static_cast<std::uint64_t>(fold.fold_index) + 1) ^
                         rng::mix(static_cast<std::uint64_t>(h)));

            if (method.source == ProbSource::Classifier) {
                bool c0 = false, c1 = false;
                for (auto v : train.b[slot]) (v ? c1 : c0) = true;
                if (!c0 || !c1) {
                    ++out.skipped_auc;
                    out.reports.push_back(rep);
                    continue;
                }
                ModelSpec spec = method.model;
                spec.horizon = h;
                spec.seed = rng::mix(method.model.seed ^ cell_seed);
                std::unique_ptr<Model> clf;
                if (method.smote) {
                    const auto res =
                        smote_resample(train.X, train.b[slot], method.smote_k, spec.seed);
                    if (spec.family == ModelFamily::Logistic) {
                        clf = LogisticModel::fit(res.X, res.b, spec, train.feature_names);
                    } else {
                        std::vector<double> yb(res.b.begin(), res.b.end());
                        clf = ForestModel::fit(res.X, yb, true, spec, train.feature_names);
                    }
                } else {
                    SupervisedDataset tmp = train;
                    clf = fit_model(tmp, spec);
                }
                for (std::size_t i = 0; i < test.rows(); ++i) probs[i] = clf->predict(test.X[i]);
            } else {
                ModelSpec spec = method.model;
                spec.horizon = h;
                spec.seed = rng::mix(method.model.seed ^ cell_seed);
                std::vector<double> y_hat(test.rows());
                std::vector<std::vector<double>> member_forecasts;

                if (method.hre) {
                    auto specs = method.members.empty() ? default_ensemble_specs(spec.seed)
                                                        : method.members;
                    const EnsembleModel hre =
                        EnsembleModel::fit(train, specs, method.validation_fraction, h);
                    for (std::size_t i = 0; i < test.rows(); ++i) {
                        const auto members = hre.predict_members(test.X[i]);
                        y_hat[i] = std::accumulate(members.begin(), members.end(), 0.0) /
                                   static_cast<double>(members.size());
                        if (method.source == ProbSource::Direct)
                            member_forecasts.push_back(members);
                    }
                } else {
                    const auto model = fit_model(train, spec);
                    for (std::size_t i = 0; i < test.rows(); ++i)
                        y_hat[i] = model->predict(test.X[i]);
                    if (method.source == ProbSource::Direct) {
                        const auto* forest = dynamic_cast<const ForestModel*>(model.get());
                        for (std::size_t i = 0; i < test.rows(); ++i)
                            member_forecasts.push_back(forest->member_predictions(test.X[i]));
                    }
                }

                const auto pm = point_metrics(test.y[slot], y_hat);
                rep.mae = pm.mae;
                rep.rmse = pm.rmse;
                rep.mape = pm.mape;
                rep.r2 = pm.r2;

                if (method.source == ProbSource::Cdf) {
                    ExceedanceConfig ecfg{method.location_mode, out.tau};
                    for (std::size_t i = 0; i < test.rows(); ++i)
                        probs[i] = exceedance_from_forecast(y_hat[i], ecfg, out.weibull, h).p;
                } else {
                    for (std::size_t i = 0; i < test.rows(); ++i)
                        probs[i] = exceedance_direct(member_forecasts[i], out.tau, h).p;
                }
            }

            rep.log_loss = log_loss(b_test, probs);
            if (test_both_classes)
                rep.auc = roc_auc(b_test, probs);
            else
                ++out.skipped_auc;
            out.reports.push_back(rep);
        }
    }
    return out;
}

}  // namespace

BenchmarkResult run_benchmark(const TimeSeriesFrame& frame, const EmbeddingConfig& emb_cfg,
                              const ThresholdSpec& thr_spec,
                              const std::vector<MethodSpec>& roster, const CvConfig& cv_cfg,
                              double rope_halfwidth) {
    if (roster.empty()) throw std::invalid_argument("method roster must be nonempty");
    for (const auto& m : roster) m.validate();
    cv_cfg.validate();

    // Embedding and fold layout are shared by every method; per-fold
    // thresholds are recomputed from each fold's training block.
    const SupervisedDataset full = embed(frame, emb_cfg, ThresholdSpec::fixed(0.0));
    const auto folds = monte_carlo_splits(full.rows(), cv_cfg);

    std::vector<std::future<FoldOutput>> futures;
    futures.reserve(folds.size());
    for (const auto& fold : folds)
        futures.push_back(std::async(std::launch::async, [&, fold] {
            return evaluate_fold(full, fold, thr_spec, roster, cv_cfg.seed);
        }));

    BenchmarkResult result;
    for (auto& f : futures) {
        FoldOutput out = f.get();
        result.fold_taus.push_back(out.tau);
        result.fold_weibull.push_back(out.weibull);
        result.split_hashes.push_back(out.split_hash);
        result.skipped_auc_cells += out.skipped_auc;
        for (auto& r : out.reports) result.reports.push_back(std::move(r));
    }

    // Pairwise comparisons on relative per-horizon mean-AUC differences.
    const double rho = cv_cfg.test_frac / (cv_cfg.train_frac + cv_cfg.test_frac);
    if (full.horizons.size() >= 2) {
        for (std::size_t a = 0; a < roster.size(); ++a)
            for (std::size_t b = a + 1; b < roster.size(); ++b) {
                std::vector<double> diffs;
                for (int h : full.horizons) {
                    const double auc_a = result.mean_auc(roster[a].id, h);
                    const double auc_b = result.mean_auc(roster[b].id, h);
                    if (!std::isnan(auc_a) && !std::isnan(auc_b) && auc_b != 0.0)
                        diffs.push_back((auc_a - auc_b) / auc_b);
                }
                if (diffs.size() < 2) continue;
                BayesComparison cmp = bayes_correlated_ttest(diffs, rho, rope_halfwidth);
                cmp.method_a = roster[a].id;
                cmp.method_b = roster[b].id;
                result.comparisons.push_back(cmp);
            }
    }
    return result;
}

void write_metrics_csv(const BenchmarkResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write metrics CSV: " + path);
    out << "method,horizon,fold,mae,rmse,mape,r2,auc,log_loss\n";
    for (const auto& r : result.reports) {
        std::string line = r.method;
        line += ',';
        line += std::to_string(r.horizon);
        line += ',';
        line += std::to_string(r.fold);
        for (double v : {r.mae, r.rmse, r.mape, r.r2, r.auc, r.log_loss}) {
            line += ',';
            append_number(line, v);
        }
        line += '\n';
        out << line;
    }
}

nlohmann::json summarize_benchmark(const BenchmarkResult& result,
                                   const std::vector<MethodSpec>& roster,
                                   const std::vector<int>& horizons) {
    nlohmann::json summary;
    nlohmann::json methods = nlohmann::json::array();
    for (const auto& m : roster) {
        nlohmann::json per_h = nlohmann::json::array();
        for (int h : horizons) {
            const double auc = result.mean_auc(m.id, h);
            double ll_sum = 0.0;
            std::size_t ll_n = 0;
            for (const auto& r : result.reports)
                if (r.method == m.id && r.horizon == h && !std::isnan(r.log_loss)) {
                    ll_sum += r.log_loss;
                    ++ll_n;
                }
            nlohmann::json cell = {{"horizon", h}};
            if (!std::isnan(auc)) cell["mean_auc"] = auc;
            if (ll_n > 0) cell["mean_log_loss"] = ll_sum / static_cast<double>(ll_n);
            per_h.push_back(std::move(cell));
        }
        methods.push_back({{"id", m.id}, {"by_horizon", std::move(per_h)}});
    }
    summary["methods"] = std::move(methods);

    nlohmann::json cmps = nlohmann::json::array();
    for (const auto& c : result.comparisons)
        cmps.push_back({{"method_a", c.method_a},
                        {"method_b", c.method_b},
                        {"p_left", c.p_left},
                        {"p_rope", c.p_rope},
                        {"p_right", c.p_right},
                        {"rope_halfwidth", c.rope_halfwidth}});
    summary["bayes_comparisons"] = std::move(cmps);
    summary["fold_taus"] = result.fold_taus;
    nlohmann::json wb = nlohmann::json::array();
    for (const auto& w : result.fold_weibull)
        wb.push_back({{"shape", w.shape}, {"scale", w.scale}});
    summary["fold_weibull"] = std::move(wb);
    summary["split_hashes"] = result.split_hashes;
    summary["skipped_auc_cells"] = result.skipped_auc_cells;
    return summary;
}

}  // namespace excast
