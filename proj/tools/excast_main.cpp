// Command-line surface for the exceedance forecasting pipeline:
// synthesize or ingest hourly series, prepare supervised datasets, train
// per-horizon models, estimate exceedance probabilities, and run the
// Monte Carlo benchmark. All randomness is seeded from the config so
// identical invocations produce byte-identical artifacts.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "excast/benchmark.hpp"
#include "excast/dataset.hpp"
#include "excast/ensemble.hpp"
#include "excast/forest.hpp"
#include "excast/model.hpp"
#include "excast/timeseries.hpp"
#include "excast/weibull.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace excast;

namespace {

constexpr int kExitConfig = 2;      // bad config, missing file, invalid input
constexpr int kExitDegenerate = 3;  // degenerate training data (e.g. one class)

struct RunConfig {
    std::uint64_t seed = 0;
    json input;
    EmbeddingConfig embedding;
    ThresholdSpec threshold;
    ExceedanceConfig::LocationMode location_mode = ExceedanceConfig::LocationMode::Literal;
    std::vector<MethodSpec> methods;
    CvConfig cv;
    std::string output_dir = "out";
};

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    json j;
    in >> j;
    return j;
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out << text;
}

SyntheticConfig parse_synthetic(const json& j) {
    SyntheticConfig cfg;
    cfg.length = j.value("length", cfg.length);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("ar_coefficients"))
        cfg.ar_coefficients = j.at("ar_coefficients").get<std::vector<double>>();
    cfg.seasonal_amplitude = j.value("seasonal_amplitude", cfg.seasonal_amplitude);
    cfg.seasonal_period_hours = j.value("seasonal_period_hours", cfg.seasonal_period_hours);
    cfg.noise_shape = j.value("noise_shape", cfg.noise_shape);
    cfg.noise_scale = j.value("noise_scale", cfg.noise_scale);
    if (j.contains("covariate_coupling"))
        cfg.covariate_coupling = j.at("covariate_coupling").get<std::vector<double>>();
    cfg.target_channel = j.value("target_channel", cfg.target_channel);
    return cfg;
}

RunConfig parse_config(const json& j) {
    RunConfig cfg;
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.input = j.at("input");

    const json& emb = j.at("embedding");
    cfg.embedding.lag_count = emb.value("lag_count", 6);
    cfg.embedding.horizons = emb.at("horizons").get<std::vector<int>>();
    cfg.embedding.include_day_of_year = emb.value("include_day_of_year", true);
    cfg.embedding.target_channel = emb.at("target_channel").get<std::string>();
    cfg.embedding.validate();

    if (j.contains("threshold")) {
        const json& t = j.at("threshold");
        const std::string mode = t.value("mode", std::string("percentile"));
        if (mode == "percentile") {
            cfg.threshold.mode = ThresholdSpec::Mode::Percentile;
            cfg.threshold.percentile = t.value("percentile", 99.0);
        } else if (mode == "fixed") {
            cfg.threshold.mode = ThresholdSpec::Mode::Fixed;
            cfg.threshold.fixed_value = t.at("value").get<double>();
        } else {
            throw std::invalid_argument("unknown threshold mode: '" + mode + "'");
        }
    }

    if (j.contains("exceedance")) {
        const std::string loc = j.at("exceedance").value("location_mode", std::string("literal"));
        if (loc == "literal")
            cfg.location_mode = ExceedanceConfig::LocationMode::Literal;
        else if (loc == "mean_centered")
            cfg.location_mode = ExceedanceConfig::LocationMode::MeanCentered;
        else
            throw std::invalid_argument("unknown location_mode: '" + loc + "'");
    }

    if (j.contains("methods"))
        for (const auto& mj : j.at("methods")) cfg.methods.push_back(MethodSpec::from_json(mj));

    if (j.contains("cv")) {
        const json& c = j.at("cv");
        cfg.cv.folds = c.value("folds", 10);
        cfg.cv.train_frac = c.value("train_frac", 0.5);
        cfg.cv.test_frac = c.value("test_frac", 0.2);
        cfg.cv.seed = c.value("seed", cfg.seed);
        cfg.cv.validate();
    } else {
        cfg.cv.seed = cfg.seed;
    }

    cfg.output_dir = j.value("output_dir", std::string("out"));
    return cfg;
}

TimeSeriesFrame load_frame(const RunConfig& cfg) {
    const std::string type = cfg.input.at("type").get<std::string>();
    if (type == "synthetic") {
        SyntheticConfig scfg = parse_synthetic(cfg.input.value("synthetic", json::object()));
        return generate_synthetic(scfg);
    }
    if (type == "csv") {
        const std::string path = cfg.input.at("path").get<std::string>();
        if (!fs::exists(path)) throw std::invalid_argument("CSV file does not exist: " + path);
        CsvSchema schema;
        const json& sj = cfg.input.at("schema");
        schema.timestamp_column = sj.value("timestamp_column", std::string("timestamp"));
        schema.channel_columns = sj.at("channels").get<std::vector<std::string>>();
        schema.target_channel = sj.at("target_channel").get<std::string>();
        return load_csv(path, schema);
    }
    throw std::invalid_argument("unknown input type: '" + type + "'");
}

json dataset_to_json(const SupervisedDataset& ds) {
    return {{"format_version", 1},
            {"tau", ds.tau},
            {"feature_names", ds.feature_names},
            {"horizons", ds.horizons},
            {"target_lag_columns", ds.target_lag_columns},
            {"origins", ds.origins},
            {"X", ds.X},
            {"y", ds.y},
            {"b", ds.b}};
}

SupervisedDataset dataset_from_json(const json& j) {
    if (j.value("format_version", 0) != 1)
        throw std::runtime_error("unsupported dataset document version");
    SupervisedDataset ds;
    ds.tau = j.at("tau").get<double>();
    ds.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    ds.horizons = j.at("horizons").get<std::vector<int>>();
    ds.target_lag_columns = j.at("target_lag_columns").get<std::vector<std::size_t>>();
    ds.origins = j.at("origins").get<std::vector<std::size_t>>();
    ds.X = j.at("X").get<std::vector<std::vector<double>>>();
    ds.y = j.at("y").get<std::vector<std::vector<double>>>();
    ds.b = j.at("b").get<std::vector<std::vector<std::uint8_t>>>();
    return ds;
}

int cmd_synth(const RunConfig& cfg) {
    fs::create_directories(cfg.output_dir);
    SyntheticConfig scfg = parse_synthetic(cfg.input.value("synthetic", json::object()));
    const TimeSeriesFrame frame = generate_synthetic(scfg);
    const fs::path path = fs::path(cfg.output_dir) / "synthetic.csv";
    write_csv(frame, path.string());
    std::cout << json{{"rows", frame.length()},
                      {"channels", frame.channel_names},
                      {"path", path.string()}}
                     .dump(2)
              << "\n";
    return 0;
}

int cmd_prepare(const RunConfig& cfg) {
    fs::create_directories(cfg.output_dir);
    const TimeSeriesFrame frame = load_frame(cfg);
    SupervisedDataset ds = embed(frame, cfg.embedding, cfg.threshold);
    ds = filter_ongoing_exceedance(ds);

    const fs::path path = fs::path(cfg.output_dir) / "dataset.json";
    write_text_file(path, dataset_to_json(ds).dump(2) + "\n");

    json balance = json::object();
    for (std::size_t h = 0; h < ds.horizons.size(); ++h) {
        std::size_t pos = 0;
        for (auto v : ds.b[h]) pos += v ? 1 : 0;
        balance["h" + std::to_string(ds.horizons[h])] = {
            {"positive", pos}, {"negative", ds.rows() - pos}};
    }
    std::cout << json{{"rows", ds.rows()},
                      {"features", ds.cols()},
                      {"tau", ds.tau},
                      {"class_balance", balance},
                      {"path", path.string()}}
                     .dump(2)
              << "\n";
    return 0;
}

int cmd_train(const RunConfig& cfg) {
    const fs::path dataset_path = fs::path(cfg.output_dir) / "dataset.json";
    if (!fs::exists(dataset_path))
        throw std::invalid_argument("prepared dataset not found: " + dataset_path.string() +
                                    " (run `prepare` first)");
    const SupervisedDataset ds = dataset_from_json(load_json_file(dataset_path.string()));
    if (cfg.methods.empty()) throw std::invalid_argument("config lists no methods to train");

    const fs::path model_dir = fs::path(cfg.output_dir) / "models";
    fs::create_directories(model_dir);

    // Weibull parameters come from the training target values: the most
    // recent lag of the target channel is the series value at the origin.
    const std::size_t value_col = ds.target_lag_columns.front();
    std::vector<double> train_values;
    for (const auto& row : ds.X)
        if (row[value_col] > 0.0) train_values.push_back(row[value_col]);
    const WeibullParams wp = fit_weibull_mle(train_values);
    write_text_file(model_dir / "weibull.json",
                    json{{"shape", wp.shape}, {"scale", wp.scale}}.dump(2) + "\n");

    json index = json::array();
    for (const auto& method : cfg.methods) {
        for (int h : ds.horizons) {
            const fs::path path =
                model_dir / (method.id + "_h" + std::to_string(h) + ".json");
            if (method.hre) {
                const auto specs = method.members.empty()
                                       ? default_ensemble_specs(method.model.seed ^ cfg.seed)
                                       : method.members;
                const EnsembleModel hre =
                    EnsembleModel::fit(ds, specs, method.validation_fraction, h);
                write_text_file(path, hre.to_json().dump(2) + "\n");
            } else {
                ModelSpec spec = method.model;
                spec.horizon = h;
                const auto model = fit_model(ds, spec);
                write_text_file(path, model->to_json().dump(2) + "\n");
            }
            index.push_back({{"method", method.id},
                             {"horizon", h},
                             {"source", prob_source_name(method.source)},
                             {"hre", method.hre},
                             {"file", path.filename().string()}});
        }
    }
    write_text_file(model_dir / "index.json", index.dump(2) + "\n");
    std::cout << json{{"models", index.size()}, {"dir", model_dir.string()}}.dump(2) << "\n";
    return 0;
}

int cmd_forecast(const RunConfig& cfg, const std::string& at,
                 const std::optional<std::string>& curve_arg) {
    const fs::path dataset_path = fs::path(cfg.output_dir) / "dataset.json";
    const fs::path model_dir = fs::path(cfg.output_dir) / "models";
    if (!fs::exists(dataset_path) || !fs::exists(model_dir / "index.json"))
        throw std::invalid_argument("dataset or models missing under " + cfg.output_dir +
                                    " (run `prepare` and `train` first)");
    const SupervisedDataset ds = dataset_from_json(load_json_file(dataset_path.string()));
    const json wj = load_json_file((model_dir / "weibull.json").string());
    const WeibullParams wp{wj.at("shape").get<double>(), wj.at("scale").get<double>()};

    std::size_t row;
    if (at == "latest") {
        row = ds.rows() - 1;
    } else {
        const long long parsed = std::stoll(at);
        if (parsed < 0 || static_cast<std::size_t>(parsed) >= ds.rows())
            throw std::invalid_argument("row index out of range: " + at);
        row = static_cast<std::size_t>(parsed);
    }

    std::vector<double> curve_taus;
    if (curve_arg) {
        std::stringstream ss(*curve_arg);
        std::string tok;
        while (std::getline(ss, tok, ',')) curve_taus.push_back(std::stod(tok));
    }

    const json index = load_json_file((model_dir / "index.json").string());
    json records = json::array();
    for (const auto& entry : index) {
        const int h = entry.at("horizon").get<int>();
        const ProbSource source = prob_source_from_name(entry.at("source").get<std::string>());
        const fs::path file = model_dir / entry.at("file").get<std::string>();
        const json mj = load_json_file(file.string());

        json rec = {{"method", entry.at("method")}, {"horizon", h}};
        double y_hat = 0.0;
        if (entry.at("hre").get<bool>()) {
            const EnsembleModel hre = EnsembleModel::from_json(mj);
            const auto members = hre.predict_members(ds.X[row]);
            y_hat = hre.predict(ds.X[row]);
            rec["y_hat"] = y_hat;
            if (source == ProbSource::Direct) {
                rec["p"] = exceedance_direct(members, ds.tau, h).p;
                rec["source"] = "direct";
            }
        } else {
            const auto model = model_from_json(mj);
            const double out = model->predict(ds.X[row]);
            if (model->is_classifier()) {
                rec["p"] = out;
                rec["source"] = "classifier";
            } else {
                y_hat = out;
                rec["y_hat"] = y_hat;
            }
        }
        if (source == ProbSource::Cdf) {
            ExceedanceConfig ecfg{cfg.location_mode, ds.tau};
            rec["p"] = exceedance_from_forecast(y_hat, ecfg, wp, h).p;
            rec["source"] = "cdf";
        }
        if (!curve_taus.empty() && source == ProbSource::Cdf) {
            ExceedanceConfig ecfg{cfg.location_mode, ds.tau};
            const auto curve = exceedance_curve(y_hat, curve_taus, ecfg, wp);
            const fs::path cpath =
                fs::path(cfg.output_dir) /
                ("curve_" + entry.at("method").get<std::string>() + "_h" + std::to_string(h) +
                 ".csv");
            std::string text = "tau,probability\n";
            for (const auto& [tau, p] : curve)
                text += std::to_string(tau) + "," + std::to_string(p) + "\n";
            write_text_file(cpath, text);
            rec["curve_file"] = cpath.string();
        }
        records.push_back(std::move(rec));
    }
    write_text_file(fs::path(cfg.output_dir) / "forecast.json", records.dump(2) + "\n");
    std::cout << records.dump(2) << "\n";
    return 0;
}

int cmd_evaluate(const RunConfig& cfg) {
    if (cfg.methods.empty()) throw std::invalid_argument("config lists no methods to evaluate");
    fs::create_directories(cfg.output_dir);
    const TimeSeriesFrame frame = load_frame(cfg);
    const BenchmarkResult result =
        run_benchmark(frame, cfg.embedding, cfg.threshold, cfg.methods, cfg.cv);
    const fs::path metrics_path = fs::path(cfg.output_dir) / "metrics.csv";
    write_metrics_csv(result, metrics_path.string());
    const json summary = summarize_benchmark(result, cfg.methods, cfg.embedding.horizons);
    const fs::path summary_path = fs::path(cfg.output_dir) / "summary.json";
    write_text_file(summary_path, summary.dump(2) + "\n");
    std::cout << json{{"metrics", metrics_path.string()},
                      {"summary", summary_path.string()},
                      {"reports", result.reports.size()},
                      {"skipped_auc_cells", result.skipped_auc_cells}}
                     .dump(2)
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exceedance probability forecasting toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    std::optional<std::uint64_t> seed_override;
    std::string horizons_override;
    std::string at = "latest";
    std::optional<std::string> curve_arg;

    for (const char* name : {"synth", "prepare", "train", "forecast", "evaluate"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON run configuration")->required();
        sub->add_option("--out", out_override, "output directory override");
        auto* seed_opt = sub->add_option("--seed", "seed override");
        seed_opt->each([&](const std::string& s) { seed_override = std::stoull(s); });
        sub->add_option("--horizons", horizons_override,
                        "comma-separated horizon override");
        if (std::string(name) == "forecast") {
            sub->add_option("--at", at, "row index or 'latest'");
            auto* copt = sub->add_option("--curve", "comma-separated thresholds");
            copt->each([&](const std::string& s) { curve_arg = s; });
        }
    }

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = parse_config(load_json_file(config_path));
        if (!out_override.empty()) cfg.output_dir = out_override;
        if (seed_override) {
            cfg.seed = *seed_override;
            cfg.cv.seed = *seed_override;
        }
        if (!horizons_override.empty()) {
            std::vector<int> hs;
            std::stringstream ss(horizons_override);
            std::string tok;
            while (std::getline(ss, tok, ',')) hs.push_back(std::stoi(tok));
            cfg.embedding.horizons = hs;
            cfg.embedding.validate();
        }

        const std::string cmd = app.get_subcommands().front()->get_name();
        if (cmd == "synth") return cmd_synth(cfg);
        if (cmd == "prepare") return cmd_prepare(cfg);
        if (cmd == "train") return cmd_train(cfg);
        if (cmd == "forecast") return cmd_forecast(cfg, at, curve_arg);
        if (cmd == "evaluate") return cmd_evaluate(cfg);
        std::cerr << "error: unknown command\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return std::string(e.what()).find("degenerate") != std::string::npos ? kExitDegenerate
                                                                             : kExitConfig;
    }
}
