// curvecast command-line pipeline: ingest -> fit -> forecast -> evaluate,
// plus plot-data assembly and a synthetic-data generator for demos/tests.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "curvecast/eval.hpp"
#include "curvecast/ingest.hpp"
#include "curvecast/io_util.hpp"
#include "curvecast/model_io.hpp"
#include "curvecast/nsmodel.hpp"
#include "curvecast/synthetic.hpp"
#include "curvecast/uncertainty.hpp"

namespace fs = std::filesystem;
using namespace curvecast;

namespace {

constexpr const char* kVersion = "0.1.0";

struct RunConfig {
    std::string rates_path;
    std::string exposures_path;
    std::string sex = "female";
    std::string smooth = "off";        // on|off
    std::string lambda = "auto";       // auto|<value>
    double monotone_from = 65.0;
    std::string method = "standard";   // standard|weighted|both
    std::string kernel = "bartlett";
    std::string bandwidth = "auto";    // auto|<eta>
    std::string kappa = "auto";        // auto|<value>
    std::string components = "auto";   // auto|<K>
    std::string score_model = "arima";
    std::string kpss = "level";        // level|trend
    std::string criterion = "rmspe";
    int bootstrap_b = 1000;
    double alpha = 0.2;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int val_len = 30;
    int test_len = 30;
    int horizon = 30;
    int threads = 1;
    std::string out_dir = "out";
    std::string model_path;

    /// Canonical text form: sorted key=value lines. Hashed into every output.
    std::string canonical() const {
        std::ostringstream ss;
        ss << "alpha=" << format_double(alpha) << "\n"
           << "bandwidth=" << bandwidth << "\n"
           << "bootstrap_b=" << bootstrap_b << "\n"
           << "components=" << components << "\n"
           << "criterion=" << criterion << "\n"
           << "exposures=" << exposures_path << "\n"
           << "horizon=" << horizon << "\n"
           << "kappa=" << kappa << "\n"
           << "kernel=" << kernel << "\n"
           << "kpss=" << kpss << "\n"
           << "lambda=" << lambda << "\n"
           << "method=" << method << "\n"
           << "monotone_from=" << format_double(monotone_from) << "\n"
           << "rates=" << rates_path << "\n"
           << "score_model=" << score_model << "\n"
           << "seed=" << seed << "\n"
           << "sex=" << sex << "\n"
           << "smooth=" << smooth << "\n"
           << "test_len=" << test_len << "\n"
           << "val_len=" << val_len << "\n";
        return ss.str();
    }
    std::string hash() const { return fnv1a_hex(canonical()); }
};

std::map<std::string, std::string> load_config_file(const std::string& path) {
    std::ifstream file(path);
    if (!file) {
        throw ContractError("cannot open config file '" + path + "'");
    }
    std::map<std::string, std::string> entries;
    std::string line;
    int line_no = 0;
    while (std::getline(file, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos) {
                throw ContractError(path + ":" + std::to_string(line_no) +
                                    ": expected key = value");
            }
            continue;
        }
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return (a == std::string::npos) ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ContractError(path + ":" + std::to_string(line_no) + ": empty key");
        }
        entries[key] = value;
    }
    return entries;
}

void apply_config_entries(RunConfig& config,
                          const std::map<std::string, std::string>& entries) {
    for (const auto& [key, value] : entries) {
        if (key == "rates") config.rates_path = value;
        else if (key == "exposures") config.exposures_path = value;
        else if (key == "sex") config.sex = value;
        else if (key == "smooth") config.smooth = value;
        else if (key == "lambda") config.lambda = value;
        else if (key == "monotone_from") config.monotone_from = std::stod(value);
        else if (key == "method") config.method = value;
        else if (key == "kernel") config.kernel = value;
        else if (key == "bandwidth") config.bandwidth = value;
        else if (key == "kappa") config.kappa = value;
        else if (key == "components") config.components = value;
        else if (key == "score_model") config.score_model = value;
        else if (key == "kpss") config.kpss = value;
        else if (key == "criterion") config.criterion = value;
        else if (key == "bootstrap_b") config.bootstrap_b = std::stoi(value);
        else if (key == "alpha") config.alpha = std::stod(value);
        else if (key == "seed") { config.seed = std::stoull(value); config.seed_set = true; }
        else if (key == "val_len") config.val_len = std::stoi(value);
        else if (key == "test_len") config.test_len = std::stoi(value);
        else if (key == "horizon") config.horizon = std::stoi(value);
        else if (key == "threads") config.threads = std::stoi(value);
        else if (key == "out") config.out_dir = value;
        else if (key == "model") config.model_path = value;
        else throw ContractError("unknown config key '" + key + "'");
    }
}

/// Attach the shared flags to a subcommand, overriding config-file values.
void add_common_flags(CLI::App* cmd, RunConfig& config, std::string& config_path) {
    cmd->add_option("--config", config_path, "key = value configuration file");
    cmd->add_option("--rates", config.rates_path, "Mx_1x1 rates file");
    cmd->add_option("--exposures", config.exposures_path, "exposure file (same layout)");
    cmd->add_option("--sex", config.sex, "female|male|total");
    cmd->add_option("--smooth", config.smooth, "on|off pre-smoothing");
    cmd->add_option("--lambda", config.lambda, "auto or a fixed smoothing penalty");
    cmd->add_option("--monotone-from", config.monotone_from, "isotonic tail start age");
    cmd->add_option("--method", config.method, "standard|weighted|both");
    cmd->add_option("--kernel", config.kernel, "bartlett|parzen|flat_top");
    cmd->add_option("--bandwidth", config.bandwidth, "auto or a fixed eta");
    cmd->add_option("--kappa", config.kappa, "auto or a fixed weight decay");
    cmd->add_option("--components", config.components, "auto or a fixed stage-1 count");
    cmd->add_option("--score-model", config.score_model, "arima|ets|var");
    cmd->add_option("--kpss", config.kpss, "level|trend");
    cmd->add_option("--criterion", config.criterion,
                    "kappa selection criterion (rmspe|mape|cpd|interval_score)");
    cmd->add_option("--bootstrap-b", config.bootstrap_b, "bootstrap replicates");
    cmd->add_option("--alpha", config.alpha, "interval significance level");
    cmd->add_option("--seed", config.seed, "master seed (required for bootstrap runs)")
        ->each([&config](const std::string&) { config.seed_set = true; });
    cmd->add_option("--val-len", config.val_len, "validation block length");
    cmd->add_option("--test-len", config.test_len, "test block length");
    cmd->add_option("--horizon", config.horizon, "forecast horizon");
    cmd->add_option("--threads", config.threads, "worker threads");
    cmd->add_option("--out", config.out_dir, "output directory");
}

struct IngestedData {
    FunctionalTimeSeries fts;
    Eigen::MatrixXd smooth_weights;
    MortalityTable grouped;
};

IngestedData ingest_pipeline(const RunConfig& config) {
    if (config.rates_path.empty()) {
        throw ContractError("no rates file given (--rates or config `rates =`)");
    }
    if (!fs::exists(config.rates_path)) {
        throw ContractError("rates file does not exist: " + config.rates_path);
    }
    MortalityTable table = parse_mx_file(config.rates_path, parse_sex(config.sex));
    if (!config.exposures_path.empty()) {
        if (!fs::exists(config.exposures_path)) {
            throw ContractError("exposure file does not exist: " + config.exposures_path);
        }
        attach_exposures(table, config.exposures_path);
    }
    MortalityTable grouped = group_open_age(table, 95);
    FunctionalTimeSeries fts = to_log_fts(grouped);
    Eigen::MatrixXd weights = smoothing_weights(grouped);
    return IngestedData{std::move(fts), std::move(weights), std::move(grouped)};
}

PipelineConfig to_pipeline_config(const RunConfig& config, const IngestedData& data,
                                  bool weighted, double kappa_value) {
    PipelineConfig pipeline;
    pipeline.smooth = (config.smooth == "on");
    if (config.smooth != "on" && config.smooth != "off") {
        throw ContractError("--smooth expects on|off");
    }
    pipeline.smoothing.lambda = (config.lambda == "auto") ? -1.0 : std::stod(config.lambda);
    pipeline.smoothing.monotone_from_age = config.monotone_from;
    if (pipeline.smooth) {
        pipeline.smooth_weights = data.smooth_weights;
        pipeline.smoothing.weights_mode = data.grouped.exposures
                                              ? WeightsMode::exposure_based
                                              : WeightsMode::uniform;
    }
    pipeline.model.weighted = weighted;
    pipeline.model.kappa = kappa_value;
    pipeline.model.kernel = KernelSpec::parse(
        config.kernel, (config.bandwidth == "auto") ? 0.0 : std::stod(config.bandwidth));
    if (config.components != "auto") {
        pipeline.model.fixed_r = static_cast<Eigen::Index>(std::stol(config.components));
    }
    pipeline.score_model = parse_score_model(config.score_model);
    if (config.kpss == "trend") {
        pipeline.kpss_trend = true;
    } else if (config.kpss != "level") {
        throw ContractError("--kpss expects level|trend");
    }
    pipeline.bootstrap = config.bootstrap_b > 0;  // 0 = point forecasts only
    pipeline.bootstrap_b = config.bootstrap_b;
    pipeline.alpha = config.alpha;
    pipeline.seed = config.seed;
    pipeline.threads = config.threads;
    return pipeline;
}

std::vector<std::pair<std::string, std::string>> provenance(const RunConfig& config) {
    return {{"curvecast", kVersion},
            {"config_hash", config.hash()},
            {"seed", std::to_string(config.seed)},
            {"sex", config.sex}};
}

void write_file(const fs::path& path, const std::string& contents) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out << contents;
}

std::string fts_to_csv(const FunctionalTimeSeries& fts,
                       const std::vector<std::pair<std::string, std::string>>& header) {
    std::string out;
    for (const auto& [k, v] : header) out += "# " + k + ": " + v + "\n";
    out += "year";
    for (Eigen::Index j = 0; j < fts.p(); ++j) {
        out += ",a" + format_double(fts.grid().points()(j));
    }
    out += "\n";
    for (Eigen::Index t = 0; t < fts.n(); ++t) {
        out += std::to_string(fts.time_labels()[t]);
        for (Eigen::Index j = 0; j < fts.p(); ++j) {
            out += "," + format_double(fts.values()(t, j));
        }
        out += "\n";
    }
    return out;
}

std::string band_to_csv(const Eigen::MatrixXd& values, int first_year,
                        const FunctionalTimeSeries& fts,
                        const std::vector<std::pair<std::string, std::string>>& header) {
    std::string out;
    for (const auto& [k, v] : header) out += "# " + k + ": " + v + "\n";
    out += "year";
    for (Eigen::Index j = 0; j < fts.p(); ++j) {
        out += ",a" + format_double(fts.grid().points()(j));
    }
    out += "\n";
    for (Eigen::Index h = 0; h < values.rows(); ++h) {
        out += std::to_string(first_year + static_cast<int>(h));
        for (Eigen::Index j = 0; j < values.cols(); ++j) {
            out += "," + format_double(values(h, j));
        }
        out += "\n";
    }
    return out;
}

double resolve_kappa(const RunConfig& config, const IngestedData& data,
                     std::vector<std::string>& notes) {
    if (config.kappa != "auto") {
        return std::stod(config.kappa);
    }
    const SampleSplit split = make_split(data.fts.n(), config.val_len, config.test_len);
    PipelineConfig pipeline = to_pipeline_config(config, data, true, 0.5);
    const KappaResult result =
        optimize_kappa(data.fts, split, pipeline, parse_criterion(config.criterion));
    notes.push_back("kappa selected on the validation block: " +
                    format_double(result.kappa) + " (" +
                    std::to_string(result.evaluations) + " evaluations)");
    for (const std::string& w : result.warnings) notes.push_back(w);
    return result.kappa;
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

int cmd_ingest(const RunConfig& config) {
    const IngestedData data = ingest_pipeline(config);
    const auto header = provenance(config);
    write_file(fs::path(config.out_dir) / ("fts_" + config.sex + ".csv"),
               fts_to_csv(data.fts, header));
    std::cout << "ingested " << data.fts.n() << " years x " << data.fts.p()
              << " ages -> " << (fs::path(config.out_dir) / ("fts_" + config.sex + ".csv"))
              << "\n";
    return 0;
}

int cmd_fit(const RunConfig& config) {
    const IngestedData data = ingest_pipeline(config);
    const bool weighted = (config.method == "weighted");
    if (config.method == "both") {
        throw ContractError("fit expects method standard|weighted (evaluate handles both)");
    }
    std::vector<std::string> notes;
    const double kappa = weighted ? resolve_kappa(config, data, notes) : 0.0;
    PipelineConfig pipeline = to_pipeline_config(config, data, weighted, kappa);

    const FunctionalTimeSeries input = smooth_series(data.fts, pipeline);
    const TwoStageModel model = fit_two_stage(input, pipeline.model);

    std::map<std::string, std::string> metadata;
    metadata["curvecast"] = kVersion;
    metadata["config_hash"] = config.hash();
    metadata["seed"] = std::to_string(config.seed);
    metadata["sex"] = config.sex;
    metadata["score_model"] = config.score_model;
    metadata["method"] = weighted ? "weighted" : "standard";
    metadata["kpss"] = config.kpss;

    const fs::path model_path =
        fs::path(config.out_dir) / ("model_" + config.sex + "_" + metadata["method"] + ".json");
    write_file(model_path, model_to_json(model, metadata));

    std::string summary;
    summary += "curvecast " + std::string(kVersion) + " model summary\n";
    summary += "config_hash: " + config.hash() + "\n";
    summary += "seed: " + std::to_string(config.seed) + "\n";
    summary += "method: " + metadata["method"] + "\n";
    summary += "r_hat: " + std::to_string(model.r_hat()) + "\n";
    summary += "k_hat: " + std::to_string(model.k_hat()) + "\n";
    summary += "independence_p_value: " + format_double(model.independence_p_value) + "\n";
    if (weighted) summary += "kappa: " + format_double(model.kappa) + "\n";
    summary += "leading eigenvalues:";
    const Eigen::Index top = std::min<Eigen::Index>(6, model.stage1.eigenvalues.size());
    for (Eigen::Index i = 0; i < top; ++i) {
        summary += " " + format_double(model.stage1.eigenvalues(i));
    }
    summary += "\n";
    for (const std::string& note : notes) summary += "note: " + note + "\n";
    for (const std::string& warning : model.warnings) summary += "warning: " + warning + "\n";
    write_file(fs::path(config.out_dir) / ("summary_" + config.sex + ".txt"), summary);

    std::cout << "model written to " << model_path << " (r_hat = " << model.r_hat()
              << ", K_hat = " << model.k_hat() << ")\n";
    return 0;
}

int cmd_forecast(const RunConfig& config, bool with_bootstrap) {
    if (config.model_path.empty()) {
        throw ContractError("forecast needs --model <model.json>");
    }
    if (!fs::exists(config.model_path)) {
        throw ContractError("model file does not exist: " + config.model_path);
    }
    if (config.horizon <= 0) {
        throw ContractError("forecast needs --horizon >= 1");
    }
    std::ifstream in(config.model_path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const LoadedModel loaded = model_from_json(buffer.str());

    const ScoreModelKind kind =
        parse_score_model(loaded.metadata.count("score_model")
                              ? loaded.metadata.at("score_model")
                              : config.score_model);
    std::vector<std::string> sink;
    const ModelScoreForecasts scores =
        forecast_model_scores(loaded.model, kind, config.horizon, &sink,
                              config.kpss == "trend");
    const std::vector<Curve> points = point_forecast(loaded.model, scores, config.horizon);

    Eigen::MatrixXd point_matrix(config.horizon, loaded.model.grid().size());
    for (int h = 0; h < config.horizon; ++h) {
        point_matrix.row(h) = points[h].values.transpose();
    }
    const int last_year = loaded.model.residuals_Y.time_labels().back();
    auto header = provenance(config);
    header.emplace_back("model", config.model_path);

    const FunctionalTimeSeries& ref = loaded.model.residuals_Y;
    write_file(fs::path(config.out_dir) / ("forecast_" + config.sex + ".csv"),
               band_to_csv(point_matrix, last_year + 1, ref, header));

    if (with_bootstrap) {
        if (!config.seed_set) {
            throw ContractError("bootstrap runs require an explicit --seed");
        }
        const BootstrapEnsemble ensemble =
            bootstrap_forecasts(loaded.model, scores, config.horizon, config.bootstrap_b,
                                config.alpha, config.seed, config.threads);
        const PredictionBand band = quantile_band(ensemble);
        write_file(fs::path(config.out_dir) / ("forecast_" + config.sex + "_lower.csv"),
                   band_to_csv(band.lower, last_year + 1, ref, header));
        write_file(fs::path(config.out_dir) / ("forecast_" + config.sex + "_upper.csv"),
                   band_to_csv(band.upper, last_year + 1, ref, header));
    }
    std::cout << "forecasts written to " << config.out_dir << "\n";
    return 0;
}

int cmd_evaluate(const RunConfig& config) {
    if (!config.seed_set && config.bootstrap_b > 0) {
        throw ContractError("evaluate with bootstrap intervals requires --seed");
    }
    const IngestedData data = ingest_pipeline(config);
    const SampleSplit split = make_split(data.fts.n(), config.val_len, config.test_len);

    std::vector<std::string> methods;
    if (config.method == "both") {
        methods = {"standard", "weighted"};
    } else if (config.method == "standard" || config.method == "weighted") {
        methods = {config.method};
    } else {
        throw ContractError("--method expects standard|weighted|both");
    }

    std::vector<EvaluationReport> reports;
    std::vector<std::string> notes;
    for (const std::string& method : methods) {
        const bool weighted = (method == "weighted");
        const double kappa = weighted ? resolve_kappa(config, data, notes) : 0.0;
        PipelineConfig pipeline = to_pipeline_config(config, data, weighted, kappa);
        EvaluationReport report = expanding_window(data.fts, split, pipeline);
        reports.push_back(std::move(report));
    }

    const auto header = provenance(config);
    for (const EvaluationReport& report : reports) {
        write_file(fs::path(config.out_dir) /
                       ("report_" + config.sex + "_" + report.method + ".csv"),
                   report_to_csv(report, header));
        write_file(fs::path(config.out_dir) /
                       ("report_" + config.sex + "_" + report.method + ".json"),
                   report_to_json(report, header));
    }
    write_file(fs::path(config.out_dir) / ("plot_data_" + config.sex + ".csv"),
               plot_data_csv(reports, config.sex, header));

    if (reports.size() == 2) {
        // side-by-side comparison: horizon, metric, standard, weighted
        std::string cmp;
        for (const auto& [k, v] : header) cmp += "# " + k + ": " + v + "\n";
        cmp += "horizon,metric,standard,weighted\n";
        const char* names[5] = {"rmspe", "mape", "coverage", "cpd", "interval_score"};
        for (std::size_t i = 0; i < reports[0].rows.size(); ++i) {
            const HorizonMetrics& a = reports[0].rows[i];
            const HorizonMetrics& b = reports[1].rows[i];
            const double va[5] = {a.rmspe, a.mape, a.coverage, a.cpd, a.interval_score};
            const double vb[5] = {b.rmspe, b.mape, b.coverage, b.cpd, b.interval_score};
            for (int m = 0; m < 5; ++m) {
                if (std::isnan(va[m]) || std::isnan(vb[m])) continue;
                cmp += std::to_string(a.horizon) + "," + names[m] + "," +
                       format_double(va[m]) + "," + format_double(vb[m]) + "\n";
            }
        }
        write_file(fs::path(config.out_dir) / ("comparison_" + config.sex + ".csv"), cmp);
    }

    int failures = 0;
    for (const EvaluationReport& report : reports) failures += report.failed_origins;
    std::cout << "evaluation reports written to " << config.out_dir
              << " (failed origins: " << failures << ")\n";
    for (const std::string& note : notes) std::cout << "note: " << note << "\n";
    return 0;
}

int cmd_compare_plots(const std::vector<std::string>& report_paths,
                      const RunConfig& config) {
    if (report_paths.empty()) {
        throw ContractError("compare-plots needs at least one report JSON");
    }
    // merge pre-rendered plot rows from each report
    std::string out;
    out += "# curvecast: " + std::string(kVersion) + "\n";
    for (const std::string& path : report_paths) {
        out += "# report: " + path + "\n";
    }
    out += "method,sex,horizon,metric,value\n";
    for (const std::string& path : report_paths) {
        if (!fs::exists(path)) {
            throw ContractError("report does not exist: " + path);
        }
        std::ifstream in(path);
        std::stringstream buffer;
        buffer << in.rdbuf();
        const std::string text = buffer.str();

        // minimal extraction from our own report JSON
        auto find_string = [&](const std::string& key) -> std::string {
            const std::string marker = "\"" + key + "\": \"";
            const auto pos = text.find(marker);
            if (pos == std::string::npos) return "";
            const auto start = pos + marker.size();
            return text.substr(start, text.find('"', start) - start);
        };
        const std::string method = find_string("method");
        std::string sex = find_string("sex");
        if (sex.empty()) sex = config.sex;
        if (method.empty()) {
            throw DataError("not a curvecast report JSON: " + path);
        }
        std::size_t pos = 0;
        while ((pos = text.find("{\"horizon\": ", pos)) != std::string::npos) {
            const std::size_t end = text.find('}', pos);
            const std::string row = text.substr(pos, end - pos);
            auto field = [&](const std::string& key) -> std::string {
                const std::string marker = "\"" + key + "\": ";
                const auto fpos = row.find(marker);
                if (fpos == std::string::npos) return "";
                const auto start = fpos + marker.size();
                auto stop = row.find_first_of(",}", start);
                if (stop == std::string::npos) stop = row.size();
                return row.substr(start, stop - start);
            };
            const std::string horizon = field("horizon");
            for (const char* metric :
                 {"rmspe", "mape", "coverage", "cpd", "interval_score"}) {
                const std::string value = field(metric);
                if (!value.empty()) {
                    out += method + "," + sex + "," + horizon + "," + metric + "," +
                           value + "\n";
                }
            }
            pos = end;
        }
    }
    write_file(fs::path(config.out_dir) / "plot_data_combined.csv", out);
    std::cout << "combined plot data written to "
              << (fs::path(config.out_dir) / "plot_data_combined.csv") << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"curvecast: functional time-series mortality forecasting"};
    app.require_subcommand(1);

    RunConfig config;
    std::string config_path;

    // pre-scan for --config so file values load before flag overrides
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
    }
    try {
        if (!config_path.empty()) {
            apply_config_entries(config, load_config_file(config_path));
        }
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    auto* ingest = app.add_subcommand("ingest", "parse, group 95+, log-transform");
    auto* fit = app.add_subcommand("fit", "fit the two-stage model, write model JSON");
    auto* forecast = app.add_subcommand("forecast", "forecast from a model file");
    auto* evaluate = app.add_subcommand("evaluate", "expanding-window accuracy report");
    auto* compare = app.add_subcommand("compare-plots", "merge report JSONs into plot data");
    auto* synth = app.add_subcommand("synth", "write a synthetic Mx_1x1 file");

    std::string cfg_dummy;
    add_common_flags(ingest, config, cfg_dummy);
    add_common_flags(fit, config, cfg_dummy);
    add_common_flags(forecast, config, cfg_dummy);
    add_common_flags(evaluate, config, cfg_dummy);
    forecast->add_option("--model", config.model_path, "model JSON from `fit`");
    bool forecast_bootstrap = false;
    forecast->add_flag("--bootstrap", forecast_bootstrap, "emit lower/upper band CSVs");

    std::vector<std::string> report_paths;
    compare->add_option("--reports", report_paths, "evaluation report JSONs");
    compare->add_option("--out", config.out_dir, "output directory");
    compare->add_option("--sex", config.sex, "sex label when reports lack one");

    int synth_years = 272;
    std::uint64_t synth_seed = 1;
    std::string synth_out = "synthetic_mx.txt";
    synth->add_option("--years", synth_years, "number of years");
    synth->add_option("--seed", synth_seed, "generator seed");
    synth->add_option("--out", synth_out, "output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(ingest)) return cmd_ingest(config);
        if (app.got_subcommand(fit)) return cmd_fit(config);
        if (app.got_subcommand(forecast)) return cmd_forecast(config, forecast_bootstrap);
        if (app.got_subcommand(evaluate)) return cmd_evaluate(config);
        if (app.got_subcommand(compare)) return cmd_compare_plots(report_paths, config);
        if (app.got_subcommand(synth)) {
            write_synthetic_mx(synth_out, synth_years, synth_seed);
            std::cout << "synthetic data written to " << synth_out << "\n";
            return 0;
        }
    } catch (const ContractError& e) {
        std::cerr << "error (usage/config): " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "error (data): " << e.what() << "\n";
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "error (numerical): " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 2;
}
