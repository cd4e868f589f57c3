#include "curvecast/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>

#include "curvecast/io_util.hpp"
#include "curvecast/optim.hpp"
#include "curvecast/rng.hpp"

namespace curvecast {

// --- metrics -----------------------------------------------------------------

double rmspe(const std::vector<double>& errors) {
    if (errors.empty()) {
        throw ContractError("rmspe: empty error set");
    }
    double sum = 0.0;
    for (const double e : errors) sum += e * e;
    return std::sqrt(sum / static_cast<double>(errors.size()));
}

double mape(const std::vector<double>& errors) {
    if (errors.empty()) {
        throw ContractError("mape: empty error set");
    }
    double sum = 0.0;
    for (const double e : errors) sum += std::abs(e);
    return sum / static_cast<double>(errors.size());
}

std::pair<double, double> coverage_cpd(const std::vector<double>& lower,
                                       const std::vector<double>& upper,
                                       const std::vector<double>& actual, double alpha) {
    if (lower.size() != upper.size() || lower.size() != actual.size() || lower.empty()) {
        throw ContractError("coverage_cpd: misaligned or empty inputs");
    }
    std::size_t outside = 0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i] > upper[i] || actual[i] < lower[i]) ++outside;
    }
    const double coverage =
        1.0 - static_cast<double>(outside) / static_cast<double>(actual.size());
    return {coverage, std::abs(coverage - (1.0 - alpha))};
}

double interval_score(double lower, double upper, double actual, double alpha) {
    if (lower > upper) {
        throw ContractError("interval_score: lower bound exceeds upper bound");
    }
    double score = upper - lower;
    if (actual < lower) score += (2.0 / alpha) * (lower - actual);
    if (actual > upper) score += (2.0 / alpha) * (actual - upper);
    return score;
}

double mean_interval_score(const std::vector<double>& lower,
                           const std::vector<double>& upper,
                           const std::vector<double>& actual, double alpha) {
    if (lower.size() != upper.size() || lower.size() != actual.size() || lower.empty()) {
        throw ContractError("mean_interval_score: misaligned or empty inputs");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        sum += interval_score(lower[i], upper[i], actual[i], alpha);
    }
    return sum / static_cast<double>(actual.size());
}

// --- pipeline pieces ---------------------------------------------------------

FunctionalTimeSeries smooth_series(const FunctionalTimeSeries& fts,
                                   const PipelineConfig& config) {
    if (!config.smooth) {
        return fts;
    }
    const Eigen::Index p = fts.p();
    Eigen::MatrixXd smoothed(fts.n(), p);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(p);
    for (Eigen::Index t = 0; t < fts.n(); ++t) {
        Eigen::VectorXd w = ones;
        if (config.smooth_weights) {
            if (config.smooth_weights->rows() <= t ||
                config.smooth_weights->cols() != p) {
                throw ContractError("smooth_series: weight matrix does not cover the series");
            }
            w = config.smooth_weights->row(t).transpose();
        }
        const Curve fitted = smooth_log_mortality(fts.curve(t), w, config.smoothing);
        smoothed.row(t) = fitted.values.transpose();
    }
    return FunctionalTimeSeries(std::move(smoothed), fts.grid(), fts.time_labels(),
                                fts.scale());
}

namespace {

struct OriginResult {
    bool ok = false;
    std::string error;
    Eigen::MatrixXd point;                 // horizons x p
    std::optional<PredictionBand> band;
    std::vector<std::string> warnings;
};

OriginResult run_origin(const FunctionalTimeSeries& fts, Eigen::Index origin,
                        const PipelineConfig& config, int inner_threads) {
    OriginResult result;
    const int h_max = static_cast<int>(fts.n() - origin);
    try {
        const FunctionalTimeSeries train = smooth_series(fts.head(origin), config);
        const TwoStageModel model = fit_two_stage(train, config.model);
        result.warnings = model.warnings;

        const ModelScoreForecasts scores =
            forecast_model_scores(model, config.score_model, h_max, &result.warnings,
                                  config.kpss_trend);
        const std::vector<Curve> points = point_forecast(model, scores, h_max);
        result.point.resize(h_max, fts.p());
        for (int h = 0; h < h_max; ++h) {
            result.point.row(h) = points[h].values.transpose();
        }
        if (config.bootstrap) {
            // per-origin stream seed: decouples replicate draws across origins
            // while staying a pure function of (master seed, origin)
            RngStream origin_stream(config.seed, 0x0E11, static_cast<std::uint64_t>(origin));
            const BootstrapEnsemble ensemble =
                bootstrap_forecasts(model, scores, h_max, config.bootstrap_b,
                                    config.alpha, origin_stream.next_u64(), inner_threads);
            result.band = quantile_band(ensemble);
        }
        result.ok = true;
    } catch (const std::exception& e) {
        result.error = e.what();
    }
    return result;
}

}  // namespace

EvaluationReport expanding_window(const FunctionalTimeSeries& fts, const SampleSplit& split,
                                  const PipelineConfig& config) {
    if (split.n() != fts.n()) {
        throw ContractError("expanding_window: split does not cover the series");
    }
    if (split.test_len() < 1) {
        throw ContractError("expanding_window: empty test block");
    }
    const Eigen::Index n = fts.n();
    const Eigen::Index first_origin = split.test_begin;
    const int n_origins = static_cast<int>(n - first_origin);

    std::vector<OriginResult> results(n_origins);
    const int threads = std::max(1, config.threads);
    if (threads <= 1 || n_origins <= 1) {
        for (int i = 0; i < n_origins; ++i) {
            results[i] = run_origin(fts, first_origin + i, config, threads);
        }
    } else {
        // one origin per task; deterministic because each task only writes
        // its own slot
        std::vector<std::thread> pool;
        const int workers = std::min(threads, n_origins);
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w]() {
                for (int i = w; i < n_origins; i += workers) {
                    results[i] = run_origin(fts, first_origin + i, config, 1);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    EvaluationReport report;
    report.method = config.model.weighted ? "weighted" : "standard";
    report.score_model = to_string(config.score_model);
    if (config.model.weighted) report.kappa = config.model.kappa;
    report.alpha = config.alpha;

    const int h_top = static_cast<int>(split.test_len());
    for (int h = 1; h <= h_top; ++h) {
        std::vector<double> errors, lo, hi, actual;
        int count = 0;
        for (int i = 0; i < n_origins; ++i) {
            const Eigen::Index origin = first_origin + i;
            if (origin + h > n) break;
            const OriginResult& r = results[i];
            if (!r.ok) continue;
            ++count;
            const Eigen::Index target = origin + h - 1;
            for (Eigen::Index j = 0; j < fts.p(); ++j) {
                const double truth = fts.values()(target, j);
                errors.push_back(truth - r.point(h - 1, j));
                if (r.band) {
                    lo.push_back(r.band->lower(h - 1, j));
                    hi.push_back(r.band->upper(h - 1, j));
                    actual.push_back(truth);
                }
            }
        }
        HorizonMetrics row;
        row.horizon = h;
        row.forecast_count = count;
        if (!errors.empty()) {
            row.rmspe = rmspe(errors);
            row.mape = mape(errors);
        }
        if (!lo.empty()) {
            const auto [cov, cpd] = coverage_cpd(lo, hi, actual, config.alpha);
            row.coverage = cov;
            row.cpd = cpd;
            row.interval_score = mean_interval_score(lo, hi, actual, config.alpha);
        }
        report.rows.push_back(row);
    }

    for (int i = 0; i < n_origins; ++i) {
        if (!results[i].ok) {
            ++report.failed_origins;
            report.warnings.push_back("origin " + std::to_string(first_origin + i + 1) +
                                      " failed: " + results[i].error);
        } else {
            for (const std::string& w : results[i].warnings) {
                report.warnings.push_back("origin " + std::to_string(first_origin + i + 1) +
                                          ": " + w);
            }
        }
    }
    return report;
}

// --- kappa selection ---------------------------------------------------------

KappaCriterion parse_criterion(const std::string& name) {
    if (name == "rmspe") return KappaCriterion::rmspe;
    if (name == "mape") return KappaCriterion::mape;
    if (name == "cpd") return KappaCriterion::cpd;
    if (name == "interval_score") return KappaCriterion::interval_score;
    throw ContractError("unknown criterion '" + name +
                        "' (rmspe|mape|cpd|interval_score)");
}

std::string to_string(KappaCriterion criterion) {
    switch (criterion) {
        case KappaCriterion::rmspe: return "rmspe";
        case KappaCriterion::mape: return "mape";
        case KappaCriterion::cpd: return "cpd";
        case KappaCriterion::interval_score: return "interval_score";
    }
    return "rmspe";
}

KappaResult optimize_kappa(const FunctionalTimeSeries& fts, const SampleSplit& split,
                           const PipelineConfig& config, KappaCriterion criterion) {
    if (split.val_len() < 1) {
        throw ContractError("optimize_kappa: empty validation block");
    }
    const int h_val = static_cast<int>(split.val_len());
    const bool needs_band =
        criterion == KappaCriterion::cpd || criterion == KappaCriterion::interval_score;

    KappaResult out;
    std::map<double, double> memo;
    bool any_finite = false;

    auto objective = [&](double kappa) {
        const auto hit = memo.find(kappa);
        if (hit != memo.end()) return hit->second;
        double value = std::numeric_limits<double>::infinity();
        try {
            PipelineConfig local = config;
            local.model.weighted = true;
            local.model.kappa = kappa;
            const FunctionalTimeSeries train =
                smooth_series(fts.head(split.val_begin), local);
            const TwoStageModel model = fit_two_stage(train, local.model);
            std::vector<std::string> sink;
            const ModelScoreForecasts scores =
                forecast_model_scores(model, local.score_model, h_val, &sink, local.kpss_trend);
            const std::vector<Curve> points = point_forecast(model, scores, h_val);
            std::optional<PredictionBand> band;
            if (needs_band) {
                band = quantile_band(bootstrap_forecasts(model, scores, h_val,
                                                         local.bootstrap_b, local.alpha,
                                                         local.seed, local.threads));
            }

            // mean of the per-horizon criterion over the validation block
            double total = 0.0;
            for (int h = 1; h <= h_val; ++h) {
                const Eigen::Index target = split.val_begin + h - 1;
                std::vector<double> errors, lo, hi, actual;
                for (Eigen::Index j = 0; j < fts.p(); ++j) {
                    const double truth = fts.values()(target, j);
                    errors.push_back(truth - points[h - 1].values(j));
                    if (band) {
                        lo.push_back(band->lower(h - 1, j));
                        hi.push_back(band->upper(h - 1, j));
                        actual.push_back(truth);
                    }
                }
                switch (criterion) {
                    case KappaCriterion::rmspe: total += rmspe(errors); break;
                    case KappaCriterion::mape: total += mape(errors); break;
                    case KappaCriterion::cpd:
                        total += coverage_cpd(lo, hi, actual, config.alpha).second;
                        break;
                    case KappaCriterion::interval_score:
                        total += mean_interval_score(lo, hi, actual, config.alpha);
                        break;
                }
            }
            value = total / static_cast<double>(h_val);
        } catch (const std::exception& e) {
            out.warnings.push_back("kappa objective failed at " + format_double(kappa) +
                                   ": " + e.what());
        }
        if (std::isfinite(value)) any_finite = true;
        memo[kappa] = value;
        return value;
    };

    const GoldenSectionResult gs = golden_section(objective, 0.001, 0.999, 1e-3, 40);
    out.evaluations = gs.evaluations;
    if (!any_finite) {
        out.warnings.push_back("optimize_kappa: objective non-finite everywhere; kappa = 0.5");
        out.kappa = 0.5;
        return out;
    }

    // flat objective (weighting has no effect beyond roundoff): midpoint
    double lo_val = std::numeric_limits<double>::infinity();
    double hi_val = -std::numeric_limits<double>::infinity();
    for (const auto& [k, v] : memo) {
        if (!std::isfinite(v)) continue;
        lo_val = std::min(lo_val, v);
        hi_val = std::max(hi_val, v);
    }
    if (gs.flat || hi_val - lo_val <= 1e-12 * std::max(1.0, std::abs(hi_val))) {
        out.kappa = 0.5;
        out.objective = lo_val;
        return out;
    }
    out.kappa = gs.x;
    out.objective = gs.value;
    return out;
}

// --- serialization -----------------------------------------------------------

namespace {

std::string header_lines(const std::vector<std::pair<std::string, std::string>>& header) {
    std::string out;
    for (const auto& [key, value] : header) {
        out += "# " + key + ": " + value + "\n";
    }
    return out;
}

void append_metric_rows(std::string& out, const EvaluationReport& report,
                        const std::string& prefix) {
    for (const HorizonMetrics& row : report.rows) {
        const std::pair<const char*, double> metrics[] = {
            {"rmspe", row.rmspe},
            {"mape", row.mape},
            {"coverage", row.coverage},
            {"cpd", row.cpd},
            {"interval_score", row.interval_score},
        };
        for (const auto& [name, value] : metrics) {
            if (std::isnan(value)) continue;
            out += prefix + std::to_string(row.horizon) + "," + name + "," +
                   format_double(value) + "\n";
        }
    }
}

}  // namespace

std::string report_to_csv(const EvaluationReport& report,
                          const std::vector<std::pair<std::string, std::string>>& header) {
    std::string out = header_lines(header);
    out += "method,horizon,metric,value\n";
    append_metric_rows(out, report, report.method + ",");
    return out;
}

std::string report_to_json(const EvaluationReport& report,
                           const std::vector<std::pair<std::string, std::string>>& header) {
    std::string out = "{\n  \"provenance\": {";
    bool first = true;
    for (const auto& [key, value] : header) {
        out += first ? "" : ",";
        out += "\n    \"" + key + "\": \"" + value + "\"";
        first = false;
    }
    out += "\n  },\n";
    out += "  \"method\": \"" + report.method + "\",\n";
    out += "  \"score_model\": \"" + report.score_model + "\",\n";
    out += "  \"alpha\": " + format_double(report.alpha) + ",\n";
    if (!std::isnan(report.kappa)) {
        out += "  \"kappa\": " + format_double(report.kappa) + ",\n";
    }
    out += "  \"failed_origins\": " + std::to_string(report.failed_origins) + ",\n";
    out += "  \"horizons\": [\n";
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const HorizonMetrics& row = report.rows[i];
        out += "    {\"horizon\": " + std::to_string(row.horizon) +
               ", \"count\": " + std::to_string(row.forecast_count) +
               ", \"rmspe\": " + format_double(row.rmspe) +
               ", \"mape\": " + format_double(row.mape);
        if (!std::isnan(row.coverage)) {
            out += ", \"coverage\": " + format_double(row.coverage) +
                   ", \"cpd\": " + format_double(row.cpd) +
                   ", \"interval_score\": " + format_double(row.interval_score);
        }
        out += "}";
        out += (i + 1 < report.rows.size()) ? ",\n" : "\n";
    }
    out += "  ]\n}\n";
    return out;
}

std::string plot_data_csv(const std::vector<EvaluationReport>& reports,
                          const std::string& sex,
                          const std::vector<std::pair<std::string, std::string>>& header) {
    std::string out = header_lines(header);
    out += "method,sex,horizon,metric,value\n";
    for (const EvaluationReport& report : reports) {
        append_metric_rows(out, report, report.method + "," + sex + ",");
    }
    return out;
}

}  // namespace curvecast
