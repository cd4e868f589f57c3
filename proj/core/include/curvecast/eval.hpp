#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "curvecast/ingest.hpp"
#include "curvecast/nsmodel.hpp"
#include "curvecast/smooth.hpp"
#include "curvecast/uncertainty.hpp"

namespace curvecast {

/// Everything one expanding-window run needs to know.
struct PipelineConfig {
    bool smooth = false;
    SmoothingSpec smoothing;
    std::optional<Eigen::MatrixXd> smooth_weights;  // year x age, else uniform
    TwoStageOptions model;
    ScoreModelKind score_model = ScoreModelKind::arima;
    bool kpss_trend = false;
    bool bootstrap = true;
    int bootstrap_b = 1000;
    double alpha = 0.2;
    std::uint64_t seed = 0;
    int threads = 1;
};

struct HorizonMetrics {
    int horizon = 0;
    int forecast_count = 0;
    double rmspe = 0.0;
    double mape = 0.0;
    // interval metrics are NaN when the run had no bootstrap bands
    double coverage = std::numeric_limits<double>::quiet_NaN();
    double cpd = std::numeric_limits<double>::quiet_NaN();
    double interval_score = std::numeric_limits<double>::quiet_NaN();
};

struct EvaluationReport {
    std::string method;  // "standard" or "weighted"
    std::string score_model;
    double kappa = std::numeric_limits<double>::quiet_NaN();
    double alpha = 0.2;
    std::vector<HorizonMetrics> rows;
    int failed_origins = 0;
    std::vector<std::string> warnings;
};

// --- accuracy metrics --------------------------------------------------------

/// Root mean squared error over a pooled error set.
double rmspe(const std::vector<double>& errors);
/// Mean absolute error over the same set.
double mape(const std::vector<double>& errors);

/// Empirical coverage of [lower, upper] and |coverage - (1 - alpha)|.
/// Boundary hits count as covered.
std::pair<double, double> coverage_cpd(const std::vector<double>& lower,
                                       const std::vector<double>& upper,
                                       const std::vector<double>& actual, double alpha);

/// Interval score for one point: width plus 2/alpha-scaled exceedance.
double interval_score(double lower, double upper, double actual, double alpha);

/// Mean interval score over aligned vectors.
double mean_interval_score(const std::vector<double>& lower,
                           const std::vector<double>& upper,
                           const std::vector<double>& actual, double alpha);

// --- expanding window --------------------------------------------------------

/// Smooth every curve of a series with the configured spec (weights rows are
/// matched by time label when provided).
FunctionalTimeSeries smooth_series(const FunctionalTimeSeries& fts,
                                   const PipelineConfig& config);

/// Re-fit the full pipeline at every origin from the end of the validation
/// block to n-1, forecast to the end of the sample, and aggregate the
/// metrics per horizon against the held-out curves.
EvaluationReport expanding_window(const FunctionalTimeSeries& fts, const SampleSplit& split,
                                  const PipelineConfig& config);

enum class KappaCriterion { rmspe, mape, cpd, interval_score };

KappaCriterion parse_criterion(const std::string& name);
std::string to_string(KappaCriterion criterion);

struct KappaResult {
    double kappa = 0.5;
    double objective = std::numeric_limits<double>::quiet_NaN();
    int evaluations = 0;
    std::vector<std::string> warnings;
};

/// Golden-section search for the weight decay parameter: fit the weighted
/// model on the training block, forecast the validation block, minimize the
/// chosen criterion averaged over validation horizons.
KappaResult optimize_kappa(const FunctionalTimeSeries& fts, const SampleSplit& split,
                           const PipelineConfig& config, KappaCriterion criterion);

// --- report serialization ----------------------------------------------------

/// Long-format CSV: method,horizon,metric,value (preceded by `# key: value`
/// provenance lines).
std::string report_to_csv(const EvaluationReport& report,
                          const std::vector<std::pair<std::string, std::string>>& header);

std::string report_to_json(const EvaluationReport& report,
                           const std::vector<std::pair<std::string, std::string>>& header);

/// Plot-data CSV in the shape metric-vs-horizon per method:
/// method,sex,horizon,metric,value.
std::string plot_data_csv(const std::vector<EvaluationReport>& reports,
                          const std::string& sex,
                          const std::vector<std::pair<std::string, std::string>>& header);

}  // namespace curvecast
