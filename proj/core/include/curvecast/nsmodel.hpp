#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "curvecast/dfpca.hpp"
#include "curvecast/fts.hpp"
#include "curvecast/lrcov.hpp"
#include "curvecast/scorecast.hpp"

namespace curvecast {

struct TwoStageOptions {
    bool weighted = false;
    double kappa = 0.5;            // used when weighted
    KernelSpec kernel;             // bandwidth auto by default
    double independence_alpha = 0.05;
    int independence_lags = 10;
    int independence_components = 3;
    Eigen::Index k_max_cap = 10;   // cap on retained components per stage
    std::optional<Eigen::Index> fixed_r;  // bypass ratio selection at stage 1
};

/// Two-stage decomposition of a nonstationary functional time series:
/// stage 1 extracts components from the long-run covariance of the
/// differenced series (or its weighted SVD variant); stage 2, entered only
/// when the stage-1 residual curves fail an independence test, extracts
/// components from the residuals' long-run covariance.
struct TwoStageModel {
    Curve mean;
    FpcaBasis stage1;
    std::optional<FpcaBasis> stage2;
    FunctionalTimeSeries residuals_Z;  // after stage 1
    FunctionalTimeSeries residuals_Y;  // after both stages
    bool weighted = false;
    double kappa = 0.0;
    double independence_p_value = 1.0;
    std::vector<std::string> warnings;

    Eigen::Index r_hat() const { return stage1.k(); }
    Eigen::Index k_hat() const { return r_hat() + (stage2 ? stage2->k() : 0); }
    Eigen::Index n() const { return residuals_Y.n(); }
    const AgeGrid& grid() const { return residuals_Y.grid(); }
};

TwoStageModel fit_two_stage(const FunctionalTimeSeries& fts, const TwoStageOptions& options);

/// Portmanteau independence test: project the curves onto their leading d
/// static principal components and refer n * sum of squared score
/// cross-correlations at lags 1..H to chi-square with d^2 H degrees of
/// freedom. Returns the p-value.
double independence_test(const FunctionalTimeSeries& z, int lags = 10, int components = 3,
                         std::vector<std::string>* warnings = nullptr);

/// Score forecasts for every retained component, stage 1 first then stage 2.
struct ModelScoreForecasts {
    ScoreForecast stage1;
    std::optional<ScoreForecast> stage2;
};

ModelScoreForecasts forecast_model_scores(const TwoStageModel& model, ScoreModelKind kind,
                                          int h_max,
                                          std::vector<std::string>* warnings = nullptr,
                                          bool kpss_trend = false);

/// Assemble curve forecasts from the mean, the retained eigenfunctions, and
/// the score forecasts: mean + sum_k beta_k zeta_k over both stages.
std::vector<Curve> point_forecast(const TwoStageModel& model,
                                  const ModelScoreForecasts& scores, int h);

}  // namespace curvecast
