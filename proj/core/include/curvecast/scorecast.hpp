#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "curvecast/errors.hpp"

namespace curvecast {

// ---------------------------------------------------------------------------
// Stationarity testing
// ---------------------------------------------------------------------------

/// KPSS statistic. Level version regresses on a constant; trend version on
/// constant + linear trend. Long-run variance by Bartlett window with
/// lag floor(4 (n/100)^{1/4}). A zero-variance series scores 0.
double kpss_statistic(const Eigen::VectorXd& series, bool trend = false);

inline constexpr double kKpssLevelCritical5 = 0.463;
inline constexpr double kKpssTrendCritical5 = 0.146;

/// Smallest d in 0..max_d whose d-times-differenced series passes the KPSS
/// test at 5%; max_d with a warning when none pass.
int select_d(const Eigen::VectorXd& series, int max_d = 2, bool trend = false,
             std::vector<std::string>* warnings = nullptr);

Eigen::VectorXd difference(const Eigen::VectorXd& series, int times);

// ---------------------------------------------------------------------------
// ARIMA
// ---------------------------------------------------------------------------

/// ARIMA(p,d,q) with optional constant. The constant acts on the d-times
/// differenced scale: a mean for d = 0, a drift for d = 1.
struct ArimaModel {
    int p = 0, d = 0, q = 0;
    Eigen::VectorXd ar;
    Eigen::VectorXd ma;
    double mu = 0.0;         // mean of the differenced series
    double intercept = 0.0;  // psi = mu * (1 - sum of AR coefficients)
    double sigma2 = 0.0;
    bool with_constant = false;
    bool drift = false;      // constant fitted with d == 1
    double aicc = 0.0;
    double loglik = 0.0;
    Eigen::VectorXd series;  // data the model was fitted to
};

/// Fit one specification by conditional-sum-of-squares minimization followed
/// by exact Gaussian likelihood ascent (Kalman filter, concentrated sigma^2).
/// Throws NumericalError when the candidate cannot be estimated.
ArimaModel fit_arima(const Eigen::VectorXd& series, int p, int d, int q,
                     bool with_constant);

/// Automatic order selection: d by successive KPSS tests, then a stepwise
/// neighborhood search over p, q in 0..5 (p + q capped at 5) with and
/// without a constant (constant only for d <= 1), winner by AICc among
/// candidates whose AR/MA roots clear the unit circle and share no
/// redundant common factor. Ties prefer fewer parameters, then lower p, q.
ArimaModel fit_arima_auto(const Eigen::VectorXd& series,
                          std::vector<std::string>* warnings = nullptr,
                          bool kpss_trend = false);

Eigen::VectorXd forecast_h(const ArimaModel& model, int h);

/// Fixed-parameter h-step-ahead in-sample forecast errors
/// (actual_t - forecast made at t-h), for t = h+1..n; length n-h.
Eigen::VectorXd insample_h_step_errors(const ArimaModel& model, int h);

// ---------------------------------------------------------------------------
// ETS (innovations state space: ANN, AAN, damped-trend AAdN)
// ---------------------------------------------------------------------------

enum class EtsForm { ANN, AAN, AAdN };

struct EtsModel {
    EtsForm form = EtsForm::ANN;
    double alpha = 0.5;
    double beta = 0.0;
    double phi_damp = 1.0;
    double level0 = 0.0;
    double trend0 = 0.0;
    double sigma2 = 0.0;
    double aicc = 0.0;
    double loglik = 0.0;
    Eigen::VectorXd series;
};

/// Fit the three admissible forms by innovations likelihood; keep the
/// minimum-AICc form. Falls back to ANN with alpha = 0.5 when every
/// optimization fails.
EtsModel fit_ets_auto(const Eigen::VectorXd& series,
                      std::vector<std::string>* warnings = nullptr);

Eigen::VectorXd forecast_h(const EtsModel& model, int h);
Eigen::VectorXd insample_h_step_errors(const EtsModel& model, int h);

// ---------------------------------------------------------------------------
// VAR
// ---------------------------------------------------------------------------

struct VarModel {
    int order = 1;
    std::vector<Eigen::MatrixXd> coeffs;  // A_1..A_p, each K x K
    Eigen::VectorXd intercept;
    Eigen::MatrixXd resid_cov;
    double aicc = 0.0;
    Eigen::MatrixXd series;  // n x K
};

/// Least-squares VAR(p), p in 1..p_max, selected on a common estimation
/// sample by the corrected AIC
///   log det(Sigma) + (K^2 p + K) * 2n / (n - Kp - K - 1),
/// then refit at the winning order on the full usable sample.
VarModel fit_var_auto(const Eigen::MatrixXd& scores, int p_max = 5,
                      std::vector<std::string>* warnings = nullptr);

/// h-step recursive point forecasts; rows are horizons 1..h.
Eigen::MatrixXd forecast_h(const VarModel& model, int h);

/// Per-component h-step in-sample errors (column k of the result pairs with
/// score column k); rows are t = h+1..n.
Eigen::MatrixXd insample_h_step_errors(const VarModel& model, int h);

// ---------------------------------------------------------------------------
// Score-series forecasting facade used by the model pipeline
// ---------------------------------------------------------------------------

enum class ScoreModelKind { arima, ets, var };

ScoreModelKind parse_score_model(const std::string& name);
std::string to_string(ScoreModelKind kind);

/// Point forecasts plus the per-(horizon, component) in-sample error pools
/// that drive the bootstrap.
struct ScoreForecast {
    Eigen::MatrixXd point;  // h_max x K
    // insample_errors[k][h-1] has length n - h
    std::vector<std::vector<Eigen::VectorXd>> insample_errors;
    std::vector<std::string> summaries;  // one human-readable line per component
};

/// Fit the chosen family to an n x K score matrix (one univariate model per
/// column for arima/ets, a single joint model for var) and assemble
/// forecasts and error pools for horizons 1..h_max.
ScoreForecast forecast_scores(const Eigen::MatrixXd& scores, ScoreModelKind kind,
                              int h_max, std::vector<std::string>* warnings = nullptr,
                              bool kpss_trend = false);

}  // namespace curvecast
