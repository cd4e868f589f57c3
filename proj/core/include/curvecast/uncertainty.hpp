#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "curvecast/nsmodel.hpp"

namespace curvecast {

/// B bootstrapped future curves per horizon.
struct BootstrapEnsemble {
    std::vector<Eigen::MatrixXd> replicates;  // [h-1] -> B x p
    int b = 0;
    double alpha = 0.2;
    std::uint64_t seed = 0;
};

/// Pointwise lower/upper quantile curves per horizon.
struct PredictionBand {
    Eigen::MatrixXd lower;  // h x p
    Eigen::MatrixXd upper;  // h x p
    double alpha = 0.2;
};

/// Nonparametric bootstrap of the forecast distribution: each replicate adds
/// a resampled in-sample h-step score error to every component's point score
/// forecast and one resampled model-fit residual curve. Draw streams are
/// keyed by (seed, replicate, horizon, component), so results do not depend
/// on evaluation order or thread count.
BootstrapEnsemble bootstrap_forecasts(const TwoStageModel& model,
                                      const ModelScoreForecasts& forecasters, int h_max,
                                      int b, double alpha, std::uint64_t seed,
                                      int threads = 1);

/// Pointwise alpha/2 and 1-alpha/2 empirical quantiles of the ensemble,
/// linear interpolation of order statistics (type-7).
PredictionBand quantile_band(const BootstrapEnsemble& ensemble);

/// Type-7 quantile of an unsorted sample (testing and reporting helper).
double quantile_type7(std::vector<double> values, double prob);

}  // namespace curvecast
