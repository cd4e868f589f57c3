#pragma once

#include <Eigen/Core>

#include "curvecast/fts.hpp"

namespace curvecast {

enum class WeightsMode { uniform, exposure_based };

/// Penalized-spline smoother settings. `lambda < 0` means select by GCV.
struct SmoothingSpec {
    int penalty_order = 2;
    double lambda = -1.0;           // auto
    double monotone_from_age = 65;  // isotonic tail starts here
    WeightsMode weights_mode = WeightsMode::uniform;

    bool auto_lambda() const { return lambda < 0.0; }
};

/// Minimize sum_j w_j (y_j - f_j)^2 + lambda * sum (second difference of f)^2
/// over grid values f; returns the fitted values.
Curve smooth_curve(const Curve& y, const Eigen::VectorXd& weights, double lambda);

/// GCV selection over a fixed log grid of 41 candidates in [1e-4, 1e6].
/// GCV(lambda) = n * RSS / (n - tr H)^2 with the weighted influence matrix H.
/// Exact ties resolve to the smallest lambda.
double select_lambda_gcv(const Curve& y, const Eigen::VectorXd& weights);

/// Replace values at ages >= from_age with their weighted isotonic
/// (non-decreasing) regression; earlier ages untouched.
Curve monotone_project(const Curve& f, double from_age,
                       const Eigen::VectorXd& weights);

/// Full treatment of one raw curve: optional GCV lambda, penalized fit,
/// isotonic tail projection.
Curve smooth_log_mortality(const Curve& y, const Eigen::VectorXd& weights,
                           const SmoothingSpec& spec);

}  // namespace curvecast
