#pragma once

#include <Eigen/Core>
#include <functional>

namespace curvecast {

struct NelderMeadResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int evaluations = 0;
};

/// Derivative-free simplex minimizer. Deterministic: fixed initial simplex
/// (x0 plus per-coordinate steps), fixed reflection/expansion constants.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0, double initial_step,
                             int max_evaluations, double tolerance = 1e-10);

struct GoldenSectionResult {
    double x = 0.0;
    double value = 0.0;
    int evaluations = 0;
    bool flat = false;  // every probe returned the same objective
};

/// Golden-section minimization on [lo, hi]. Stops when the bracket is
/// narrower than `width_tolerance` or after `max_evaluations` probes.
/// A completely flat objective reports flat=true with the interval midpoint.
GoldenSectionResult golden_section(const std::function<double(double)>& f,
                                   double lo, double hi, double width_tolerance,
                                   int max_evaluations);

}  // namespace curvecast
