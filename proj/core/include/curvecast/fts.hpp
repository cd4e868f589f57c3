#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "curvecast/errors.hpp"

namespace curvecast {

/// Uniform grid of abscissae (ages) shared by all curves of a series.
///
/// The grid must be strictly increasing with uniform spacing: every integral
/// in the library is a trapezoidal-rule sum that assumes it.
class AgeGrid {
public:
    explicit AgeGrid(Eigen::VectorXd points);

    /// Convenience: p equally spaced points from lo to hi inclusive.
    static AgeGrid uniform(double lo, double hi, Eigen::Index p);

    const Eigen::VectorXd& points() const { return points_; }
    double spacing() const { return spacing_; }
    Eigen::Index size() const { return points_.size(); }

    /// Trapezoid quadrature weights: spacing everywhere, halved at the ends.
    const Eigen::VectorXd& quadrature_weights() const { return quad_; }

    bool same_as(const AgeGrid& other, double tol = 1e-9) const;

private:
    Eigen::VectorXd points_;
    Eigen::VectorXd quad_;
    double spacing_;
};

/// One function sampled on a grid.
struct Curve {
    Eigen::VectorXd values;
    AgeGrid grid;

    Curve(Eigen::VectorXd v, AgeGrid g);
};

enum class ScaleTag { log10_rate, raw_rate, differenced, residual };

/// n curves observed at consecutive times on a shared grid. Row t of
/// `values` is the curve at time `time_labels[t]`.
class FunctionalTimeSeries {
public:
    FunctionalTimeSeries(Eigen::MatrixXd values, AgeGrid grid,
                         std::vector<int> time_labels, ScaleTag scale);

    const Eigen::MatrixXd& values() const { return values_; }
    const AgeGrid& grid() const { return grid_; }
    const std::vector<int>& time_labels() const { return time_labels_; }
    ScaleTag scale() const { return scale_; }

    Eigen::Index n() const { return values_.rows(); }
    Eigen::Index p() const { return values_.cols(); }

    Curve curve(Eigen::Index t) const { return Curve(values_.row(t).transpose(), grid_); }

    /// Series restricted to rows [first, last) keeping grid and labels.
    FunctionalTimeSeries head(Eigen::Index count) const;

private:
    Eigen::MatrixXd values_;
    AgeGrid grid_;
    std::vector<int> time_labels_;
    ScaleTag scale_;
};

/// Trapezoidal approximation of the L2 inner product over the grid range.
double inner_product(const Curve& f, const Curve& g);

/// Same, on raw vectors sharing a grid (no Curve wrapper).
double inner_product(const Eigen::VectorXd& f, const Eigen::VectorXd& g, const AgeGrid& grid);

double l2_norm_squared(const Curve& f);

/// Pointwise mean across time.
Curve mean_function(const FunctionalTimeSeries& fts);

/// X_t - X_{t-1}; result has n-1 rows, tag `differenced`, drops the first label.
FunctionalTimeSeries first_difference(const FunctionalTimeSeries& fts);

/// Subtract the mean curve from every row; returns (centered series, mean).
std::pair<FunctionalTimeSeries, Curve> center(const FunctionalTimeSeries& fts);

}  // namespace curvecast
