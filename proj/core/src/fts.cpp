#include "curvecast/fts.hpp"

#include <cmath>
#include <string>

namespace curvecast {

namespace {

bool all_finite(const Eigen::MatrixXd& m) {
    return m.array().isFinite().all();
}

}  // namespace

AgeGrid::AgeGrid(Eigen::VectorXd points) : points_(std::move(points)) {
    const Eigen::Index p = points_.size();
    if (p < 2) {
        throw ContractError("AgeGrid: need at least 2 points, got " + std::to_string(p));
    }
    if (!all_finite(points_)) {
        throw ContractError("AgeGrid: non-finite grid point");
    }
    spacing_ = (points_(p - 1) - points_(0)) / static_cast<double>(p - 1);
    if (!(spacing_ > 0.0)) {
        throw ContractError("AgeGrid: points must be strictly increasing");
    }
    const double tol = 1e-9 * std::abs(spacing_);
    for (Eigen::Index j = 1; j < p; ++j) {
        const double step = points_(j) - points_(j - 1);
        if (step <= 0.0) {
            throw ContractError("AgeGrid: points must be strictly increasing");
        }
        if (std::abs(step - spacing_) > tol) {
            throw ContractError("AgeGrid: spacing not uniform within 1e-9 relative tolerance");
        }
    }
    quad_ = Eigen::VectorXd::Constant(p, spacing_);
    quad_(0) *= 0.5;
    quad_(p - 1) *= 0.5;
}

AgeGrid AgeGrid::uniform(double lo, double hi, Eigen::Index p) {
    return AgeGrid(Eigen::VectorXd::LinSpaced(p, lo, hi));
}

bool AgeGrid::same_as(const AgeGrid& other, double tol) const {
    if (size() != other.size()) return false;
    const double scale = std::max(1.0, points_.cwiseAbs().maxCoeff());
    return (points_ - other.points_).cwiseAbs().maxCoeff() <= tol * scale;
}

Curve::Curve(Eigen::VectorXd v, AgeGrid g) : values(std::move(v)), grid(std::move(g)) {
    if (values.size() != grid.size()) {
        throw ContractError("Curve: value length does not match grid");
    }
    if (!values.array().isFinite().all()) {
        throw ContractError("Curve: non-finite value");
    }
}

FunctionalTimeSeries::FunctionalTimeSeries(Eigen::MatrixXd values, AgeGrid grid,
                                           std::vector<int> time_labels, ScaleTag scale)
    : values_(std::move(values)),
      grid_(std::move(grid)),
      time_labels_(std::move(time_labels)),
      scale_(scale) {
    if (values_.rows() < 1) {
        throw ContractError("FunctionalTimeSeries: need at least one curve");
    }
    if (values_.cols() != grid_.size()) {
        throw ContractError("FunctionalTimeSeries: row length does not match grid");
    }
    if (!all_finite(values_)) {
        throw ContractError("FunctionalTimeSeries: non-finite entry");
    }
    if (static_cast<Eigen::Index>(time_labels_.size()) != values_.rows()) {
        throw ContractError("FunctionalTimeSeries: one time label per curve required");
    }
    const bool need_consecutive = (scale_ != ScaleTag::differenced);
    for (std::size_t t = 1; t < time_labels_.size(); ++t) {
        if (time_labels_[t] <= time_labels_[t - 1]) {
            throw ContractError("FunctionalTimeSeries: time labels must be strictly increasing");
        }
        if (need_consecutive && time_labels_[t] != time_labels_[t - 1] + 1) {
            throw ContractError("FunctionalTimeSeries: time labels must be consecutive");
        }
    }
}

FunctionalTimeSeries FunctionalTimeSeries::head(Eigen::Index count) const {
    if (count < 1 || count > n()) {
        throw ContractError("FunctionalTimeSeries::head: count out of range");
    }
    std::vector<int> labels(time_labels_.begin(), time_labels_.begin() + count);
    return FunctionalTimeSeries(values_.topRows(count), grid_, std::move(labels), scale_);
}

double inner_product(const Eigen::VectorXd& f, const Eigen::VectorXd& g, const AgeGrid& grid) {
    if (f.size() != grid.size() || g.size() != grid.size()) {
        throw ContractError("inner_product: vector length does not match grid");
    }
    return (f.array() * g.array() * grid.quadrature_weights().array()).sum();
}

double inner_product(const Curve& f, const Curve& g) {
    if (!f.grid.same_as(g.grid)) {
        throw ContractError("inner_product: curves live on different grids");
    }
    return inner_product(f.values, g.values, f.grid);
}

double l2_norm_squared(const Curve& f) {
    return inner_product(f.values, f.values, f.grid);
}

Curve mean_function(const FunctionalTimeSeries& fts) {
    return Curve(fts.values().colwise().mean().transpose(), fts.grid());
}

FunctionalTimeSeries first_difference(const FunctionalTimeSeries& fts) {
    const Eigen::Index n = fts.n();
    if (n < 2) {
        throw DataError("first_difference: need at least 2 curves, got " + std::to_string(n));
    }
    Eigen::MatrixXd diff = fts.values().bottomRows(n - 1) - fts.values().topRows(n - 1);
    std::vector<int> labels(fts.time_labels().begin() + 1, fts.time_labels().end());
    return FunctionalTimeSeries(std::move(diff), fts.grid(), std::move(labels),
                                ScaleTag::differenced);
}

std::pair<FunctionalTimeSeries, Curve> center(const FunctionalTimeSeries& fts) {
    Curve mu = mean_function(fts);
    Eigen::MatrixXd centered = fts.values().rowwise() - mu.values.transpose();
    FunctionalTimeSeries out(std::move(centered), fts.grid(), fts.time_labels(), fts.scale());
    return {std::move(out), std::move(mu)};
}

}  // namespace curvecast
