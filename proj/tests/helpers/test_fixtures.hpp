#pragma once

#include <Eigen/Core>
#include <vector>

#include "curvecast/fts.hpp"
#include "curvecast/rng.hpp"

namespace testutil {

inline curvecast::FunctionalTimeSeries make_fts(const Eigen::MatrixXd& values,
                                                double lo = 0.0, double hi = 1.0,
                                                curvecast::ScaleTag tag =
                                                    curvecast::ScaleTag::raw_rate) {
    std::vector<int> labels(values.rows());
    for (Eigen::Index t = 0; t < values.rows(); ++t) labels[t] = 2000 + static_cast<int>(t);
    return curvecast::FunctionalTimeSeries(
        values, curvecast::AgeGrid::uniform(lo, hi, values.cols()), labels, tag);
}

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols,
                                     std::uint64_t seed) {
    curvecast::RngStream rng(seed);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.next_normal();
    return m;
}

inline Eigen::VectorXd random_vector(Eigen::Index size, std::uint64_t seed) {
    curvecast::RngStream rng(seed);
    Eigen::VectorXd v(size);
    for (Eigen::Index i = 0; i < size; ++i) v(i) = rng.next_normal();
    return v;
}

/// Gaussian AR(1) scalar series.
inline Eigen::VectorXd ar1_series(Eigen::Index n, double phi, double sd,
                                  std::uint64_t seed) {
    curvecast::RngStream rng(seed);
    Eigen::VectorXd x(n);
    double prev = 0.0;
    for (Eigen::Index t = 0; t < n; ++t) {
        prev = phi * prev + sd * rng.next_normal();
        x(t) = prev;
    }
    return x;
}

/// Random walk, optionally with drift.
inline Eigen::VectorXd random_walk(Eigen::Index n, double drift, double sd,
                                   std::uint64_t seed) {
    curvecast::RngStream rng(seed);
    Eigen::VectorXd x(n);
    double level = 0.0;
    for (Eigen::Index t = 0; t < n; ++t) {
        level += drift + sd * rng.next_normal();
        x(t) = level;
    }
    return x;
}

/// L2-normalized (trapezoid quadrature) sine bump on [0, 1].
inline Eigen::VectorXd normalized_sine(const curvecast::AgeGrid& grid, int waves = 1) {
    Eigen::VectorXd v(grid.size());
    const double lo = grid.points()(0);
    const double span = grid.points()(grid.size() - 1) - lo;
    for (Eigen::Index j = 0; j < grid.size(); ++j) {
        const double u = (grid.points()(j) - lo) / span;
        v(j) = std::sin(waves * 3.14159265358979323846 * u);
    }
    const double norm =
        std::sqrt((v.array().square() * grid.quadrature_weights().array()).sum());
    return v / norm;
}

}  // namespace testutil
