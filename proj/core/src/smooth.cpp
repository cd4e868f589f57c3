#include "curvecast/smooth.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <vector>

namespace curvecast {

namespace {

void check_weights(const Eigen::VectorXd& weights, Eigen::Index p) {
    if (weights.size() != p) {
        throw ContractError("smooth: weight vector length does not match grid");
    }
    if ((weights.array() < 0.0).any()) {
        throw ContractError("smooth: weights must be nonnegative");
    }
    if (weights.sum() <= 0.0) {
        throw ContractError("smooth: weights must not all be zero");
    }
}

/// Second-difference penalty matrix D^T D for p grid values.
Eigen::MatrixXd second_difference_gram(Eigen::Index p) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(p - 2, p);
    for (Eigen::Index i = 0; i < p - 2; ++i) {
        d(i, i) = 1.0;
        d(i, i + 1) = -2.0;
        d(i, i + 2) = 1.0;
    }
    return d.transpose() * d;
}

/// Demmler-Reinsch diagonalization of the weighted penalized fit. With
/// V = W^{1/2} and B = V^{-1} D^T D V^{-1} = U diag(g) U^T, the fit at any
/// lambda is V^{-1} U diag(1/(1+lambda g)) U^T V y, the influence trace is
/// sum 1/(1+lambda g), and the weighted RSS is sum (lambda g z /(1+lambda g))^2.
/// One eigensolve serves every lambda, and the penalty null space (straight
/// lines) passes through exactly even at huge lambda.
struct DrBasis {
    Eigen::VectorXd g;       // eigenvalues of B, >= 0
    Eigen::MatrixXd u;       // eigenvectors
    Eigen::VectorXd sqrt_w;  // clamped sqrt weights
};

DrBasis dr_decompose(const Eigen::VectorXd& weights) {
    const Eigen::Index p = weights.size();
    const double floor = 1e-10 * weights.maxCoeff();
    const Eigen::VectorXd w = weights.cwiseMax(floor);
    DrBasis basis;
    basis.sqrt_w = w.cwiseSqrt();
    Eigen::MatrixXd b = second_difference_gram(p);
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) {
            b(i, j) /= basis.sqrt_w(i) * basis.sqrt_w(j);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
    if (es.info() != Eigen::Success) {
        throw NumericalError("smooth: Demmler-Reinsch eigensolve failed");
    }
    basis.g = es.eigenvalues().cwiseMax(0.0);
    // the straight-line null space must stay exactly unpenalized at any lambda
    const double null_tol =
        static_cast<double>(p) * std::numeric_limits<double>::epsilon() *
        basis.g.maxCoeff();
    for (Eigen::Index i = 0; i < basis.g.size(); ++i) {
        if (basis.g(i) <= null_tol) basis.g(i) = 0.0;
    }
    basis.u = es.eigenvectors();
    return basis;
}

Eigen::VectorXd dr_fit(const DrBasis& basis, const Eigen::VectorXd& y, double lambda) {
    const Eigen::VectorXd z = basis.u.transpose() * basis.sqrt_w.cwiseProduct(y);
    Eigen::VectorXd shrunk(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        shrunk(i) = z(i) / (1.0 + lambda * basis.g(i));
    }
    return (basis.u * shrunk).cwiseQuotient(basis.sqrt_w);
}

double dr_gcv_lambda(const DrBasis& basis, const Eigen::VectorXd& y) {
    const Eigen::VectorXd z = basis.u.transpose() * basis.sqrt_w.cwiseProduct(y);
    const Eigen::Index p = z.size();
    const double n = static_cast<double>(p);
    const double scale = std::max(1.0, z.squaredNorm());

    const int candidates = 41;
    double best_lambda = 0.0;
    double best_gcv = std::numeric_limits<double>::infinity();
    for (int c = 0; c < candidates; ++c) {
        // log10 lambda from -4 to 6
        const double lambda = std::pow(10.0, -4.0 + 10.0 * c / (candidates - 1));
        double rss = 0.0;
        double trace = 0.0;
        for (Eigen::Index i = 0; i < p; ++i) {
            const double shrink = 1.0 / (1.0 + lambda * basis.g(i));
            trace += shrink;
            const double resid = (1.0 - shrink) * z(i);
            rss += resid * resid;
        }
        double gcv;
        if (rss <= 1e-24 * scale) {
            gcv = 0.0;  // an exact fit at every lambda ties; smallest wins
        } else {
            const double denom = n - trace;
            gcv = (denom > 0.0) ? n * rss / (denom * denom)
                                : std::numeric_limits<double>::infinity();
        }
        if (gcv < best_gcv) {  // strict: ties keep the smaller lambda
            best_gcv = gcv;
            best_lambda = lambda;
        }
    }
    return best_lambda;
}

}  // namespace

Curve smooth_curve(const Curve& y, const Eigen::VectorXd& weights, double lambda) {
    const Eigen::Index p = y.grid.size();
    check_weights(weights, p);
    if (lambda < 0.0) {
        throw ContractError("smooth_curve: lambda must be nonnegative");
    }
    if (lambda == 0.0) {
        if ((weights.array() <= 0.0).any()) {
            throw NumericalError("smooth_curve: lambda = 0 needs strictly positive weights");
        }
        return y;  // interpolation limit
    }
    const DrBasis basis = dr_decompose(weights);
    return Curve(dr_fit(basis, y.values, lambda), y.grid);
}

double select_lambda_gcv(const Curve& y, const Eigen::VectorXd& weights) {
    check_weights(weights, y.grid.size());
    return dr_gcv_lambda(dr_decompose(weights), y.values);
}

Curve monotone_project(const Curve& f, double from_age, const Eigen::VectorXd& weights) {
    const Eigen::Index p = f.grid.size();
    check_weights(weights, p);
    const Eigen::VectorXd& ages = f.grid.points();
    if (from_age < ages(0) || from_age > ages(p - 1)) {
        throw ContractError("monotone_project: from_age outside the grid");
    }
    Eigen::Index start = 0;
    while (start < p && ages(start) < from_age) ++start;
    if (p - start < 2) {
        return f;
    }

    // Pool-adjacent-violators on the tail.
    struct Block {
        double mean;
        double weight;
        Eigen::Index count;
    };
    std::vector<Block> blocks;
    blocks.reserve(p - start);
    for (Eigen::Index j = start; j < p; ++j) {
        blocks.push_back({f.values(j), weights(j), 1});
        while (blocks.size() > 1 &&
               blocks[blocks.size() - 2].mean > blocks.back().mean) {
            Block top = blocks.back();
            blocks.pop_back();
            Block& prev = blocks.back();
            const double total = prev.weight + top.weight;
            prev.mean = (total > 0.0)
                            ? (prev.mean * prev.weight + top.mean * top.weight) / total
                            : 0.5 * (prev.mean + top.mean);
            prev.weight = total;
            prev.count += top.count;
        }
    }

    Eigen::VectorXd out = f.values;
    Eigen::Index j = start;
    for (const Block& block : blocks) {
        for (Eigen::Index c = 0; c < block.count; ++c) {
            out(j++) = block.mean;
        }
    }
    return Curve(std::move(out), f.grid);
}

Curve smooth_log_mortality(const Curve& y, const Eigen::VectorXd& weights,
                           const SmoothingSpec& spec) {
    check_weights(weights, y.grid.size());
    Curve fitted = y;
    if (spec.auto_lambda()) {
        const DrBasis basis = dr_decompose(weights);
        const double lambda = dr_gcv_lambda(basis, y.values);
        fitted = Curve(dr_fit(basis, y.values, lambda), y.grid);
    } else if (spec.lambda > 0.0) {
        fitted = smooth_curve(y, weights, spec.lambda);
    }
    return monotone_project(fitted, spec.monotone_from_age, weights);
}

}  // namespace curvecast
