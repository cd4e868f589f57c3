#include "curvecast/dfpca.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace curvecast {

namespace {

/// Flip columns so the largest-magnitude entry of each is positive.
/// First index wins on exact magnitude ties.
void apply_sign_convention(Eigen::MatrixXd& columns) {
    for (Eigen::Index k = 0; k < columns.cols(); ++k) {
        Eigen::Index arg = 0;
        double best = -1.0;
        for (Eigen::Index j = 0; j < columns.rows(); ++j) {
            const double a = std::abs(columns(j, k));
            if (a > best) {
                best = a;
                arg = j;
            }
        }
        if (columns(arg, k) < 0.0) {
            columns.col(k) = -columns.col(k);
        }
    }
}

Eigen::MatrixXd project_scores(const FunctionalTimeSeries& fts, const Curve& mean,
                               const Eigen::MatrixXd& eigenfunctions) {
    const Eigen::MatrixXd centered = fts.values().rowwise() - mean.values.transpose();
    const Eigen::VectorXd& w = fts.grid().quadrature_weights();
    return centered * w.asDiagonal() * eigenfunctions;
}

}  // namespace

FpcaBasis eigen_fpca(const CovSurface& surface, const FunctionalTimeSeries& fts,
                     Eigen::Index k_max, BasisSource source) {
    const Eigen::Index p = surface.values.rows();
    if (surface.values.cols() != p || p != fts.p()) {
        throw ContractError("eigen_fpca: surface does not match the series grid");
    }
    const double scale = std::max(1.0, surface.values.cwiseAbs().maxCoeff());
    const double asym = (surface.values - surface.values.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-8 * scale) {
        throw ContractError("eigen_fpca: surface asymmetric beyond tolerance");
    }

    // Quadrature-weighted operator eigensolve: A = W^{1/2} C W^{1/2} keeps the
    // problem symmetric; eigenvectors map back to L2-orthonormal functions
    // via W^{-1/2}.
    const Eigen::VectorXd w = fts.grid().quadrature_weights();
    const Eigen::VectorXd sqrt_w = w.cwiseSqrt();
    const Eigen::MatrixXd a =
        sqrt_w.asDiagonal() * surface.values * sqrt_w.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (a + a.transpose()));
    if (es.info() != Eigen::Success) {
        throw NumericalError("eigen_fpca: eigensolve failed");
    }

    const Eigen::Index k = std::min(k_max, p);
    FpcaBasis basis{
        Eigen::VectorXd(p), Eigen::MatrixXd(p, k), Eigen::MatrixXd(),
        mean_function(fts), source};
    for (Eigen::Index i = 0; i < p; ++i) {
        basis.eigenvalues(i) = std::max(es.eigenvalues()(p - 1 - i), 0.0);
    }
    for (Eigen::Index i = 0; i < k; ++i) {
        basis.eigenfunctions.col(i) =
            es.eigenvectors().col(p - 1 - i).cwiseQuotient(sqrt_w);
    }
    apply_sign_convention(basis.eigenfunctions);
    basis.scores = project_scores(fts, basis.mean, basis.eigenfunctions);
    return basis;
}

Eigen::Index select_k_ratio(const Eigen::VectorXd& eigenvalues, Eigen::Index n) {
    const Eigen::Index len = eigenvalues.size();
    if (len < 2) {
        throw ContractError("select_k_ratio: need at least two eigenvalues");
    }
    const double lambda1 = eigenvalues(0);
    if (!(lambda1 > 0.0)) {
        throw NumericalError("select_k_ratio: degenerate spectrum (no positive eigenvalue)");
    }

    const Eigen::Index mass_terms = std::min<Eigen::Index>(len, n);
    const double threshold =
        eigenvalues.head(mass_terms).sum() / static_cast<double>(n);
    Eigen::Index k_max = 0;
    for (Eigen::Index i = 0; i < len; ++i) {
        if (eigenvalues(i) >= threshold) ++k_max;
    }
    k_max = std::clamp<Eigen::Index>(k_max, 1, len - 1);

    const double delta =
        1.0 / std::log(std::max(lambda1, static_cast<double>(n)));

    Eigen::Index best_k = 1;
    double best_value = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 1; k <= k_max; ++k) {
        const double lam_k = eigenvalues(k - 1);
        double value;
        if (lam_k / lambda1 >= delta) {
            value = (lam_k > 0.0) ? eigenvalues(k) / lam_k : 1.0;
        } else {
            value = 1.0;
        }
        if (value < best_value) {
            best_value = value;
            best_k = k;
        }
    }
    return best_k;
}

GeometricWeights geometric_weights(Eigen::Index n, double kappa) {
    if (!(kappa > 0.0 && kappa < 1.0)) {
        throw ContractError("geometric_weights: kappa must lie in (0, 1)");
    }
    if (n < 1) {
        throw ContractError("geometric_weights: need n >= 1");
    }
    Eigen::VectorXd w(n);
    for (Eigen::Index t = 0; t < n; ++t) {
        w(t) = kappa * std::pow(1.0 - kappa, static_cast<double>(n - 1 - t));
    }
    w /= w.sum();
    return GeometricWeights{kappa, std::move(w)};
}

FpcaBasis weighted_fpca(const FunctionalTimeSeries& diff_fts,
                        const FunctionalTimeSeries& original_fts, double kappa,
                        Eigen::Index k_max, std::vector<std::string>* warnings) {
    if (diff_fts.scale() != ScaleTag::differenced) {
        throw ContractError("weighted_fpca: expects the differenced series");
    }
    if (!diff_fts.grid().same_as(original_fts.grid())) {
        throw ContractError("weighted_fpca: differenced and original grids differ");
    }
    const Eigen::Index m = diff_fts.n();
    const Eigen::Index p = diff_fts.p();

    const GeometricWeights gw = geometric_weights(m, kappa);
    const Eigen::VectorXd w = diff_fts.grid().quadrature_weights();
    const Eigen::VectorXd sqrt_w = w.cwiseSqrt();

    // Row weighting exactly as the construction states (w_t, not sqrt(w_t));
    // column scaling keeps the right singular vectors quadrature-orthonormal.
    const Eigen::MatrixXd g =
        gw.weights.asDiagonal() * diff_fts.values() * sqrt_w.asDiagonal();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(g, Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const Eigen::Index spectrum_len = sv.size();

    const double rank_tol = std::max(m, p) *
                            std::numeric_limits<double>::epsilon() *
                            (spectrum_len > 0 ? sv(0) : 0.0);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < spectrum_len; ++i) {
        if (sv(i) > rank_tol) ++rank;
    }
    if (k_max > rank && warnings) {
        warnings->push_back("weighted_fpca: requested " + std::to_string(k_max) +
                            " components but rank is " + std::to_string(rank) +
                            "; truncating");
    }
    const Eigen::Index k =
        std::max<Eigen::Index>(std::min({k_max, spectrum_len, rank}), 1);

    FpcaBasis basis{
        sv.array().square().matrix(), Eigen::MatrixXd(p, k), Eigen::MatrixXd(),
        mean_function(original_fts), BasisSource::weighted_long_run};
    for (Eigen::Index i = 0; i < k; ++i) {
        basis.eigenfunctions.col(i) = svd.matrixV().col(i).cwiseQuotient(sqrt_w);
    }
    apply_sign_convention(basis.eigenfunctions);
    basis.scores = project_scores(original_fts, basis.mean, basis.eigenfunctions);
    return basis;
}

}  // namespace curvecast
