#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "curvecast/fts.hpp"
#include "curvecast/lrcov.hpp"

namespace curvecast {

enum class BasisSource { static_cov, long_run_cov, weighted_long_run };

/// One functional principal component decomposition.
///
/// `eigenvalues` holds the full descending nonnegative spectrum (useful for
/// component-count selection); `eigenfunctions` and `scores` are truncated to
/// the retained count K. Eigenfunctions are L2-orthonormal under the grid
/// quadrature, with the sign fixed so each function's largest-magnitude
/// entry is positive.
struct FpcaBasis {
    Eigen::VectorXd eigenvalues;     // full spectrum, descending
    Eigen::MatrixXd eigenfunctions;  // p x K
    Eigen::MatrixXd scores;          // n x K
    Curve mean;
    BasisSource source;

    Eigen::Index k() const { return eigenfunctions.cols(); }
};

/// Weights w_t = kappa (1-kappa)^{n-t}, renormalized to sum exactly one.
/// Strictly increasing in t: recent curves weigh more.
struct GeometricWeights {
    double kappa;
    Eigen::VectorXd weights;
};

GeometricWeights geometric_weights(Eigen::Index n, double kappa);

/// Eigen-decompose a symmetric PSD surface as an L2 operator on the grid
/// (quadrature-weighted solve) and project the centered series onto the
/// leading k_max eigenfunctions.
FpcaBasis eigen_fpca(const CovSurface& surface, const FunctionalTimeSeries& fts,
                     Eigen::Index k_max, BasisSource source = BasisSource::long_run_cov);

/// Eigenvalue-ratio criterion with the delta mask:
///   delta = 1/ln(max(lambda_1, n)),
///   k_max = #{k : lambda_k >= mean spectrum mass / n},
///   K = argmin over 1..k_max of ratio (masked to 1 below delta); ties -> smallest k.
Eigen::Index select_k_ratio(const Eigen::VectorXd& eigenvalues, Eigen::Index n);

/// Weighted decomposition: SVD of the row-weighted differenced data matrix
/// G = diag(w) * G*, eigenfunctions from right singular vectors. Scores are
/// projections of the original centered series (unweighted mean).
FpcaBasis weighted_fpca(const FunctionalTimeSeries& diff_fts,
                        const FunctionalTimeSeries& original_fts, double kappa,
                        Eigen::Index k_max, std::vector<std::string>* warnings = nullptr);

}  // namespace curvecast
