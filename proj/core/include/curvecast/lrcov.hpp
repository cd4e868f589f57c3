#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "curvecast/fts.hpp"

namespace curvecast {

enum class CovKind { lag_cov, long_run };

/// Covariance surface C(u_i, u_j) sampled on the grid.
struct CovSurface {
    Eigen::MatrixXd values;  // p x p
    AgeGrid grid;
    CovKind kind;
};

enum class KernelKind { bartlett, parzen, flat_top };

/// Lag-window weight function W_q(l/eta) with bounded support.
///
/// bartlett: 1-|x| on [-1,1], order q=1.
/// parzen:   the cubic taper on [-1,1], order q=2.
/// flat_top: 1 on [-1,1], linear decay to 0 at |x|=2, order q=2.
struct KernelSpec {
    KernelKind kind = KernelKind::bartlett;
    double bandwidth_eta = 0.0;  // <= 0 means "auto" (plug-in)

    int order_q() const { return kind == KernelKind::bartlett ? 1 : 2; }
    double weight(double x) const;
    /// Largest |l| with a nonzero weight at bandwidth eta.
    int support_lags(double eta, Eigen::Index n) const;

    bool auto_bandwidth() const { return bandwidth_eta <= 0.0; }
    static KernelSpec parse(const std::string& name, double eta);
};

/// Lag-l empirical autocovariance surface; divisor n in both lag signs.
CovSurface autocov(const FunctionalTimeSeries& fts, int lag);

/// Kernel-sandwich long-run covariance: sum of weighted lag covariances,
/// symmetrized and eigenvalue-clipped to be positive semidefinite.
/// Resolves the bandwidth with plugin_bandwidth when the spec says auto.
CovSurface long_run_cov(const FunctionalTimeSeries& fts, const KernelSpec& kernel,
                        std::vector<std::string>* warnings = nullptr);

/// The unsymmetrized, unclipped weighted lag sum (testing/diagnostics).
CovSurface long_run_cov_raw(const FunctionalTimeSeries& fts, const KernelSpec& kernel,
                            double eta);

/// Two-stage pilot plug-in bandwidth:
///   eta0 = n^{1/5};
///   F0 = ||sum of lag covariances within eta0||_HS,
///   Fq = ||sum of |l|^q-weighted lag covariances within eta0||_HS;
///   eta = c_W (Fq^2/F0^2)^{1/(2q+1)} n^{1/(2q+1)}, floored at 1.
double plugin_bandwidth(const FunctionalTimeSeries& fts, const KernelSpec& kernel,
                        std::vector<std::string>* warnings = nullptr);

/// Hilbert-Schmidt norm of a surface under trapezoid quadrature.
double hs_norm(const Eigen::MatrixXd& surface, const AgeGrid& grid);

/// Symmetrize then clip negative eigenvalues to zero.
Eigen::MatrixXd psd_project(const Eigen::MatrixXd& surface);

}  // namespace curvecast
