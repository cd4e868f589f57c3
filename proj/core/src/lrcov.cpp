#include "curvecast/lrcov.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace curvecast {

double KernelSpec::weight(double x) const {
    const double a = std::abs(x);
    switch (kind) {
        case KernelKind::bartlett:
            return a <= 1.0 ? 1.0 - a : 0.0;
        case KernelKind::parzen:
            if (a <= 0.5) return 1.0 - 6.0 * a * a + 6.0 * a * a * a;
            if (a <= 1.0) {
                const double b = 1.0 - a;
                return 2.0 * b * b * b;
            }
            return 0.0;
        case KernelKind::flat_top:
            if (a <= 1.0) return 1.0;
            if (a <= 2.0) return 2.0 - a;
            return 0.0;
    }
    return 0.0;
}

int KernelSpec::support_lags(double eta, Eigen::Index n) const {
    int bound;
    if (kind == KernelKind::flat_top) {
        bound = static_cast<int>(std::ceil(2.0 * eta));
    } else {
        bound = static_cast<int>(std::floor(eta));
    }
    return std::min<int>(bound, static_cast<int>(n) - 1);
}

KernelSpec KernelSpec::parse(const std::string& name, double eta) {
    KernelSpec spec;
    if (name == "bartlett") {
        spec.kind = KernelKind::bartlett;
    } else if (name == "parzen") {
        spec.kind = KernelKind::parzen;
    } else if (name == "flat_top") {
        spec.kind = KernelKind::flat_top;
    } else {
        throw ContractError("unknown kernel '" + name + "' (bartlett|parzen|flat_top)");
    }
    spec.bandwidth_eta = eta;
    return spec;
}

CovSurface autocov(const FunctionalTimeSeries& fts, int lag) {
    const Eigen::Index n = fts.n();
    if (std::abs(lag) >= n) {
        throw ContractError("autocov: |lag| must be < n");
    }
    const Eigen::MatrixXd centered =
        fts.values().rowwise() - fts.values().colwise().mean();
    const Eigen::Index m = n - std::abs(lag);
    Eigen::MatrixXd gamma;
    if (lag >= 0) {
        gamma = centered.topRows(m).transpose() * centered.bottomRows(m);
    } else {
        gamma = centered.bottomRows(m).transpose() * centered.topRows(m);
    }
    gamma /= static_cast<double>(n);
    return CovSurface{std::move(gamma), fts.grid(), CovKind::lag_cov};
}

Eigen::MatrixXd psd_project(const Eigen::MatrixXd& surface) {
    Eigen::MatrixXd sym = 0.5 * (surface + surface.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    Eigen::VectorXd vals = es.eigenvalues().cwiseMax(0.0);
    Eigen::MatrixXd clipped =
        es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().transpose();
    // clipping can reintroduce asymmetry at roundoff level
    return 0.5 * (clipped + clipped.transpose());
}

CovSurface long_run_cov_raw(const FunctionalTimeSeries& fts, const KernelSpec& kernel,
                            double eta) {
    if (eta <= 0.0) {
        throw ContractError("long_run_cov: bandwidth must be positive");
    }
    const Eigen::Index n = fts.n();
    const int max_lag = kernel.support_lags(eta, n);
    const Eigen::Index p = fts.p();
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(p, p);
    for (int lag = -max_lag; lag <= max_lag; ++lag) {
        const double w = kernel.weight(static_cast<double>(lag) / eta);
        if (w == 0.0) continue;
        sum += w * autocov(fts, lag).values;
    }
    return CovSurface{std::move(sum), fts.grid(), CovKind::long_run};
}

CovSurface long_run_cov(const FunctionalTimeSeries& fts, const KernelSpec& kernel,
                        std::vector<std::string>* warnings) {
    if (fts.n() < 4) {
        throw DataError("long_run_cov: need at least 4 curves");
    }
    const double eta = kernel.auto_bandwidth()
                           ? plugin_bandwidth(fts, kernel, warnings)
                           : kernel.bandwidth_eta;
    CovSurface raw = long_run_cov_raw(fts, kernel, eta);
    raw.values = psd_project(raw.values);
    return raw;
}

double hs_norm(const Eigen::MatrixXd& surface, const AgeGrid& grid) {
    const Eigen::VectorXd& w = grid.quadrature_weights();
    return std::sqrt((surface.array().square().matrix().transpose() * w).dot(w));
}

double plugin_bandwidth(const FunctionalTimeSeries& fts, const KernelSpec& kernel,
                        std::vector<std::string>* warnings) {
    const Eigen::Index n = fts.n();
    if (n < 10) {
        throw DataError("plugin_bandwidth: need at least 10 curves");
    }
    const int q = kernel.order_q();
    const double pilot = std::pow(static_cast<double>(n), 0.2);
    const int pilot_lags = std::min<int>(static_cast<int>(std::floor(pilot)),
                                         static_cast<int>(n) - 1);

    const Eigen::Index p = fts.p();
    Eigen::MatrixXd s0 = Eigen::MatrixXd::Zero(p, p);
    Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(p, p);
    for (int lag = -pilot_lags; lag <= pilot_lags; ++lag) {
        const Eigen::MatrixXd gamma = autocov(fts, lag).values;
        s0 += gamma;
        sq += std::pow(std::abs(static_cast<double>(lag)), q) * gamma;
    }
    const double f0 = hs_norm(s0, fts.grid());
    const double fq = hs_norm(sq, fts.grid());
    if (f0 <= 0.0) {
        if (warnings) {
            warnings->push_back("plugin_bandwidth: degenerate (constant) series; using floor 1.0");
        }
        return 1.0;
    }

    // Constant from the minimized asymptotic MSE, c = (q w_q^2 / int W^2)^{1/(2q+1)}:
    // bartlett (3/2)^{1/3}, parzen (20160/151)^{1/5}. The flat-top taper has no
    // leading bias term, so the same-rate parzen constant is adopted for it.
    double c_w = 0.0;
    switch (kernel.kind) {
        case KernelKind::bartlett:
            c_w = std::cbrt(1.5);
            break;
        case KernelKind::parzen:
        case KernelKind::flat_top:
            c_w = std::pow(20160.0 / 151.0, 0.2);
            break;
    }

    const double exponent = 1.0 / (2.0 * q + 1.0);
    const double ratio = (fq * fq) / (f0 * f0);
    const double eta = c_w * std::pow(ratio, exponent) *
                       std::pow(static_cast<double>(n), exponent);
    return std::max(eta, 1.0);
}

}  // namespace curvecast
