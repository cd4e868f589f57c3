#include "curvecast/scorecast.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <tuple>

#include "curvecast/optim.hpp"

namespace curvecast {

// ---------------------------------------------------------------------------
// KPSS
// ---------------------------------------------------------------------------

Eigen::VectorXd difference(const Eigen::VectorXd& series, int times) {
    Eigen::VectorXd out = series;
    for (int i = 0; i < times; ++i) {
        if (out.size() < 2) {
            throw DataError("difference: series too short");
        }
        out = (out.tail(out.size() - 1) - out.head(out.size() - 1)).eval();
    }
    return out;
}

double kpss_statistic(const Eigen::VectorXd& series, bool trend) {
    const Eigen::Index n = series.size();
    if (n < 10) {
        throw DataError("kpss_statistic: need length >= 10");
    }

    Eigen::VectorXd resid;
    if (trend) {
        Eigen::MatrixXd x(n, 2);
        x.col(0).setOnes();
        x.col(1) = Eigen::VectorXd::LinSpaced(n, 1.0, static_cast<double>(n));
        const Eigen::VectorXd beta = x.colPivHouseholderQr().solve(series);
        resid = series - x * beta;
    } else {
        resid = series.array() - series.mean();
    }

    const double scale = std::max(1.0, series.cwiseAbs().maxCoeff());
    if (resid.cwiseAbs().maxCoeff() <= 1e-14 * scale) {
        return 0.0;  // zero-variance convention
    }

    const int lags = static_cast<int>(
        std::floor(4.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
    double lrv = resid.squaredNorm() / static_cast<double>(n);
    for (int l = 1; l <= std::min<int>(lags, static_cast<int>(n) - 1); ++l) {
        const double gamma =
            resid.head(n - l).dot(resid.tail(n - l)) / static_cast<double>(n);
        lrv += 2.0 * (1.0 - static_cast<double>(l) / (lags + 1.0)) * gamma;
    }
    if (lrv <= 0.0) {
        return 0.0;
    }

    double cum = 0.0;
    double stat = 0.0;
    for (Eigen::Index t = 0; t < n; ++t) {
        cum += resid(t);
        stat += cum * cum;
    }
    return stat / (static_cast<double>(n) * static_cast<double>(n) * lrv);
}

int select_d(const Eigen::VectorXd& series, int max_d, bool trend,
             std::vector<std::string>* warnings) {
    const double critical = trend ? kKpssTrendCritical5 : kKpssLevelCritical5;
    for (int d = 0; d <= max_d; ++d) {
        const Eigen::VectorXd z = difference(series, d);
        if (z.size() < 10) {
            throw DataError("select_d: series too short after differencing");
        }
        if (kpss_statistic(z, trend) < critical) {
            return d;
        }
    }
    if (warnings) {
        warnings->push_back("select_d: still nonstationary at d = " +
                            std::to_string(max_d) + "; returning max_d");
    }
    return max_d;
}

// ---------------------------------------------------------------------------
// ARIMA internals
// ---------------------------------------------------------------------------

namespace {

/// Expand partial autocorrelations into AR coefficients (Durbin-Levinson).
Eigen::VectorXd pacf_to_coeffs(const Eigen::VectorXd& pacf) {
    const Eigen::Index k = pacf.size();
    Eigen::VectorXd a = Eigen::VectorXd::Zero(k);
    Eigen::VectorXd prev(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        prev = a;
        a(j) = pacf(j);
        for (Eigen::Index i = 0; i < j; ++i) {
            a(i) = prev(i) - pacf(j) * prev(j - 1 - i);
        }
    }
    return a;
}

/// Inverse roots of 1 - sum c_i B^i (AR form).
Eigen::VectorXcd inverse_roots(const Eigen::VectorXd& coeffs) {
    int deg = static_cast<int>(coeffs.size());
    while (deg > 0 && std::abs(coeffs(deg - 1)) < 1e-300) --deg;
    if (deg == 0) return Eigen::VectorXcd(0);
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
    companion.row(0) = coeffs.head(deg).transpose();
    for (int i = 1; i < deg; ++i) {
        companion(i, i - 1) = 1.0;
    }
    return companion.eigenvalues();
}

double max_inverse_root(const Eigen::VectorXd& coeffs) {
    const Eigen::VectorXcd roots = inverse_roots(coeffs);
    return roots.size() == 0 ? 0.0 : roots.cwiseAbs().maxCoeff();
}

/// An AR root nearly shared with an MA root means a redundant common factor:
/// the fit sits on a non-identifiable cancellation manifold and its
/// coefficients are arbitrary along it.
bool has_common_factor(const Eigen::VectorXd& ar, const Eigen::VectorXd& ma,
                       double tolerance) {
    const Eigen::VectorXcd ar_roots = inverse_roots(ar);
    const Eigen::VectorXcd ma_roots = inverse_roots(ma);
    for (Eigen::Index i = 0; i < ar_roots.size(); ++i) {
        for (Eigen::Index j = 0; j < ma_roots.size(); ++j) {
            if (std::abs(ar_roots(i) - ma_roots(j)) < tolerance) return true;
        }
    }
    return false;
}

struct ArimaParams {
    Eigen::VectorXd ar;
    Eigen::VectorXd ma;
    double mu = 0.0;
};

/// Unconstrained optimizer vector -> (ar, ma, mu). AR and MA entries pass
/// through tanh into partial autocorrelations, which keeps every candidate
/// causal and invertible during the search.
ArimaParams unpack(const Eigen::VectorXd& theta, int p, int q, bool with_constant,
                   double mu_center, double mu_scale) {
    ArimaParams params;
    params.ar = pacf_to_coeffs(theta.head(p).array().tanh().matrix());
    // the transform produces AR-form coefficients; MA needs the sign flipped
    params.ma = -pacf_to_coeffs(theta.segment(p, q).array().tanh().matrix());
    params.mu = with_constant ? mu_center + mu_scale * theta(p + q) : 0.0;
    return params;
}

Eigen::VectorXd compute_innovations(const Eigen::VectorXd& z, const ArimaParams& params) {
    const Eigen::Index n = z.size();
    const Eigen::Index p = params.ar.size();
    const Eigen::Index q = params.ma.size();
    Eigen::VectorXd e(n);
    for (Eigen::Index t = 0; t < n; ++t) {
        double pred = 0.0;
        for (Eigen::Index i = 0; i < p && i < t; ++i) {
            pred += params.ar(i) * (z(t - 1 - i) - params.mu);
        }
        for (Eigen::Index j = 0; j < q && j < t; ++j) {
            pred += params.ma(j) * e(t - 1 - j);
        }
        e(t) = (z(t) - params.mu) - pred;
    }
    return e;
}

double css_objective(const Eigen::VectorXd& z, const ArimaParams& params) {
    const Eigen::Index p = params.ar.size();
    const Eigen::VectorXd e = compute_innovations(z, params);
    const Eigen::Index start = std::min<Eigen::Index>(p, z.size());
    return e.tail(e.size() - start).squaredNorm();
}

struct KalmanResult {
    double loglik = -std::numeric_limits<double>::infinity();
    double sigma2 = 0.0;
    bool ok = false;
};

/// Exact Gaussian likelihood of a zero-mean ARMA via the Harvey state space
/// form with sigma^2 concentrated out. Switches to fixed gains once the
/// innovation variance has converged.
KalmanResult arma_kalman_loglik(const Eigen::VectorXd& z_centered,
                                const Eigen::VectorXd& ar, const Eigen::VectorXd& ma) {
    KalmanResult result;
    const int p = static_cast<int>(ar.size());
    const int q = static_cast<int>(ma.size());
    const int m = std::max(p, q + 1);
    const Eigen::Index n = z_centered.size();

    Eigen::MatrixXd t_mat = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < p; ++i) t_mat(i, 0) = ar(i);
    for (int i = 0; i + 1 < m; ++i) t_mat(i, i + 1) = 1.0;
    Eigen::VectorXd r_vec = Eigen::VectorXd::Zero(m);
    r_vec(0) = 1.0;
    for (int j = 0; j < q; ++j) r_vec(j + 1) = ma(j);
    const Eigen::MatrixXd rr = r_vec * r_vec.transpose();

    // stationary initial covariance: vec(P) = (I - T (x) T)^{-1} vec(R R')
    Eigen::MatrixXd sys(m * m, m * m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l)
                    sys(i * m + j, k * m + l) =
                        ((i == k && j == l) ? 1.0 : 0.0) - t_mat(i, k) * t_mat(j, l);
    Eigen::VectorXd rr_vec(m * m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) rr_vec(i * m + j) = rr(i, j);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys);
    const Eigen::VectorXd p_vec = lu.solve(rr_vec);
    if (!p_vec.array().isFinite().all()) {
        return result;
    }
    Eigen::MatrixXd cov(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) cov(i, j) = p_vec(i * m + j);
    cov = 0.5 * (cov + cov.transpose()).eval();

    Eigen::VectorXd state = Eigen::VectorXd::Zero(m);
    double ssq = 0.0;
    double sum_log_f = 0.0;
    double f_prev = -1.0;
    bool steady = false;
    Eigen::VectorXd gain(m);
    double f = 0.0;

    for (Eigen::Index t = 0; t < n; ++t) {
        if (!steady) {
            f = cov(0, 0);
            if (!(f > 1e-12)) {
                return result;
            }
            gain = t_mat * cov.col(0);
            if (f_prev > 0.0 && std::abs(f - f_prev) < 1e-13 * f) {
                steady = true;
            } else {
                const Eigen::MatrixXd tp = t_mat * cov;
                cov = tp * t_mat.transpose() - gain * gain.transpose() / f + rr;
                cov = 0.5 * (cov + cov.transpose()).eval();
            }
            f_prev = f;
        }
        const double v = z_centered(t) - state(0);
        ssq += v * v / f;
        sum_log_f += std::log(f);
        state = t_mat * state + gain * (v / f);
    }

    const double sigma2 = ssq / static_cast<double>(n);
    result.sigma2 = sigma2;
    result.loglik = -0.5 * static_cast<double>(n) *
                        (std::log(2.0 * std::numbers::pi) + 1.0 +
                         std::log(std::max(sigma2, 1e-300))) -
                    0.5 * sum_log_f;
    result.ok = true;
    return result;
}

/// `approximate` keeps the CSS solution and scores the AICc from the
/// conditional sum of squares instead of the exact likelihood.
ArimaModel detail_fit_arima(const Eigen::VectorXd& series, int p, int d, int q,
                            bool with_constant, bool approximate) {
    if (p < 0 || q < 0 || d < 0 || d > 2) {
        throw ContractError("fit_arima: invalid orders");
    }
    const Eigen::VectorXd z = difference(series, d);
    const Eigen::Index nz = z.size();
    const int k = p + q + (with_constant ? 1 : 0) + 1;
    if (nz <= p + q + 2 || nz - k - 1 <= 0) {
        throw NumericalError("fit_arima: too few observations for this order");
    }

    const double mu_center = z.mean();
    const double z_sd = std::sqrt((z.array() - mu_center).square().sum() /
                                  static_cast<double>(std::max<Eigen::Index>(nz - 1, 1)));
    const double mu_scale = std::max(z_sd, 1e-8);

    ArimaModel model;
    model.p = p;
    model.d = d;
    model.q = q;
    model.with_constant = with_constant;
    model.drift = (d == 1 && with_constant);
    model.series = series;

    if (z_sd <= 1e-12 * std::max(1.0, std::abs(mu_center))) {
        // degenerate: the differenced series is constant
        if (p > 0 || q > 0) {
            throw NumericalError("fit_arima: constant series admits only (0,d,0)");
        }
        model.ar.resize(0);
        model.ma.resize(0);
        model.mu = with_constant ? mu_center : 0.0;
        model.intercept = model.mu;
        model.sigma2 = (z.array() - model.mu).square().sum() / static_cast<double>(nz);
        if (model.sigma2 <= 1e-300) {
            model.loglik = std::numeric_limits<double>::infinity();
            model.aicc = -std::numeric_limits<double>::infinity();
        } else {
            model.loglik = -0.5 * static_cast<double>(nz) *
                           (std::log(2.0 * std::numbers::pi * model.sigma2) + 1.0);
            model.aicc = -2.0 * model.loglik + 2.0 * k +
                         2.0 * k * (k + 1.0) / (static_cast<double>(nz) - k - 1.0);
        }
        return model;
    }

    // zero-initialized CSS, as the standard CSS-ML estimation convention
    const int dim = p + q + (with_constant ? 1 : 0);
    Eigen::VectorXd theta0 = Eigen::VectorXd::Zero(dim);

    auto css = [&](const Eigen::VectorXd& theta) {
        return css_objective(z, unpack(theta, p, q, with_constant, mu_center, mu_scale));
    };
    auto negloglik = [&](const Eigen::VectorXd& theta) {
        const ArimaParams params = unpack(theta, p, q, with_constant, mu_center, mu_scale);
        const KalmanResult kf =
            arma_kalman_loglik(z.array() - params.mu, params.ar, params.ma);
        return kf.ok ? -kf.loglik : std::numeric_limits<double>::max();
    };

    // CSS minimization from a neutral start, then likelihood ascent from the
    // CSS solution
    Eigen::VectorXd theta = theta0;
    if (dim > 0) {
        theta = nelder_mead(css, theta0, 0.3, 40 * dim, 1e-9).x;
        if (!approximate) {
            theta = nelder_mead(negloglik, theta, 0.05, 60 + 40 * dim, 1e-11).x;
        }
    }

    const ArimaParams params = unpack(theta, p, q, with_constant, mu_center, mu_scale);
    KalmanResult kf;
    if (approximate) {
        // conditional Gaussian likelihood at the CSS solution
        const double sse = css_objective(z, params);
        const double n_used = static_cast<double>(nz - p);
        kf.sigma2 = sse / n_used;
        kf.loglik = -0.5 * n_used *
                    (std::log(2.0 * std::numbers::pi) + 1.0 +
                     std::log(std::max(kf.sigma2, 1e-300)));
        kf.ok = true;
    } else {
        kf = arma_kalman_loglik(z.array() - params.mu, params.ar, params.ma);
    }
    if (!kf.ok || !std::isfinite(kf.loglik)) {
        throw NumericalError("fit_arima: likelihood evaluation failed");
    }

    // reject fits whose AR or MA roots sit within 0.1% of the unit circle,
    // the conventional screen against boundary pile-up solutions
    const double margin = 1.0 / 1.001;
    if (max_inverse_root(params.ar) > margin ||
        max_inverse_root(-params.ma) > margin) {
        throw NumericalError("fit_arima: roots too close to the unit circle");
    }
    if (has_common_factor(params.ar, -params.ma, 0.05)) {
        throw NumericalError("fit_arima: redundant AR/MA common factor");
    }

    model.ar = params.ar;
    model.ma = params.ma;
    model.mu = params.mu;
    model.intercept = params.mu * (1.0 - params.ar.sum());
    model.sigma2 = kf.sigma2;
    model.loglik = kf.loglik;
    const double nzd = static_cast<double>(nz);
    model.aicc = -2.0 * kf.loglik + 2.0 * k +
                 2.0 * k * (k + 1.0) / (nzd - k - 1.0);
    return model;
}

}  // namespace

ArimaModel fit_arima(const Eigen::VectorXd& series, int p, int d, int q,
                     bool with_constant) {
    return detail_fit_arima(series, p, d, q, with_constant, false);
}

ArimaModel fit_arima_auto(const Eigen::VectorXd& series,
                          std::vector<std::string>* warnings, bool kpss_trend) {
    const Eigen::Index n = series.size();
    if (n < 15) {
        throw DataError("fit_arima_auto: need length >= 15");
    }

    const double scale = std::max(1.0, series.cwiseAbs().maxCoeff());
    if ((series.maxCoeff() - series.minCoeff()) <= 1e-12 * scale) {
        ArimaModel model;
        model.series = series;
        model.with_constant = true;
        model.mu = series(0);
        model.intercept = series(0);
        model.sigma2 = 0.0;
        model.loglik = std::numeric_limits<double>::infinity();
        model.aicc = -std::numeric_limits<double>::infinity();
        return model;
    }

    const int d = select_d(series, 2, kpss_trend, warnings);

    // Long series: select orders on the conditional-likelihood approximation
    // and refit the winner exactly, the usual speed/robustness trade.
    const bool approximate = (n > 150);

    // Stepwise neighborhood search over (p, q, constant), p and q in 0..5.
    // Start from the four conventional anchors, then repeatedly move to the
    // best unseen neighbor (p+-1, q+-1, constant toggled) until no move
    // improves the AICc. Ties prefer fewer parameters, then lower p, q.
    std::optional<ArimaModel> best;
    auto better = [](const ArimaModel& a, const ArimaModel& b) {
        const int ka = a.p + a.q + (a.with_constant ? 1 : 0);
        const int kb = b.p + b.q + (b.with_constant ? 1 : 0);
        return std::tie(a.aicc, ka, a.p, a.q, a.with_constant) <
               std::tie(b.aicc, kb, b.p, b.q, b.with_constant);
    };
    std::map<std::tuple<int, int, bool>, std::optional<ArimaModel>> fitted;
    auto fit_cached = [&](int p, int q, bool constant) -> const std::optional<ArimaModel>& {
        static const std::optional<ArimaModel> none;
        if (p < 0 || p > 5 || q < 0 || q > 5 || p + q > 5) return none;
        if (constant && d > 1) return none;
        const auto key = std::make_tuple(p, q, constant);
        const auto hit = fitted.find(key);
        if (hit != fitted.end()) return hit->second;
        std::optional<ArimaModel> candidate;
        try {
            candidate = detail_fit_arima(series, p, d, q, constant, approximate);
        } catch (const NumericalError&) {
            // candidate infeasible or rejected by the root/redundancy checks
        }
        return fitted.emplace(key, std::move(candidate)).first->second;
    };
    auto consider = [&](int p, int q, bool constant) {
        const std::optional<ArimaModel>& candidate = fit_cached(p, q, constant);
        if (candidate && (!best || better(*candidate, *best))) {
            best = *candidate;
        }
    };

    const bool allow_constant = (d <= 1);
    consider(2, 2, allow_constant);
    consider(0, 0, allow_constant);
    consider(1, 0, allow_constant);
    consider(0, 1, allow_constant);
    consider(0, 0, false);

    bool moved = true;
    while (moved && best) {
        moved = false;
        const int p = best->p;
        const int q = best->q;
        const bool constant = best->with_constant;
        const ArimaModel snapshot = *best;
        for (const auto& [dp, dq] : {std::pair{-1, 0}, {1, 0}, {0, -1}, {0, 1},
                                     {-1, -1}, {1, 1}, {-1, 1}, {1, -1}, {0, 0}}) {
            const bool toggle = (dp == 0 && dq == 0);
            consider(p + dp, q + dq, toggle ? !constant : constant);
        }
        if (best->p != snapshot.p || best->q != snapshot.q ||
            best->with_constant != snapshot.with_constant) {
            moved = true;
        }
    }

    // Parsimony sweep: a nested submodel within 2 AICc units of the winner is
    // statistically indistinguishable from it; prefer the smaller model.
    bool pruned = best.has_value();
    while (pruned) {
        pruned = false;
        const int p = best->p;
        const int q = best->q;
        const bool constant = best->with_constant;
        std::optional<ArimaModel> sub;
        auto try_sub = [&](int sp, int sq, bool sc) {
            const std::optional<ArimaModel>& candidate = fit_cached(sp, sq, sc);
            if (candidate && candidate->aicc <= best->aicc + 2.0 &&
                (!sub || better(*candidate, *sub))) {
                sub = *candidate;
            }
        };
        if (p > 0) try_sub(p - 1, q, constant);
        if (q > 0) try_sub(p, q - 1, constant);
        if (constant) try_sub(p, q, false);
        if (sub) {
            best = *sub;
            pruned = true;
        }
    }

    if (!best) {
        if (warnings) {
            warnings->push_back(
                "fit_arima_auto: every candidate failed; falling back to (0,1,0)+drift");
        }
        return fit_arima(series, 0, 1, 0, true);
    }
    if (approximate) {
        try {
            return fit_arima(series, best->p, d, best->q, best->with_constant);
        } catch (const NumericalError&) {
            // keep the conditional fit when the exact refit is rejected
        }
    }
    return *best;
}

namespace {

/// ARMA point forecasts in the differenced space, conditional on innovations
/// implied by the fitted parameters, then integrated d times from the levels
/// observed at the forecast origin (a 1-based count of available values).
/// `z` and `e` are the precomputed differenced series and innovations.
Eigen::VectorXd arima_forecast_core(const ArimaModel& model, const Eigen::VectorXd& z,
                                    const Eigen::VectorXd& e, Eigen::Index origin,
                                    int h) {
    const int d = model.d;
    const Eigen::Index avail = std::max<Eigen::Index>(origin - d, 0);
    const int steps = static_cast<int>(origin + h - d - avail);

    Eigen::VectorXd zf(std::max(steps, 0));
    const int p = model.p;
    const int q = model.q;
    for (int s = 0; s < steps; ++s) {
        double pred = model.mu;
        for (int i = 0; i < p; ++i) {
            const Eigen::Index idx = avail + s - 1 - i;  // z index of lag i+1
            double dev;
            if (idx >= avail) {
                dev = zf(idx - avail) - model.mu;
            } else if (idx >= 0) {
                dev = z(idx) - model.mu;
            } else {
                dev = 0.0;  // pre-sample values at the mean
            }
            pred += model.ar(i) * dev;
        }
        for (int j = 0; j < q; ++j) {
            const Eigen::Index idx = avail + s - 1 - j;
            if (idx < avail && idx >= 0) {
                pred += model.ma(j) * e(idx);
            }
        }
        zf(s) = pred;
    }

    auto zhat = [&](Eigen::Index zidx) { return zf(zidx - avail); };

    Eigen::VectorXd out(h);
    if (d == 0) {
        for (int i = 1; i <= h; ++i) {
            out(i - 1) = zhat(origin + i - 1);
        }
    } else if (d == 1) {
        double level = model.series(origin - 1);
        for (int i = 1; i <= h; ++i) {
            level += zhat(origin + i - 2);
            out(i - 1) = level;
        }
    } else {  // d == 2
        double level = model.series(origin - 1);
        double slope = (origin >= 2)
                           ? model.series(origin - 1) - model.series(origin - 2)
                           : 0.0;
        for (int i = 1; i <= h; ++i) {
            const Eigen::Index zidx = origin + i - 3;
            if (zidx >= 0) slope += zhat(zidx);
            level += slope;
            out(i - 1) = level;
        }
    }
    return out;
}

}  // namespace

Eigen::VectorXd forecast_h(const ArimaModel& model, int h) {
    if (h <= 0) {
        throw ContractError("forecast_h: horizon must be positive");
    }
    if (model.series.size() == 0) {
        throw ContractError("forecast_h: model has no fitted series");
    }
    const Eigen::VectorXd z = difference(model.series, model.d);
    const Eigen::VectorXd e =
        compute_innovations(z, ArimaParams{model.ar, model.ma, model.mu});
    return arima_forecast_core(model, z, e, model.series.size(), h);
}

Eigen::VectorXd insample_h_step_errors(const ArimaModel& model, int h) {
    const Eigen::Index n = model.series.size();
    if (h <= 0 || h >= n) {
        throw ContractError("insample_h_step_errors: need 0 < h < n");
    }
    const Eigen::VectorXd z = difference(model.series, model.d);
    const Eigen::VectorXd e =
        compute_innovations(z, ArimaParams{model.ar, model.ma, model.mu});
    Eigen::VectorXd errors(n - h);
    for (Eigen::Index origin = 1; origin + h <= n; ++origin) {
        const Eigen::VectorXd f = arima_forecast_core(model, z, e, origin, h);
        errors(origin - 1) = model.series(origin + h - 1) - f(h - 1);
    }
    return errors;
}

// ---------------------------------------------------------------------------
// ETS
// ---------------------------------------------------------------------------

namespace {

struct EtsState {
    double level;
    double trend;
};

constexpr double kAlphaLo = 1e-4, kAlphaHi = 0.9999;
constexpr double kPhiLo = 0.8, kPhiHi = 0.98;

double inv_logit(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

struct EtsEval {
    double mse;
    EtsState final_state;
};

EtsEval ets_filter(const Eigen::VectorXd& y, EtsForm form, double alpha, double beta,
                   double phi, double level0, double trend0,
                   std::vector<EtsState>* states = nullptr) {
    EtsState s{level0, trend0};
    double sse = 0.0;
    if (states) states->reserve(y.size());
    for (Eigen::Index t = 0; t < y.size(); ++t) {
        double fitted;
        switch (form) {
            case EtsForm::ANN: fitted = s.level; break;
            case EtsForm::AAN: fitted = s.level + s.trend; break;
            case EtsForm::AAdN: fitted = s.level + phi * s.trend; break;
            default: fitted = s.level;
        }
        const double e = y(t) - fitted;
        sse += e * e;
        switch (form) {
            case EtsForm::ANN:
                s.level += alpha * e;
                break;
            case EtsForm::AAN:
                s.level = s.level + s.trend + alpha * e;
                s.trend = s.trend + beta * e;
                break;
            case EtsForm::AAdN:
                s.level = s.level + phi * s.trend + alpha * e;
                s.trend = phi * s.trend + beta * e;
                break;
        }
        if (states) states->push_back(s);
    }
    return EtsEval{sse / static_cast<double>(y.size()), s};
}

int ets_param_count(EtsForm form) {
    switch (form) {
        case EtsForm::ANN: return 3;   // alpha, level0, sigma2
        case EtsForm::AAN: return 5;   // + beta, trend0
        case EtsForm::AAdN: return 6;  // + phi
    }
    return 3;
}

struct EtsDecoded {
    double alpha, beta, phi, level0, trend0;
};

EtsDecoded ets_decode(const Eigen::VectorXd& theta, EtsForm form, double y_center,
                      double y_scale) {
    EtsDecoded d{0.5, 0.0, 1.0, 0.0, 0.0};
    d.alpha = kAlphaLo + (kAlphaHi - kAlphaLo) * inv_logit(theta(0));
    int idx = 1;
    if (form != EtsForm::ANN) {
        d.beta = d.alpha * inv_logit(theta(idx++));
    }
    if (form == EtsForm::AAdN) {
        d.phi = kPhiLo + (kPhiHi - kPhiLo) * inv_logit(theta(idx++));
    }
    d.level0 = y_center + y_scale * theta(idx++);
    if (form != EtsForm::ANN) {
        d.trend0 = y_scale * theta(idx++);
    }
    return d;
}

}  // namespace

EtsModel fit_ets_auto(const Eigen::VectorXd& series, std::vector<std::string>* warnings) {
    const Eigen::Index n = series.size();
    if (n < 10) {
        throw DataError("fit_ets_auto: need length >= 10");
    }
    const double y_center = series(0);
    const double sd = std::sqrt((series.array() - series.mean()).square().sum() /
                                static_cast<double>(n - 1));
    const double y_scale = std::max(sd, 1e-8);

    std::optional<EtsModel> best;
    for (EtsForm form : {EtsForm::ANN, EtsForm::AAN, EtsForm::AAdN}) {
        const int dim = (form == EtsForm::ANN) ? 2 : (form == EtsForm::AAN ? 4 : 5);
        Eigen::VectorXd theta0 = Eigen::VectorXd::Zero(dim);
        theta0(0) = logit((0.5 - kAlphaLo) / (kAlphaHi - kAlphaLo));
        int idx = 1;
        if (form != EtsForm::ANN) theta0(idx++) = logit(0.1);
        if (form == EtsForm::AAdN) theta0(idx++) = logit((0.95 - kPhiLo) / (kPhiHi - kPhiLo));
        theta0(idx++) = 0.0;  // level0 at y(0)
        if (form != EtsForm::ANN) {
            theta0(idx++) = (series(1) - series(0)) / y_scale;
        }

        auto objective = [&](const Eigen::VectorXd& theta) {
            const EtsDecoded d = ets_decode(theta, form, y_center, y_scale);
            const EtsEval ev = ets_filter(series, form, d.alpha, d.beta, d.phi,
                                          d.level0, d.trend0);
            return static_cast<double>(n) * std::log(std::max(ev.mse, 1e-30));
        };
        const NelderMeadResult opt = nelder_mead(objective, theta0, 0.5, 400 + 80 * dim);
        if (!std::isfinite(opt.value)) continue;

        const EtsDecoded d = ets_decode(opt.x, form, y_center, y_scale);
        const EtsEval ev =
            ets_filter(series, form, d.alpha, d.beta, d.phi, d.level0, d.trend0);
        EtsModel model;
        model.form = form;
        model.alpha = d.alpha;
        model.beta = (form == EtsForm::ANN) ? 0.0 : d.beta;
        model.phi_damp = (form == EtsForm::AAdN) ? d.phi : 1.0;
        model.level0 = d.level0;
        model.trend0 = (form == EtsForm::ANN) ? 0.0 : d.trend0;
        model.sigma2 = ev.mse;
        model.loglik = -0.5 * static_cast<double>(n) *
                       (std::log(2.0 * std::numbers::pi * std::max(ev.mse, 1e-30)) + 1.0);
        const int k = ets_param_count(form);
        model.aicc = -2.0 * model.loglik + 2.0 * k +
                     2.0 * k * (k + 1.0) / (static_cast<double>(n) - k - 1.0);
        model.series = series;
        if (!best || model.aicc < best->aicc) {
            best = std::move(model);
        }
    }

    if (!best) {
        if (warnings) {
            warnings->push_back("fit_ets_auto: optimizer failed; ANN(alpha=0.5) fallback");
        }
        EtsModel model;
        model.form = EtsForm::ANN;
        model.alpha = 0.5;
        model.level0 = series(0);
        const EtsEval ev = ets_filter(series, EtsForm::ANN, 0.5, 0.0, 1.0, series(0), 0.0);
        model.sigma2 = ev.mse;
        model.series = series;
        return model;
    }
    return *best;
}

namespace {

double ets_point(const EtsModel& model, const EtsState& s, int h) {
    switch (model.form) {
        case EtsForm::ANN:
            return s.level;
        case EtsForm::AAN:
            return s.level + h * s.trend;
        case EtsForm::AAdN: {
            double sum_phi = 0.0;
            double power = 1.0;
            for (int i = 1; i <= h; ++i) {
                power *= model.phi_damp;
                sum_phi += power;
            }
            return s.level + sum_phi * s.trend;
        }
    }
    return s.level;
}

}  // namespace

Eigen::VectorXd forecast_h(const EtsModel& model, int h) {
    if (h <= 0) {
        throw ContractError("forecast_h: horizon must be positive");
    }
    const EtsEval ev = ets_filter(model.series, model.form, model.alpha, model.beta,
                                  model.phi_damp, model.level0, model.trend0);
    Eigen::VectorXd out(h);
    for (int i = 1; i <= h; ++i) {
        out(i - 1) = ets_point(model, ev.final_state, i);
    }
    return out;
}

Eigen::VectorXd insample_h_step_errors(const EtsModel& model, int h) {
    const Eigen::Index n = model.series.size();
    if (h <= 0 || h >= n) {
        throw ContractError("insample_h_step_errors: need 0 < h < n");
    }
    std::vector<EtsState> states;
    ets_filter(model.series, model.form, model.alpha, model.beta, model.phi_damp,
               model.level0, model.trend0, &states);
    Eigen::VectorXd errors(n - h);
    for (Eigen::Index origin = 1; origin + h <= n; ++origin) {
        const double f = ets_point(model, states[origin - 1], h);
        errors(origin - 1) = model.series(origin + h - 1) - f;
    }
    return errors;
}

// ---------------------------------------------------------------------------
// VAR
// ---------------------------------------------------------------------------

namespace {

struct VarFit {
    std::vector<Eigen::MatrixXd> coeffs;
    Eigen::VectorXd intercept;
    Eigen::MatrixXd resid_cov;
    bool ok = false;
};

VarFit var_least_squares(const Eigen::MatrixXd& scores, int p, Eigen::Index first_row) {
    VarFit fit;
    const Eigen::Index n = scores.rows();
    const Eigen::Index k = scores.cols();
    const Eigen::Index rows = n - first_row;
    const Eigen::Index cols = 1 + k * p;
    if (rows <= cols) return fit;

    Eigen::MatrixXd x(rows, cols);
    Eigen::MatrixXd y(rows, k);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const Eigen::Index t = first_row + r;
        x(r, 0) = 1.0;
        for (int lag = 1; lag <= p; ++lag) {
            x.block(r, 1 + (lag - 1) * k, 1, k) = scores.row(t - lag);
        }
        y.row(r) = scores.row(t);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    if (qr.rank() < cols) return fit;
    const Eigen::MatrixXd beta = qr.solve(y);  // cols x k
    const Eigen::MatrixXd resid = y - x * beta;

    fit.intercept = beta.row(0).transpose();
    fit.coeffs.reserve(p);
    for (int lag = 1; lag <= p; ++lag) {
        fit.coeffs.push_back(beta.middleRows(1 + (lag - 1) * k, k).transpose());
    }
    fit.resid_cov = resid.transpose() * resid / static_cast<double>(rows);
    fit.ok = true;
    return fit;
}

double log_det_spd(const Eigen::MatrixXd& m) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

Eigen::RowVectorXd var_step(const VarModel& model,
                            const std::vector<Eigen::RowVectorXd>& history) {
    Eigen::RowVectorXd next = model.intercept.transpose();
    for (int lag = 1; lag <= model.order; ++lag) {
        next += history[history.size() - lag] * model.coeffs[lag - 1].transpose();
    }
    return next;
}

/// History rows ending at `origin` (exclusive); missing pre-sample lags are
/// padded with the column means.
std::vector<Eigen::RowVectorXd> var_history(const VarModel& model, Eigen::Index origin) {
    const Eigen::RowVectorXd mean = model.series.colwise().mean();
    std::vector<Eigen::RowVectorXd> history;
    history.reserve(model.order);
    for (int lag = model.order; lag >= 1; --lag) {
        const Eigen::Index t = origin - lag;
        history.push_back(t >= 0 ? Eigen::RowVectorXd(model.series.row(t)) : mean);
    }
    return history;
}

}  // namespace

VarModel fit_var_auto(const Eigen::MatrixXd& scores, int p_max,
                      std::vector<std::string>* warnings) {
    const Eigen::Index n = scores.rows();
    const Eigen::Index k = scores.cols();
    if (k < 1) {
        throw ContractError("fit_var_auto: need at least one score series");
    }
    if (n <= k * p_max + 10) {
        const int feasible = static_cast<int>((n - 11) / k);
        if (feasible < 1) {
            throw DataError("fit_var_auto: series too short");
        }
        if (warnings) {
            warnings->push_back("fit_var_auto: reducing p_max to " +
                                std::to_string(feasible));
        }
        p_max = feasible;
    }

    // order selection on the common sample starting at p_max
    int best_p = -1;
    double best_aicc = std::numeric_limits<double>::infinity();
    const double n_common = static_cast<double>(n - p_max);
    for (int p = 1; p <= p_max; ++p) {
        const VarFit fit = var_least_squares(scores, p, p_max);
        if (!fit.ok) {
            if (warnings) {
                warnings->push_back("fit_var_auto: singular regressors at p = " +
                                    std::to_string(p));
            }
            continue;
        }
        const double ld = log_det_spd(fit.resid_cov);
        if (!std::isfinite(ld)) continue;
        // corrected AIC, per-observation form: the penalty denominator shrinks
        // with the per-equation parameter count
        const double params = static_cast<double>(k) * k * p + k;
        const double denom = n_common - static_cast<double>(k) * p - k - 1.0;
        if (denom <= 0.0) continue;
        const double aicc = ld + params * 2.0 / denom;
        if (aicc < best_aicc) {
            best_aicc = aicc;
            best_p = p;
        }
    }
    if (best_p < 0) {
        throw NumericalError("fit_var_auto: no estimable candidate order");
    }

    const VarFit fit = var_least_squares(scores, best_p, best_p);
    if (!fit.ok) {
        throw NumericalError("fit_var_auto: refit at selected order failed");
    }
    VarModel model;
    model.order = best_p;
    model.coeffs = fit.coeffs;
    model.intercept = fit.intercept;
    model.resid_cov = fit.resid_cov;
    model.aicc = best_aicc;
    model.series = scores;
    return model;
}

Eigen::MatrixXd forecast_h(const VarModel& model, int h) {
    if (h <= 0) {
        throw ContractError("forecast_h: horizon must be positive");
    }
    std::vector<Eigen::RowVectorXd> history = var_history(model, model.series.rows());
    Eigen::MatrixXd out(h, model.series.cols());
    for (int i = 0; i < h; ++i) {
        const Eigen::RowVectorXd next = var_step(model, history);
        out.row(i) = next;
        history.push_back(next);
    }
    return out;
}

Eigen::MatrixXd insample_h_step_errors(const VarModel& model, int h) {
    const Eigen::Index n = model.series.rows();
    if (h <= 0 || h >= n) {
        throw ContractError("insample_h_step_errors: need 0 < h < n");
    }
    Eigen::MatrixXd errors(n - h, model.series.cols());
    for (Eigen::Index origin = 1; origin + h <= n; ++origin) {
        std::vector<Eigen::RowVectorXd> history = var_history(model, origin);
        Eigen::RowVectorXd next;
        for (int i = 0; i < h; ++i) {
            next = var_step(model, history);
            history.push_back(next);
        }
        errors.row(origin - 1) = model.series.row(origin + h - 1) - next;
    }
    return errors;
}

// ---------------------------------------------------------------------------
// Facade
// ---------------------------------------------------------------------------

ScoreModelKind parse_score_model(const std::string& name) {
    if (name == "arima") return ScoreModelKind::arima;
    if (name == "ets") return ScoreModelKind::ets;
    if (name == "var") return ScoreModelKind::var;
    throw ContractError("unknown score model '" + name + "' (arima|ets|var)");
}

std::string to_string(ScoreModelKind kind) {
    switch (kind) {
        case ScoreModelKind::arima: return "arima";
        case ScoreModelKind::ets: return "ets";
        case ScoreModelKind::var: return "var";
    }
    return "arima";
}

ScoreForecast forecast_scores(const Eigen::MatrixXd& scores, ScoreModelKind kind,
                              int h_max, std::vector<std::string>* warnings,
                              bool kpss_trend) {
    const Eigen::Index n = scores.rows();
    const Eigen::Index k = scores.cols();
    if (h_max < 1) {
        throw ContractError("forecast_scores: need h_max >= 1");
    }
    ScoreForecast result;
    result.point.resize(h_max, k);
    result.insample_errors.resize(k);

    const int pool_h_max = std::min<int>(h_max, static_cast<int>(n) - 1);

    if (kind == ScoreModelKind::var) {
        const VarModel model = fit_var_auto(scores, 5, warnings);
        result.point = forecast_h(model, h_max);
        for (Eigen::Index c = 0; c < k; ++c) {
            result.insample_errors[c].resize(h_max);
        }
        for (int h = 1; h <= pool_h_max; ++h) {
            const Eigen::MatrixXd errs = insample_h_step_errors(model, h);
            for (Eigen::Index c = 0; c < k; ++c) {
                result.insample_errors[c][h - 1] = errs.col(c);
            }
        }
        result.summaries.push_back("VAR(" + std::to_string(model.order) + ") on " +
                                   std::to_string(k) + " score series");
        return result;
    }

    for (Eigen::Index c = 0; c < k; ++c) {
        result.insample_errors[c].resize(h_max);
        if (kind == ScoreModelKind::arima) {
            const ArimaModel model = fit_arima_auto(scores.col(c), warnings, kpss_trend);
            result.point.col(c) = forecast_h(model, h_max);
            for (int h = 1; h <= pool_h_max; ++h) {
                result.insample_errors[c][h - 1] = insample_h_step_errors(model, h);
            }
            result.summaries.push_back(
                "ARIMA(" + std::to_string(model.p) + "," + std::to_string(model.d) +
                "," + std::to_string(model.q) + ")" + (model.drift ? "+drift" : ""));
        } else {
            const EtsModel model = fit_ets_auto(scores.col(c), warnings);
            result.point.col(c) = forecast_h(model, h_max);
            for (int h = 1; h <= pool_h_max; ++h) {
                result.insample_errors[c][h - 1] = insample_h_step_errors(model, h);
            }
            const char* form = model.form == EtsForm::ANN
                                   ? "ANN"
                                   : (model.form == EtsForm::AAN ? "AAN" : "AAdN");
            result.summaries.push_back(std::string("ETS(") + form + ")");
        }
    }
    return result;
}

}  // namespace curvecast
