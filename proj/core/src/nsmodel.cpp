#include "curvecast/nsmodel.hpp"

#include <algorithm>
#include <cmath>

#include "curvecast/stats.hpp"

namespace curvecast {

namespace {

FunctionalTimeSeries subtract_fit(const FunctionalTimeSeries& fts, const Curve& mean,
                                  const FpcaBasis& basis, ScaleTag tag) {
    Eigen::MatrixXd resid = fts.values();
    if (mean.values.size() > 0) {
        resid.rowwise() -= mean.values.transpose();
    }
    resid.noalias() -= basis.scores * basis.eigenfunctions.transpose();
    return FunctionalTimeSeries(std::move(resid), fts.grid(), fts.time_labels(), tag);
}

}  // namespace

double independence_test(const FunctionalTimeSeries& z, int lags, int components,
                         std::vector<std::string>* warnings) {
    const Eigen::Index n = z.n();
    if (n <= lags + components) {
        throw DataError("independence_test: need n > lags + components");
    }

    // static principal components of the residual curves
    CovSurface cov = autocov(z, 0);
    cov.values = psd_project(cov.values);
    const FpcaBasis basis =
        eigen_fpca(cov, z, std::min<Eigen::Index>(components, z.p()), BasisSource::static_cov);

    // drop directions with negligible variance
    const double lambda1 = basis.eigenvalues(0);
    int d = 0;
    for (Eigen::Index i = 0; i < basis.k(); ++i) {
        if (basis.eigenvalues(i) > std::max(1e-12 * lambda1, 1e-300)) ++d;
    }
    if (d < components && warnings) {
        warnings->push_back("independence_test: projection rank " + std::to_string(d) +
                            " < requested " + std::to_string(components));
    }
    if (d == 0) {
        return 1.0;  // no variation at all
    }

    Eigen::MatrixXd s = basis.scores.leftCols(d);
    s.rowwise() -= s.colwise().mean();
    const Eigen::VectorXd var0 =
        s.array().square().colwise().sum().transpose() / static_cast<double>(n);

    double q_stat = 0.0;
    for (int l = 1; l <= lags; ++l) {
        const Eigen::MatrixXd gamma =
            s.topRows(n - l).transpose() * s.bottomRows(n - l) / static_cast<double>(n);
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                const double denom = std::sqrt(var0(i) * var0(j));
                if (denom <= 0.0) continue;
                const double r = gamma(i, j) / denom;
                q_stat += r * r;
            }
        }
    }
    q_stat *= static_cast<double>(n);
    const double df = static_cast<double>(d) * d * lags;
    return 1.0 - chi_squared_cdf(q_stat, df);
}

TwoStageModel fit_two_stage(const FunctionalTimeSeries& fts, const TwoStageOptions& options) {
    const Eigen::Index n = fts.n();
    if (n < 20) {
        throw DataError("fit_two_stage: need at least 20 curves, got " +
                        std::to_string(n));
    }

    std::vector<std::string> warnings;
    const FunctionalTimeSeries diff = first_difference(fts);

    // Stage 1: components from the differenced series.
    FpcaBasis full1 = [&] {
        if (options.weighted) {
            return weighted_fpca(diff, fts, options.kappa,
                                 std::min<Eigen::Index>(options.k_max_cap, fts.p()),
                                 &warnings);
        }
        const CovSurface lrc = long_run_cov(diff, options.kernel, &warnings);
        return eigen_fpca(lrc, fts, std::min<Eigen::Index>(options.k_max_cap, fts.p()),
                          BasisSource::long_run_cov);
    }();

    Eigen::Index r_hat;
    if (options.fixed_r) {
        if (*options.fixed_r < 1) {
            throw ContractError("fit_two_stage: fixed component count must be >= 1");
        }
        r_hat = std::min(*options.fixed_r, full1.k());
    } else {
        try {
            r_hat = select_k_ratio(full1.eigenvalues, diff.n());
        } catch (const NumericalError& e) {
            throw NumericalError(std::string("fit_two_stage: stage 1: ") + e.what());
        }
        r_hat = std::min(r_hat, full1.k());
    }

    FpcaBasis stage1 = full1;
    stage1.eigenfunctions = full1.eigenfunctions.leftCols(r_hat).eval();
    stage1.scores = full1.scores.leftCols(r_hat).eval();

    const Curve mean = stage1.mean;
    FunctionalTimeSeries z = subtract_fit(fts, mean, stage1, ScaleTag::residual);

    // Stage 2 is entered only when the residuals fail the independence test.
    // Residuals at roundoff scale relative to the data are treated as exact:
    // testing them would only probe floating-point noise.
    const double data_scale =
        std::max(1.0, (fts.values().rowwise() - mean.values.transpose())
                          .cwiseAbs()
                          .maxCoeff());
    double p_value = 1.0;
    if (z.values().cwiseAbs().maxCoeff() > 1e-10 * data_scale) {
        p_value = independence_test(z, options.independence_lags,
                                    options.independence_components, &warnings);
    }
    std::optional<FpcaBasis> stage2;
    FunctionalTimeSeries y = z;
    if (p_value < options.independence_alpha) {
        const CovSurface lrc_z = long_run_cov(z, options.kernel, &warnings);
        FpcaBasis full2 = eigen_fpca(lrc_z, z, std::min<Eigen::Index>(options.k_max_cap, z.p()),
                                     BasisSource::long_run_cov);
        // scores of the residual curves themselves: no further centering
        full2.mean = Curve(Eigen::VectorXd::Zero(z.p()), z.grid());
        full2.scores = z.values() * z.grid().quadrature_weights().asDiagonal() *
                       full2.eigenfunctions;
        Eigen::Index k2;
        try {
            k2 = select_k_ratio(full2.eigenvalues, z.n());
        } catch (const NumericalError& e) {
            throw NumericalError(std::string("fit_two_stage: stage 2: ") + e.what());
        }
        k2 = std::min(k2, full2.k());
        FpcaBasis basis2 = full2;
        basis2.eigenfunctions = full2.eigenfunctions.leftCols(k2).eval();
        basis2.scores = full2.scores.leftCols(k2).eval();
        y = subtract_fit(z, basis2.mean, basis2, ScaleTag::residual);
        stage2 = std::move(basis2);
    }

    TwoStageModel model{mean,
                        std::move(stage1),
                        std::move(stage2),
                        std::move(z),
                        std::move(y),
                        options.weighted,
                        options.weighted ? options.kappa : 0.0,
                        p_value,
                        std::move(warnings)};
    return model;
}

ModelScoreForecasts forecast_model_scores(const TwoStageModel& model, ScoreModelKind kind,
                                          int h_max, std::vector<std::string>* warnings,
                                          bool kpss_trend) {
    ModelScoreForecasts out{
        forecast_scores(model.stage1.scores, kind, h_max, warnings, kpss_trend),
        std::nullopt};
    if (model.stage2) {
        out.stage2 =
            forecast_scores(model.stage2->scores, kind, h_max, warnings, kpss_trend);
    }

    // An integrated factor that still fails the KPSS test after two rounds
    // of differencing is outside what this model family can absorb.
    if (warnings) {
        for (Eigen::Index k = 0; k < model.stage1.scores.cols(); ++k) {
            const Eigen::VectorXd twice = difference(model.stage1.scores.col(k), 2);
            if (twice.size() >= 10 && kpss_statistic(twice) >= kKpssLevelCritical5) {
                warnings->push_back("stage-1 score " + std::to_string(k + 1) +
                                    " fails KPSS even after differencing twice (I(2)?)");
            }
        }
    }
    return out;
}

std::vector<Curve> point_forecast(const TwoStageModel& model,
                                  const ModelScoreForecasts& scores, int h) {
    if (h <= 0) {
        throw ContractError("point_forecast: horizon must be positive");
    }
    if (scores.stage1.point.rows() < h ||
        scores.stage1.point.cols() != model.stage1.k()) {
        throw ContractError("point_forecast: stage-1 score forecasts incomplete");
    }
    if (model.stage2) {
        if (!scores.stage2 || scores.stage2->point.rows() < h ||
            scores.stage2->point.cols() != model.stage2->k()) {
            throw ContractError("point_forecast: stage-2 score forecasts incomplete");
        }
    }

    std::vector<Curve> out;
    out.reserve(h);
    for (int i = 0; i < h; ++i) {
        Eigen::VectorXd values = model.mean.values;
        values.noalias() +=
            model.stage1.eigenfunctions * scores.stage1.point.row(i).transpose();
        if (model.stage2) {
            values.noalias() +=
                model.stage2->eigenfunctions * scores.stage2->point.row(i).transpose();
        }
        out.emplace_back(std::move(values), model.grid());
    }
    return out;
}

}  // namespace curvecast
