#include "curvecast/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>

#include "curvecast/rng.hpp"

namespace curvecast {

namespace {

void run_partitioned(int total, int threads, const std::function<void(int, int)>& body) {
    if (threads <= 1 || total <= 1) {
        body(0, total);
        return;
    }
    const int workers = std::min(threads, total);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const int chunk = (total + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const int lo = w * chunk;
        const int hi = std::min(total, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(body, lo, hi);
    }
    for (auto& t : pool) t.join();
}

}  // namespace

BootstrapEnsemble bootstrap_forecasts(const TwoStageModel& model,
                                      const ModelScoreForecasts& forecasters, int h_max,
                                      int b, double alpha, std::uint64_t seed,
                                      int threads) {
    if (h_max < 1) {
        throw ContractError("bootstrap_forecasts: need h_max >= 1");
    }
    if (b < 1) {
        throw ContractError("bootstrap_forecasts: need at least one replicate");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ContractError("bootstrap_forecasts: alpha must lie in (0, 1)");
    }
    const Eigen::Index r = model.stage1.k();
    const Eigen::Index s = model.stage2 ? model.stage2->k() : 0;
    const Eigen::Index n_resid = model.residuals_Y.n();

    // every (horizon, component) needs a nonempty error pool
    for (int h = 1; h <= h_max; ++h) {
        for (Eigen::Index k = 0; k < r; ++k) {
            if (h > static_cast<int>(forecasters.stage1.insample_errors[k].size()) ||
                forecasters.stage1.insample_errors[k][h - 1].size() == 0) {
                throw ContractError("bootstrap_forecasts: empty stage-1 error pool at h = " +
                                    std::to_string(h));
            }
        }
        for (Eigen::Index w = 0; w < s; ++w) {
            if (h > static_cast<int>(forecasters.stage2->insample_errors[w].size()) ||
                forecasters.stage2->insample_errors[w][h - 1].size() == 0) {
                throw ContractError("bootstrap_forecasts: empty stage-2 error pool at h = " +
                                    std::to_string(h));
            }
        }
    }

    BootstrapEnsemble ensemble;
    ensemble.b = b;
    ensemble.alpha = alpha;
    ensemble.seed = seed;
    ensemble.replicates.assign(h_max, Eigen::MatrixXd(b, model.grid().size()));

    // component stream ids: stage-1 components 0..r-1, stage-2 r..r+s-1,
    // residual-curve draw r+s
    run_partitioned(b, threads, [&](int lo, int hi) {
        for (int rep = lo; rep < hi; ++rep) {
            for (int h = 1; h <= h_max; ++h) {
                Eigen::VectorXd curve = model.mean.values;
                for (Eigen::Index k = 0; k < r; ++k) {
                    const Eigen::VectorXd& pool = forecasters.stage1.insample_errors[k][h - 1];
                    RngStream stream(seed, static_cast<std::uint64_t>(rep),
                                     static_cast<std::uint64_t>(h),
                                     static_cast<std::uint64_t>(k));
                    const double score = forecasters.stage1.point(h - 1, k) +
                                         pool(stream.uniform_index(pool.size()));
                    curve += score * model.stage1.eigenfunctions.col(k);
                }
                for (Eigen::Index w = 0; w < s; ++w) {
                    const Eigen::VectorXd& pool = forecasters.stage2->insample_errors[w][h - 1];
                    RngStream stream(seed, static_cast<std::uint64_t>(rep),
                                     static_cast<std::uint64_t>(h),
                                     static_cast<std::uint64_t>(r + w));
                    const double score = forecasters.stage2->point(h - 1, w) +
                                         pool(stream.uniform_index(pool.size()));
                    curve += score * model.stage2->eigenfunctions.col(w);
                }
                RngStream resid_stream(seed, static_cast<std::uint64_t>(rep),
                                       static_cast<std::uint64_t>(h),
                                       static_cast<std::uint64_t>(r + s));
                const Eigen::Index row = static_cast<Eigen::Index>(
                    resid_stream.uniform_index(static_cast<std::size_t>(n_resid)));
                curve += model.residuals_Y.values().row(row).transpose();
                ensemble.replicates[h - 1].row(rep) = curve.transpose();
            }
        }
    });
    return ensemble;
}

double quantile_type7(std::vector<double> values, double prob) {
    if (values.empty()) {
        throw ContractError("quantile_type7: empty sample");
    }
    std::sort(values.begin(), values.end());
    const double pos = prob * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

PredictionBand quantile_band(const BootstrapEnsemble& ensemble) {
    const int h_max = static_cast<int>(ensemble.replicates.size());
    if (h_max == 0) {
        throw ContractError("quantile_band: empty ensemble");
    }
    const Eigen::Index p = ensemble.replicates[0].cols();
    const Eigen::Index b = ensemble.replicates[0].rows();
    PredictionBand band;
    band.alpha = ensemble.alpha;
    band.lower.resize(h_max, p);
    band.upper.resize(h_max, p);

    std::vector<double> column(static_cast<std::size_t>(b));
    for (int h = 0; h < h_max; ++h) {
        for (Eigen::Index j = 0; j < p; ++j) {
            for (Eigen::Index i = 0; i < b; ++i) {
                column[static_cast<std::size_t>(i)] = ensemble.replicates[h](i, j);
            }
            std::sort(column.begin(), column.end());
            const auto pick = [&](double prob) {
                const double pos = prob * static_cast<double>(b - 1);
                const auto lo = static_cast<std::size_t>(std::floor(pos));
                const auto hi = std::min(lo + 1, column.size() - 1);
                const double frac = pos - static_cast<double>(lo);
                return column[lo] + frac * (column[hi] - column[lo]);
            };
            band.lower(h, j) = pick(0.5 * ensemble.alpha);
            band.upper(h, j) = pick(1.0 - 0.5 * ensemble.alpha);
        }
    }
    return band;
}

}  // namespace curvecast
