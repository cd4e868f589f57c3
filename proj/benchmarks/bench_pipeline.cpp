#include <benchmark/benchmark.h>

#include "curvecast/dfpca.hpp"
#include "curvecast/lrcov.hpp"
#include "curvecast/nsmodel.hpp"
#include "curvecast/rng.hpp"
#include "curvecast/scorecast.hpp"
#include "curvecast/smooth.hpp"
#include "curvecast/synthetic.hpp"
#include "curvecast/uncertainty.hpp"

using namespace curvecast;

namespace {

FunctionalTimeSeries bench_series(int n, int p) {
    return synthetic_log_mortality(n, p, 12345);
}

}  // namespace

static void BM_LongRunCov(benchmark::State& state) {
    const auto fts = bench_series(static_cast<int>(state.range(0)), 96);
    KernelSpec kernel;
    for (auto _ : state) {
        benchmark::DoNotOptimize(long_run_cov(fts, kernel));
    }
}
BENCHMARK(BM_LongRunCov)->Arg(100)->Arg(272);

static void BM_EigenFpca(benchmark::State& state) {
    const auto fts = bench_series(272, static_cast<int>(state.range(0)));
    KernelSpec kernel;
    const CovSurface lrc = long_run_cov(fts, kernel);
    for (auto _ : state) {
        benchmark::DoNotOptimize(eigen_fpca(lrc, fts, 10));
    }
}
BENCHMARK(BM_EigenFpca)->Arg(48)->Arg(96);

static void BM_SmoothCurveGcv(benchmark::State& state) {
    const auto fts = bench_series(50, 96);
    const Curve curve = fts.curve(0);
    const Eigen::VectorXd weights = Eigen::VectorXd::Ones(96);
    for (auto _ : state) {
        benchmark::DoNotOptimize(select_lambda_gcv(curve, weights));
    }
}
BENCHMARK(BM_SmoothCurveGcv);

static void BM_FitTwoStage(benchmark::State& state) {
    const auto fts = bench_series(static_cast<int>(state.range(0)), 96);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_two_stage(fts, TwoStageOptions{}));
    }
}
BENCHMARK(BM_FitTwoStage)->Arg(120)->Arg(272)->Unit(benchmark::kMillisecond);

static void BM_FitArimaAuto(benchmark::State& state) {
    RngStream rng(9);
    Eigen::VectorXd y(state.range(0));
    double level = 0.0;
    for (Eigen::Index t = 0; t < y.size(); ++t) {
        level += -0.01 + 0.1 * rng.next_normal();
        y(t) = level;
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_arima_auto(y));
    }
}
BENCHMARK(BM_FitArimaAuto)->Arg(120)->Arg(272)->Unit(benchmark::kMillisecond);

static void BM_Bootstrap(benchmark::State& state) {
    const auto fts = bench_series(120, 96);
    const TwoStageModel model = fit_two_stage(fts, TwoStageOptions{});
    const ModelScoreForecasts scores =
        forecast_model_scores(model, ScoreModelKind::ets, 30);
    for (auto _ : state) {
        benchmark::DoNotOptimize(bootstrap_forecasts(
            model, scores, 30, static_cast<int>(state.range(0)), 0.2, 7));
    }
}
BENCHMARK(BM_Bootstrap)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
