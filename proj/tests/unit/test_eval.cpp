#include <doctest.h>

#include <cmath>

#include "curvecast/eval.hpp"
#include "curvecast/synthetic.hpp"
#include "helpers/oracles.hpp"
#include "helpers/test_fixtures.hpp"

using namespace curvecast;
using testutil::make_fts;

TEST_CASE("rmspe and mape worked examples") {
    CHECK(rmspe({-3.0}) == doctest::Approx(3.0));
    CHECK(mape({-3.0}) == doctest::Approx(3.0));
    CHECK(rmspe({3.0, -4.0}) == doctest::Approx(std::sqrt(12.5)));
    CHECK(mape({3.0, -4.0}) == doctest::Approx(3.5));
    CHECK(rmspe({0.0, 0.0, 0.0}) == 0.0);
    CHECK(mape({0.0, 0.0, 0.0}) == 0.0);
    CHECK_THROWS_AS(rmspe({}), ContractError);
    CHECK_THROWS_AS(mape({}), ContractError);
}

TEST_CASE("rmspe dominates mape on every fixture") {
    for (std::uint64_t s = 0; s < 25; ++s) {
        const Eigen::VectorXd v = testutil::random_vector(37, 100 + s);
        std::vector<double> errors(v.data(), v.data() + v.size());
        CHECK(rmspe(errors) >= mape(errors) - 1e-12);
        CHECK(rmspe(errors) == doctest::Approx(oracle::rmspe(errors)).epsilon(1e-12));
        CHECK(mape(errors) == doctest::Approx(oracle::mape(errors)).epsilon(1e-12));
    }
}

TEST_CASE("coverage and cpd worked examples") {
    const std::vector<double> lo(10, 0.0), hi(10, 1.0);
    std::vector<double> inside(10, 0.5);
    auto [cov_all, cpd_all] = coverage_cpd(lo, hi, inside, 0.2);
    CHECK(cov_all == 1.0);
    CHECK(cpd_all == doctest::Approx(0.2));

    std::vector<double> above(10, 2.0);
    auto [cov_none, cpd_none] = coverage_cpd(lo, hi, above, 0.2);
    CHECK(cov_none == 0.0);
    CHECK(cpd_none == doctest::Approx(0.8));

    std::vector<double> two_out(10, 0.5);
    two_out[3] = 2.0;
    two_out[7] = -1.0;
    auto [cov, cpd] = coverage_cpd(lo, hi, two_out, 0.2);
    CHECK(cov == doctest::Approx(0.8));
    CHECK(cpd == doctest::Approx(0.0));

    // boundary values count as covered
    std::vector<double> boundary(10, Eigen::VectorXd::Zero(1)(0));
    auto [cov_b, cpd_b] = coverage_cpd(lo, hi, boundary, 0.2);
    CHECK(cov_b == 1.0);
    CHECK(cpd_b == doctest::Approx(0.2));

    // coverage + exceedance fraction = 1
    CHECK(cov + 2.0 / 10.0 == doctest::Approx(1.0));
}

TEST_CASE("interval score worked examples") {
    CHECK(interval_score(1.0, 3.0, 2.0, 0.2) == doctest::Approx(2.0));
    CHECK(interval_score(1.0, 3.0, 0.0, 0.2) == doctest::Approx(12.0));
    CHECK(interval_score(1.0, 3.0, 4.0, 0.2) == doctest::Approx(12.0));
    CHECK_THROWS_AS(interval_score(3.0, 1.0, 2.0, 0.2), ContractError);
    for (std::uint64_t s = 0; s < 10; ++s) {
        RngStream rng(700 + s);
        const double lo = rng.next_normal();
        const double hi = lo + std::abs(rng.next_normal());
        const double actual = rng.next_normal();
        CHECK(interval_score(lo, hi, actual, 0.2) ==
              doctest::Approx(oracle::interval_score(lo, hi, actual, 0.2)).epsilon(1e-12));
        if (actual >= lo && actual <= hi) {
            CHECK(interval_score(lo, hi, actual, 0.2) == doctest::Approx(hi - lo));
        }
    }
}

TEST_CASE("expanding window on a small synthetic sample") {
    const FunctionalTimeSeries fts = synthetic_log_mortality(40, 12, 77);
    const SampleSplit split = make_split(40, 3, 3);
    PipelineConfig config;
    config.bootstrap = true;
    config.bootstrap_b = 100;
    config.seed = 5;
    config.score_model = ScoreModelKind::ets;  // keep runtime small
    const EvaluationReport report = expanding_window(fts, split, config);

    REQUIRE(report.rows.size() == 3);
    CHECK(report.rows[0].forecast_count == 3);
    CHECK(report.rows[1].forecast_count == 2);
    CHECK(report.rows[2].forecast_count == 1);
    CHECK(report.method == "standard");
    for (const HorizonMetrics& row : report.rows) {
        CHECK(row.rmspe >= 0.0);
        CHECK(row.rmspe >= row.mape - 1e-12);
        CHECK(row.coverage >= 0.0);
        CHECK(row.coverage <= 1.0);
        CHECK(row.interval_score >= 0.0);
    }

    // deterministic rerun, including across thread counts
    const EvaluationReport again = expanding_window(fts, split, config);
    PipelineConfig threaded = config;
    threaded.threads = 4;
    const EvaluationReport parallel = expanding_window(fts, split, threaded);
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        CHECK(report.rows[i].rmspe == again.rows[i].rmspe);
        CHECK(report.rows[i].interval_score == again.rows[i].interval_score);
        CHECK(report.rows[i].rmspe == parallel.rows[i].rmspe);
        CHECK(report.rows[i].interval_score == parallel.rows[i].interval_score);
    }
}

TEST_CASE("degenerate origins are recorded, near-perfect forecasts score near zero") {
    // exactly constant curves: stage 1 has no spectrum, every origin fails
    // and is reported rather than crashing the run
    Eigen::MatrixXd x = Eigen::MatrixXd::Constant(30, 6, -1.25);
    const auto fts = make_fts(x, 0.0, 1.0, ScaleTag::log10_rate);
    const SampleSplit split = make_split(30, 2, 2);
    PipelineConfig config;
    config.bootstrap = false;
    config.score_model = ScoreModelKind::ets;
    const EvaluationReport failed = expanding_window(fts, split, config);
    CHECK(failed.failed_origins == 2);
    for (const HorizonMetrics& row : failed.rows) {
        CHECK(row.forecast_count == 0);
    }

    // near-constant data forecasts almost perfectly
    Eigen::MatrixXd y = x;
    y += 1e-6 * testutil::random_matrix(30, 6, 8);
    const auto fts2 = make_fts(y, 0.0, 1.0, ScaleTag::log10_rate);
    const EvaluationReport report = expanding_window(fts2, split, config);
    for (const HorizonMetrics& row : report.rows) {
        if (row.forecast_count > 0) {
            CHECK(row.rmspe <= 1e-4);
        }
    }
}

TEST_CASE("kappa on a flat objective returns the midpoint") {
    // standard (unweighted) downstream ignores kappa only if the objective is
    // constant; force that by masking the weighted flag inside the objective:
    // easiest honest flat case is a deterministic series where every kappa
    // yields identical forecasts
    Eigen::MatrixXd x(40, 5);
    for (int t = 0; t < 40; ++t) {
        for (int j = 0; j < 5; ++j) x(t, j) = 0.1 * t + 0.01 * j;
    }
    const auto fts = make_fts(x, 0.0, 1.0, ScaleTag::log10_rate);
    const SampleSplit split = make_split(40, 5, 5);
    PipelineConfig config;
    config.bootstrap = false;
    config.score_model = ScoreModelKind::ets;
    const KappaResult result = optimize_kappa(fts, split, config, KappaCriterion::rmspe);
    CHECK(result.kappa == doctest::Approx(0.5));
}

TEST_CASE("kappa: recent regime pushes the weight parameter up") {
    const Eigen::Index p = 10;
    const AgeGrid grid = AgeGrid::uniform(0.0, 1.0, p);
    const Eigen::VectorXd phi_a = testutil::normalized_sine(grid, 1);
    const Eigen::VectorXd phi_b = testutil::normalized_sine(grid, 3);
    int hits = 0;
    const int reps = 5;
    for (int rep = 0; rep < reps; ++rep) {
        RngStream rng(880 + rep);
        const int n = 70;
        Eigen::MatrixXd x(n, p);
        Eigen::VectorXd level_a = Eigen::VectorXd::Zero(p);
        for (int t = 0; t < n; ++t) {
            const Eigen::VectorXd& dir = (t < n / 2) ? phi_b : phi_a;
            level_a += rng.next_normal() * dir;
            x.row(t) = level_a.transpose();
        }
        const auto fts = make_fts(x, 0.0, 1.0, ScaleTag::log10_rate);
        const SampleSplit split = make_split(n, 8, 8);
        PipelineConfig config;
        config.bootstrap = false;
        config.score_model = ScoreModelKind::ets;
        const KappaResult result =
            optimize_kappa(fts, split, config, KappaCriterion::rmspe);
        if (result.kappa > 0.05) ++hits;
    }
    CHECK(hits >= 4);  // >= 80%
}

TEST_CASE("kappa search is deterministic") {
    const FunctionalTimeSeries fts = synthetic_log_mortality(45, 8, 11);
    const SampleSplit split = make_split(45, 6, 6);
    PipelineConfig config;
    config.bootstrap = false;
    config.score_model = ScoreModelKind::ets;
    const KappaResult a = optimize_kappa(fts, split, config, KappaCriterion::rmspe);
    const KappaResult b = optimize_kappa(fts, split, config, KappaCriterion::rmspe);
    CHECK(a.kappa == b.kappa);
    CHECK(a.evaluations <= 40 + 2);
}

TEST_CASE("report serialization carries provenance and rows") {
    EvaluationReport report;
    report.method = "standard";
    report.score_model = "ets";
    report.alpha = 0.2;
    HorizonMetrics row;
    row.horizon = 1;
    row.forecast_count = 3;
    row.rmspe = 0.5;
    row.mape = 0.25;
    report.rows.push_back(row);

    const std::vector<std::pair<std::string, std::string>> header = {
        {"config_hash", "deadbeef"}, {"seed", "7"}};
    const std::string csv = report_to_csv(report, header);
    CHECK(csv.find("# config_hash: deadbeef") != std::string::npos);
    CHECK(csv.find("method,horizon,metric,value") != std::string::npos);
    CHECK(csv.find("standard,1,rmspe,0.5") != std::string::npos);
    CHECK(csv.find("coverage") == std::string::npos);  // NaN rows omitted

    const std::string json = report_to_json(report, header);
    CHECK(json.find("\"seed\": \"7\"") != std::string::npos);
    CHECK(json.find("\"rmspe\": 0.5") != std::string::npos);

    const std::string plot = plot_data_csv({report}, "female", header);
    CHECK(plot.find("method,sex,horizon,metric,value") != std::string::npos);
    CHECK(plot.find("standard,female,1,mape,0.25") != std::string::npos);
}
