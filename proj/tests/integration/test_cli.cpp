// End-to-end checks of the command-line pipeline. The binary path arrives in
// the CURVECAST_BIN environment variable (set by CTest).

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string binary() {
    const char* bin = std::getenv("CURVECAST_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "CURVECAST_BIN must point at the CLI binary");
    return bin;
}

int run(const std::string& args) {
    const std::string cmd = binary() + " " + args + " > cli_stdout.log 2> cli_stderr.log";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), ("missing file: " + path.string()).c_str());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct WorkDir {
    fs::path path;
    explicit WorkDir(const std::string& name) : path(fs::path("cli_work") / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
};

/// Shared synthetic input: generated once per process, reused by every case.
const fs::path& synthetic_input() {
    static fs::path data = [] {
        fs::create_directories("cli_work");
        const fs::path p = fs::path("cli_work") / "synthetic_mx.txt";
        REQUIRE(run("synth --years 90 --seed 424242 --out " + p.string()) == 0);
        return p;
    }();
    return data;
}

}  // namespace

TEST_CASE("synth produces a parseable file and ingest consumes it") {
    const WorkDir work("ingest");
    const int code = run("ingest --rates " + synthetic_input().string() +
                         " --sex female --out " + work.path.string());
    CHECK(code == 0);
    const std::string csv = slurp(work.path / "fts_female.csv");
    CHECK(csv.find("# curvecast: ") != std::string::npos);
    CHECK(csv.find("year,a0,") != std::string::npos);
}

TEST_CASE("missing input path exits with the usage code and names the path") {
    const WorkDir work("missing");
    const int code = run("fit --rates does_not_exist.txt --out " + work.path.string());
    CHECK(code == 2);
    const std::string err = slurp("cli_stderr.log");
    CHECK(err.find("does_not_exist.txt") != std::string::npos);
}

TEST_CASE("fit writes a model document and a readable summary") {
    const WorkDir work("fit");
    const int code = run("fit --rates " + synthetic_input().string() +
                         " --sex female --score-model ets --seed 7 --out " +
                         work.path.string());
    CHECK(code == 0);
    const std::string model = slurp(work.path / "model_female_standard.json");
    CHECK(model.find("\"schema_version\"") != std::string::npos);
    const std::string summary = slurp(work.path / "summary_female.txt");
    CHECK(summary.find("r_hat: 1") != std::string::npos);

    // byte-identical rerun
    const WorkDir work2("fit2");
    REQUIRE(run("fit --rates " + synthetic_input().string() +
                " --sex female --score-model ets --seed 7 --out " +
                work2.path.string()) == 0);
    CHECK(slurp(work2.path / "model_female_standard.json") == model);
}

TEST_CASE("forecast from a fitted model, with and without bands") {
    const WorkDir work("forecast");
    REQUIRE(run("fit --rates " + synthetic_input().string() +
                " --sex male --score-model ets --seed 3 --out " + work.path.string()) == 0);
    const std::string model = (work.path / "model_male_standard.json").string();

    CHECK(run("forecast --model " + model + " --sex male --horizon 0 --out " +
              work.path.string()) == 2);

    REQUIRE(run("forecast --model " + model +
                " --sex male --horizon 5 --bootstrap --bootstrap-b 100 --alpha 0.2"
                " --seed 11 --out " + work.path.string()) == 0);
    const std::string point = slurp(work.path / "forecast_male.csv");
    const std::string lower = slurp(work.path / "forecast_male_lower.csv");
    const std::string upper = slurp(work.path / "forecast_male_upper.csv");
    CHECK(point.find("year,a0") != std::string::npos);

    // lower <= upper pointwise
    auto parse_rows = [](const std::string& csv) {
        std::vector<std::vector<double>> rows;
        std::istringstream ss(csv);
        std::string line;
        while (std::getline(ss, line)) {
            if (line.empty() || line[0] == '#' || line.rfind("year", 0) == 0) continue;
            std::vector<double> row;
            std::istringstream ls(line);
            std::string cell;
            bool first = true;
            while (std::getline(ls, cell, ',')) {
                if (!first) row.push_back(std::stod(cell));
                first = false;
            }
            rows.push_back(row);
        }
        return rows;
    };
    const auto lo = parse_rows(lower);
    const auto hi = parse_rows(upper);
    REQUIRE(lo.size() == hi.size());
    for (std::size_t r = 0; r < lo.size(); ++r) {
        for (std::size_t c = 0; c < lo[r].size(); ++c) {
            CHECK(lo[r][c] <= hi[r][c] + 1e-12);
        }
    }

    // missing seed for a bootstrap forecast is a usage error
    CHECK(run("forecast --model " + model +
              " --sex male --horizon 2 --bootstrap --out " + work.path.string()) == 2);

    // corrupted model file fails schema validation with the data exit code
    std::ofstream bad(work.path / "bad_model.json");
    bad << "{\"schema_version\": 1}";
    bad.close();
    CHECK(run("forecast --model " + (work.path / "bad_model.json").string() +
              " --horizon 2 --out " + work.path.string()) == 3);
}

TEST_CASE("evaluate on a small config: counts, schema, determinism") {
    const WorkDir work("evaluate");
    std::ofstream cfg(work.path / "run.cfg");
    cfg << "rates = " << synthetic_input().string() << "\n"
        << "sex = female\n"
        << "method = both\n"
        << "score_model = ets\n"
        << "val_len = 4\n"
        << "test_len = 3\n"
        << "bootstrap_b = 80\n"
        << "seed = 99\n"
        << "out = " << work.path.string() << "\n";
    cfg.close();

    REQUIRE(run("evaluate --config " + (work.path / "run.cfg").string()) == 0);
    const std::string std_csv = slurp(work.path / "report_female_standard.csv");
    CHECK(std_csv.find("standard,1,rmspe,") != std::string::npos);
    CHECK(std_csv.find("standard,3,interval_score,") != std::string::npos);
    const std::string cmp = slurp(work.path / "comparison_female.csv");
    CHECK(cmp.find("horizon,metric,standard,weighted") != std::string::npos);

    const std::string json = slurp(work.path / "report_female_standard.json");
    CHECK(json.find("\"count\": 3") != std::string::npos);  // h=1 -> 3 forecasts
    CHECK(json.find("\"count\": 1") != std::string::npos);  // h=3 -> 1 forecast

    // rerun into a fresh directory: byte-identical reports
    const WorkDir work2("evaluate2");
    std::ofstream cfg2(work2.path / "run.cfg");
    cfg2 << "rates = " << synthetic_input().string() << "\n"
         << "sex = female\n"
         << "method = both\n"
         << "score_model = ets\n"
         << "val_len = 4\n"
         << "test_len = 3\n"
         << "bootstrap_b = 80\n"
         << "seed = 99\n"
         << "out = " << work2.path.string() << "\n";
    cfg2.close();
    REQUIRE(run("evaluate --config " + (work2.path / "run.cfg").string()) == 0);
    CHECK(slurp(work2.path / "report_female_standard.csv") == std_csv);
    CHECK(slurp(work2.path / "report_female_weighted.csv") ==
          slurp(work.path / "report_female_weighted.csv"));

    // compare-plots merges the two report JSONs
    REQUIRE(run("compare-plots --reports " +
                (work.path / "report_female_standard.json").string() + " " +
                (work.path / "report_female_weighted.json").string() +
                " --sex female --out " + work.path.string()) == 0);
    const std::string plot = slurp(work.path / "plot_data_combined.csv");
    CHECK(plot.find("method,sex,horizon,metric,value") != std::string::npos);
    CHECK(plot.find("standard,female,1,rmspe,") != std::string::npos);
    CHECK(plot.find("weighted,female,1,rmspe,") != std::string::npos);
}

TEST_CASE("flags override config file values") {
    const WorkDir work("override");
    std::ofstream cfg(work.path / "run.cfg");
    cfg << "rates = does_not_exist_in_config.txt\n"
        << "sex = female\n";
    cfg.close();
    // --rates overrides the bad config path
    const int code = run("ingest --config " + (work.path / "run.cfg").string() +
                         " --rates " + synthetic_input().string() + " --out " +
                         work.path.string());
    CHECK(code == 0);

    // unknown config keys are usage errors
    std::ofstream bad(work.path / "bad.cfg");
    bad << "no_such_key = 1\n";
    bad.close();
    CHECK(run("ingest --config " + (work.path / "bad.cfg").string()) == 2);
}

TEST_CASE("numerically degenerate input exits with the numerical code") {
    const WorkDir work("degenerate");
    // constant rates: the differenced series has no spectrum to decompose
    std::ofstream mx(work.path / "flat.txt");
    mx << "Fixture, Death rates (period 1x1)\n\n"
       << "  Year          Age             Female            Male           Total\n";
    for (int year = 1900; year < 1960; ++year) {
        for (int age = 0; age <= 110; ++age) {
            mx << "  " << year << "  " << age << (age == 110 ? "+" : "")
               << "  0.010000  0.010000  0.010000\n";
        }
    }
    mx.close();
    const int code = run("fit --rates " + (work.path / "flat.txt").string() +
                         " --sex female --out " + work.path.string());
    CHECK(code == 4);
}

TEST_CASE("no-noise random-walk fixture: one-step forecast is the last curve") {
    const WorkDir work("naive");
    // exact single-factor random walk in log10 rates, written at full precision
    const int n = 80, ages = 111;
    std::vector<double> walk(n);
    double level = 0.0;
    unsigned long long state = 12345;
    auto next_uniform = [&]() {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return double(state >> 11) * 0x1.0p-53;
    };
    for (int t = 0; t < n; ++t) {
        level += 0.05 * (next_uniform() - 0.5);
        walk[t] = level;
    }
    std::ofstream mx(work.path / "walk.txt");
    mx << "Fixture, Death rates (period 1x1)\n\n"
       << "  Year          Age             Female            Male           Total\n";
    mx.precision(17);
    for (int t = 0; t < n; ++t) {
        for (int a = 0; a < ages; ++a) {
            const double phi = std::sin(3.14159265358979323846 * (a + 1.0) / (ages + 1.0));
            const double log_rate = -2.0 + 0.3 * walk[t] * phi;
            const double rate = std::pow(10.0, log_rate);
            mx << "  " << (1900 + t) << "  " << a << (a == 110 ? "+" : "") << "  "
               << rate << "  " << rate << "  " << rate << "\n";
        }
    }
    mx.close();

    REQUIRE(run("fit --rates " + (work.path / "walk.txt").string() +
                " --sex female --seed 1 --out " + work.path.string()) == 0);
    REQUIRE(run("forecast --model " + (work.path / "model_female_standard.json").string() +
                " --sex female --horizon 1 --out " + work.path.string()) == 0);

    // the forecast row must reproduce the last observed log-rate curve
    const std::string csv = slurp(work.path / "forecast_female.csv");
    std::istringstream ss(csv);
    std::string line, last;
    while (std::getline(ss, line)) {
        if (!line.empty() && line[0] != '#' && line.rfind("year", 0) != 0) last = line;
    }
    std::istringstream row(last);
    std::string cell;
    std::getline(row, cell, ',');  // year
    int idx = 0;
    while (std::getline(row, cell, ',')) {
        // pooled 95+ column mixes ages; compare the pure columns below it
        if (idx < 95) {
            const double phi =
                std::sin(3.14159265358979323846 * (idx + 1.0) / (ages + 1.0));
            const double expected = -2.0 + 0.3 * walk[n - 1] * phi;
            CHECK(std::stod(cell) == doctest::Approx(expected).epsilon(1e-8));
        }
        ++idx;
    }
    CHECK(idx == 96);
}

TEST_CASE("weighted fit with a fixed kappa records it in the model") {
    const WorkDir work("weighted");
    REQUIRE(run("fit --rates " + synthetic_input().string() +
                " --sex total --method weighted --kappa 0.3 --score-model ets"
                " --seed 5 --out " + work.path.string()) == 0);
    const std::string summary = slurp(work.path / "summary_total.txt");
    CHECK(summary.find("method: weighted") != std::string::npos);
    CHECK(summary.find("kappa: 0.3") != std::string::npos);
    const std::string model = slurp(work.path / "model_total_weighted.json");
    CHECK(model.find("\"weighted\": true") != std::string::npos);
}
