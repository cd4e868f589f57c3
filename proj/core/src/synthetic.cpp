#include "curvecast/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <vector>

#include "curvecast/rng.hpp"

namespace curvecast {

namespace {

/// Plausible baseline log10 mortality over age: infant spike, young-adult
/// hump, exponential old-age increase.
double base_log_rate(double age, double level_shift) {
    const double infant = 0.055 * std::exp(-age / 2.2);
    const double hump = 4.5e-4 * std::exp(-std::pow((age - 21.0) / 9.0, 2));
    const double senescent = 2.6e-5 * std::exp(0.094 * age);
    return std::log10(infant + hump + senescent) + level_shift;
}

/// Improvement loading: mortality decline is strongest at young ages.
double improvement_loading(double age) {
    return 0.5 + 0.5 * std::exp(-age / 45.0);
}

struct SexParams {
    std::uint64_t stream;
    double level_shift;
    double drift;
    double noise_sd;
};

}  // namespace

FunctionalTimeSeries synthetic_log_mortality(int n_years, Eigen::Index p,
                                             std::uint64_t seed, int first_year) {
    if (n_years < 2 || p < 2) {
        throw ContractError("synthetic_log_mortality: need n_years >= 2, p >= 2");
    }
    Eigen::MatrixXd values(n_years, p);

    RngStream walk(seed, 0x77);
    RngStream ar(seed, 0x78);
    double trend = 0.0;
    double cyc = 0.0;
    for (int t = 0; t < n_years; ++t) {
        trend += -0.008 + 0.015 * walk.next_normal();
        cyc = 0.6 * cyc + 0.05 * ar.next_normal();
        RngStream noise(seed, 0x79, static_cast<std::uint64_t>(t));
        for (Eigen::Index j = 0; j < p; ++j) {
            const double age =
                95.0 * static_cast<double>(j) / static_cast<double>(p - 1);
            const double second =
                std::sin(std::numbers::pi * static_cast<double>(j) /
                         static_cast<double>(p - 1)) *
                0.3;
            values(t, j) = base_log_rate(age, 0.0) + trend * improvement_loading(age) +
                           cyc * second + 0.02 * noise.next_normal();
        }
    }

    std::vector<int> labels(n_years);
    for (int t = 0; t < n_years; ++t) labels[t] = first_year + t;
    return FunctionalTimeSeries(std::move(values), AgeGrid::uniform(0.0, 95.0, p),
                                std::move(labels), ScaleTag::log10_rate);
}

void write_synthetic_mx(const std::string& path, int n_years, std::uint64_t seed,
                        int first_year) {
    if (n_years < 2) {
        throw ContractError("write_synthetic_mx: need at least 2 years");
    }
    const int ages = 111;  // 0..110+
    const SexParams sexes[3] = {
        {0x01, -0.08, -0.0085, 0.018},  // female
        {0x02, 0.02, -0.0075, 0.024},   // male
        {0x03, -0.03, -0.0080, 0.015},  // total
    };

    // per-sex factor paths
    std::vector<std::vector<double>> trend(3, std::vector<double>(n_years));
    std::vector<std::vector<double>> cyc(3, std::vector<double>(n_years));
    for (int s = 0; s < 3; ++s) {
        RngStream walk(seed, sexes[s].stream, 0xA0);
        RngStream ar(seed, sexes[s].stream, 0xA1);
        double level = 0.0, c = 0.0;
        for (int t = 0; t < n_years; ++t) {
            level += sexes[s].drift + 0.012 * walk.next_normal();
            c = 0.6 * c + 0.04 * ar.next_normal();
            trend[s][t] = level;
            cyc[s][t] = c;
        }
    }

    std::ofstream file(path);
    if (!file) {
        throw DataError("write_synthetic_mx: cannot open '" + path + "'");
    }
    file << "Synthetic, Death rates (period 1x1), generated data\n\n";
    file << "  Year          Age             Female            Male           Total\n";

    char buffer[64];
    for (int t = 0; t < n_years; ++t) {
        for (int a = 0; a < ages; ++a) {
            const double age = static_cast<double>(a);
            file << "  " << (first_year + t) << "           ";
            if (a == 110) {
                file << "110+";
            } else {
                file << a;
            }
            for (int s = 0; s < 3; ++s) {
                RngStream noise(seed, sexes[s].stream, 0xB0 + static_cast<std::uint64_t>(t),
                                static_cast<std::uint64_t>(a));
                const double second =
                    std::sin(std::numbers::pi * age / 110.0) * 0.25;
                double log_rate = base_log_rate(age, sexes[s].level_shift) +
                                  trend[s][t] * improvement_loading(age) +
                                  cyc[s][t] * second +
                                  sexes[s].noise_sd * noise.next_normal();
                double rate = std::pow(10.0, log_rate);
                rate = std::clamp(rate, 1e-7, 0.999999);
                std::snprintf(buffer, sizeof(buffer), "%17.6f", rate);
                file << buffer;
            }
            file << "\n";
        }
    }
}

}  // namespace curvecast
