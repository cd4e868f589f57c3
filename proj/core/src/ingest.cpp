#include "curvecast/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace curvecast {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

bool is_missing(double v) { return std::isnan(v); }

struct ParsedRow {
    int year;
    int age;
    bool open_age;
    double female, male, total;
};

std::optional<double> parse_rate(const std::string& token) {
    if (token == ".") return kMissing;
    double value = 0.0;
    const auto result = std::from_chars(token.data(), token.data() + token.size(), value);
    if (result.ec != std::errc() || result.ptr != token.data() + token.size()) {
        return std::nullopt;
    }
    return value;
}

std::optional<std::pair<int, bool>> parse_age(const std::string& token) {
    std::string digits = token;
    bool open = false;
    if (!digits.empty() && (digits.back() == '+' || digits.back() == '-')) {
        open = digits.back() == '+';
        digits.pop_back();
    }
    int age = 0;
    const auto result = std::from_chars(digits.data(), digits.data() + digits.size(), age);
    if (result.ec != std::errc() || result.ptr != digits.data() + digits.size()) {
        return std::nullopt;
    }
    return std::make_pair(age, open);
}

/// Shared reader for Mx_1x1-layout files (rates and exposures).
MortalityTable parse_hmd_layout(const std::string& path, Sex sex) {
    std::ifstream file(path);
    if (!file) {
        throw DataError("cannot open '" + path + "'");
    }

    std::vector<ParsedRow> rows;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(file, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::vector<std::string> tokens;
        std::string tok;
        while (ss >> tok) tokens.push_back(tok);
        if (tokens.empty()) continue;
        if (!header_seen) {
            if (tokens[0] == "Year") {
                header_seen = true;
            }
            continue;  // title block before the column header
        }
        if (tokens.size() != 5) {
            throw DataError(path + ":" + std::to_string(line_no) +
                            ": expected 5 columns, got " + std::to_string(tokens.size()));
        }
        int year = 0;
        const auto yr = std::from_chars(tokens[0].data(),
                                        tokens[0].data() + tokens[0].size(), year);
        if (yr.ec != std::errc()) {
            throw DataError(path + ":" + std::to_string(line_no) + ": bad year '" +
                            tokens[0] + "'");
        }
        const auto age = parse_age(tokens[1]);
        if (!age) {
            throw DataError(path + ":" + std::to_string(line_no) + ": bad age '" +
                            tokens[1] + "'");
        }
        ParsedRow row{year, age->first, age->second, 0, 0, 0};
        const char* names[3] = {"Female", "Male", "Total"};
        double* slots[3] = {&row.female, &row.male, &row.total};
        for (int c = 0; c < 3; ++c) {
            const auto value = parse_rate(tokens[2 + c]);
            if (!value) {
                throw DataError(path + ":" + std::to_string(line_no) + ": bad " +
                                names[c] + " value '" + tokens[2 + c] + "'");
            }
            if (!is_missing(*value) && *value < 0.0) {
                throw DataError(path + ":" + std::to_string(line_no) +
                                ": negative rate");
            }
            *slots[c] = *value;
        }
        rows.push_back(row);
    }
    if (!header_seen) {
        throw DataError(path + ": no 'Year Age Female Male Total' header found");
    }
    if (rows.empty()) {
        throw DataError(path + ": no data rows");
    }

    // collect the age set of the first year; every year must repeat it
    MortalityTable table;
    table.sex = sex;
    const int first_year = rows.front().year;
    for (const ParsedRow& row : rows) {
        if (row.year != first_year) break;
        table.ages.push_back(row.age);
        if (row.open_age) table.open_ended = true;
    }
    const std::size_t n_ages = table.ages.size();
    if (n_ages == 0 || rows.size() % n_ages != 0) {
        throw DataError(path + ": ragged year blocks");
    }
    const std::size_t n_years = rows.size() / n_ages;
    table.years.reserve(n_years);
    table.rates.resize(n_years, n_ages);

    for (std::size_t y = 0; y < n_years; ++y) {
        const int year = rows[y * n_ages].year;
        if (!table.years.empty() && year != table.years.back() + 1) {
            throw DataError(path + ": years not contiguous at " + std::to_string(year));
        }
        table.years.push_back(year);
        for (std::size_t a = 0; a < n_ages; ++a) {
            const ParsedRow& row = rows[y * n_ages + a];
            if (row.year != year || row.age != table.ages[a]) {
                throw DataError(path + ": year " + std::to_string(year) +
                                " does not list the common age set in order");
            }
            double value = row.total;
            if (sex == Sex::female) value = row.female;
            if (sex == Sex::male) value = row.male;
            table.rates(y, a) = value;
        }
    }
    return table;
}

}  // namespace

Sex parse_sex(const std::string& name) {
    if (name == "female") return Sex::female;
    if (name == "male") return Sex::male;
    if (name == "total") return Sex::total;
    throw ContractError("unknown sex '" + name + "' (female|male|total)");
}

std::string to_string(Sex sex) {
    switch (sex) {
        case Sex::female: return "female";
        case Sex::male: return "male";
        case Sex::total: return "total";
    }
    return "total";
}

MortalityTable parse_mx_file(const std::string& path, Sex sex) {
    return parse_hmd_layout(path, sex);
}

void attach_exposures(MortalityTable& table, const std::string& path) {
    const MortalityTable exp = parse_hmd_layout(path, table.sex);
    if (exp.years != table.years || exp.ages != table.ages) {
        throw DataError("exposure file '" + path + "' does not match the rates table");
    }
    table.exposures = exp.rates;
}

MortalityTable group_open_age(const MortalityTable& table, int cutoff) {
    const auto cut = std::find(table.ages.begin(), table.ages.end(), cutoff);
    if (cut == table.ages.end()) {
        throw ContractError("group_open_age: cutoff " + std::to_string(cutoff) +
                            " not in the age range");
    }
    const Eigen::Index keep = static_cast<Eigen::Index>(cut - table.ages.begin());
    const Eigen::Index n_years = table.rates.rows();
    const Eigen::Index n_ages = table.rates.cols();

    MortalityTable out;
    out.years = table.years;
    out.sex = table.sex;
    out.open_ended = true;
    out.ages.assign(table.ages.begin(), cut + 1);
    out.rates.resize(n_years, keep + 1);
    out.rates.leftCols(keep) = table.rates.leftCols(keep);
    if (table.exposures) {
        out.exposures = Eigen::MatrixXd(n_years, keep + 1);
        out.exposures->leftCols(keep) = table.exposures->leftCols(keep);
    } else {
        out.pooled_without_exposures = true;
    }

    for (Eigen::Index y = 0; y < n_years; ++y) {
        double deaths = 0.0, exposure = 0.0;
        double rate_sum = 0.0;
        int rate_count = 0;
        for (Eigen::Index a = keep; a < n_ages; ++a) {
            const double rate = table.rates(y, a);
            if (is_missing(rate)) continue;
            if (table.exposures) {
                const double e = (*table.exposures)(y, a);
                if (is_missing(e)) continue;
                deaths += rate * e;
                exposure += e;
            }
            rate_sum += rate;
            ++rate_count;
        }
        if (table.exposures) {
            out.rates(y, keep) = (exposure > 0.0) ? deaths / exposure : kMissing;
            (*out.exposures)(y, keep) = exposure;
        } else {
            out.rates(y, keep) = (rate_count > 0)
                                     ? rate_sum / static_cast<double>(rate_count)
                                     : kMissing;
        }
    }
    return out;
}

FunctionalTimeSeries to_log_fts(const MortalityTable& table) {
    const Eigen::Index n_years = table.rates.rows();
    const Eigen::Index n_ages = table.rates.cols();

    // Imputation of zero/missing cells before taking logs. A cell inside a
    // multi-year gap at the same age is filled by interpolating the nearest
    // positive rates at that age in time; an isolated cell takes half the
    // smallest positive rate of its own year.
    Eigen::MatrixXd rates = table.rates;
    auto usable = [&](Eigen::Index y, Eigen::Index a) {
        return !is_missing(table.rates(y, a)) && table.rates(y, a) > 0.0;
    };
    for (Eigen::Index y = 0; y < n_years; ++y) {
        double year_min = std::numeric_limits<double>::infinity();
        bool has_positive = false;
        for (Eigen::Index a = 0; a < n_ages; ++a) {
            if (usable(y, a)) {
                has_positive = true;
                year_min = std::min(year_min, table.rates(y, a));
            }
        }
        bool all_missing = true;
        for (Eigen::Index a = 0; a < n_ages; ++a) {
            if (!is_missing(table.rates(y, a))) all_missing = false;
        }
        if (all_missing) {
            throw DataError("to_log_fts: year " + std::to_string(table.years[y]) +
                            " has no observed rates");
        }

        for (Eigen::Index a = 0; a < n_ages; ++a) {
            if (usable(y, a)) continue;
            const bool run_in_time = (y > 0 && !usable(y - 1, a)) ||
                                     (y + 1 < n_years && !usable(y + 1, a));
            double imputed = kMissing;
            if (run_in_time) {
                // bracketing positive values at this age
                Eigen::Index before = y, after = y;
                for (before = y; before > 0; --before) {
                    if (usable(before - 1, a)) break;
                }
                for (after = y; after + 1 < n_years; ++after) {
                    if (usable(after + 1, a)) break;
                }
                const bool has_before = before > 0 && usable(before - 1, a);
                const bool has_after = after + 1 < n_years && usable(after + 1, a);
                if (has_before && has_after) {
                    const double v0 = table.rates(before - 1, a);
                    const double v1 = table.rates(after + 1, a);
                    const double frac = static_cast<double>(y - (before - 1)) /
                                        static_cast<double>((after + 1) - (before - 1));
                    imputed = v0 + frac * (v1 - v0);
                } else if (has_before) {
                    imputed = table.rates(before - 1, a);
                } else if (has_after) {
                    imputed = table.rates(after + 1, a);
                }
            }
            if (is_missing(imputed)) {
                if (!has_positive) {
                    throw DataError("to_log_fts: year " + std::to_string(table.years[y]) +
                                    " has no positive rate to impute from");
                }
                imputed = 0.5 * year_min;
            }
            rates(y, a) = imputed;
        }
    }

    Eigen::MatrixXd log_values = rates.array().log10();
    Eigen::VectorXd grid_points(n_ages);
    for (Eigen::Index a = 0; a < n_ages; ++a) {
        grid_points(a) = static_cast<double>(table.ages[a]);
    }
    return FunctionalTimeSeries(std::move(log_values), AgeGrid(std::move(grid_points)),
                                table.years, ScaleTag::log10_rate);
}

Eigen::MatrixXd smoothing_weights(const MortalityTable& table) {
    const Eigen::Index n_years = table.rates.rows();
    const Eigen::Index n_ages = table.rates.cols();
    Eigen::MatrixXd weights = Eigen::MatrixXd::Ones(n_years, n_ages);
    if (!table.exposures) {
        return weights;
    }
    for (Eigen::Index y = 0; y < n_years; ++y) {
        double sum = 0.0;
        for (Eigen::Index a = 0; a < n_ages; ++a) {
            const double rate = table.rates(y, a);
            const double expo = (*table.exposures)(y, a);
            double w = 0.0;
            if (!is_missing(rate) && !is_missing(expo) && rate > 0.0 && expo > 0.0) {
                w = rate * expo;  // approximate Poisson death count
            }
            weights(y, a) = w;
            sum += w;
        }
        if (sum > 0.0) {
            weights.row(y) *= static_cast<double>(n_ages) / sum;  // mean one
        } else {
            weights.row(y).setOnes();
        }
    }
    return weights;
}

SampleSplit make_split(Eigen::Index n, Eigen::Index val_len, Eigen::Index test_len) {
    if (val_len < 0 || test_len < 0) {
        throw ContractError("make_split: negative split lengths");
    }
    if (n <= val_len + test_len) {
        throw DataError("make_split: need n > val_len + test_len (empty training set)");
    }
    SampleSplit split;
    split.train_begin = 0;
    split.train_end = n - val_len - test_len;
    split.val_begin = split.train_end;
    split.val_end = n - test_len;
    split.test_begin = split.val_end;
    split.test_end = n;
    return split;
}

}  // namespace curvecast
