#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "curvecast/fts.hpp"

namespace curvecast {

enum class Sex { female, male, total };

Sex parse_sex(const std::string& name);
std::string to_string(Sex sex);

/// One sex's central death rates by year and age, as parsed from an
/// HMD-style Mx_1x1 file. NaN marks a missing rate. The last age may be an
/// open interval ("110+").
struct MortalityTable {
    std::vector<int> years;
    std::vector<int> ages;
    bool open_ended = false;           // last age label carries '+'
    Eigen::MatrixXd rates;             // years x ages, NaN = missing
    std::optional<Eigen::MatrixXd> exposures;
    Sex sex = Sex::total;
    bool pooled_without_exposures = false;  // set by group_open_age fallback
};

/// Contiguous 0-based half-open index ranges partitioning 0..n.
struct SampleSplit {
    Eigen::Index train_begin = 0, train_end = 0;
    Eigen::Index val_begin = 0, val_end = 0;
    Eigen::Index test_begin = 0, test_end = 0;

    Eigen::Index train_len() const { return train_end - train_begin; }
    Eigen::Index val_len() const { return val_end - val_begin; }
    Eigen::Index test_len() const { return test_end - test_begin; }
    Eigen::Index n() const { return test_end; }
};

/// Parse a whitespace-delimited Mx_1x1 file (columns Year, Age, Female,
/// Male, Total; "." marks missing; age "110+" allowed). Years must be
/// contiguous and each year must list the same ages.
MortalityTable parse_mx_file(const std::string& path, Sex sex);

/// Attach an exposure table in the same layout (same years/ages required).
void attach_exposures(MortalityTable& table, const std::string& path);

/// Pool ages >= cutoff into a single open age group. With exposures the
/// pooled rate is (sum of deaths)/(sum of exposure), deaths reconstructed as
/// rate*exposure; without exposures, the unweighted mean of available rates
/// (flagged in the table).
MortalityTable group_open_age(const MortalityTable& table, int cutoff = 95);

/// log10-transform a grouped table into a functional time series. Zero or
/// missing rates are imputed first: half the smallest positive rate of the
/// same year, or linear interpolation in time at that age when the gap spans
/// consecutive years at the same age.
FunctionalTimeSeries to_log_fts(const MortalityTable& table);

/// Smoothing weights proportional to exposure * rate (approximate inverse
/// variance of a log rate), normalized to mean one per year; all-ones when
/// exposures are absent.
Eigen::MatrixXd smoothing_weights(const MortalityTable& table);

/// Figure-style split: train 1..(n-val-test), validation, test.
SampleSplit make_split(Eigen::Index n, Eigen::Index val_len = 30, Eigen::Index test_len = 30);

}  // namespace curvecast
