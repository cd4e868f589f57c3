#pragma once

#include <cstdint>
#include <string>

#include "curvecast/fts.hpp"

namespace curvecast {

/// Write a synthetic Mx_1x1-layout mortality file: ages 0..110+ over
/// `n_years` years starting at `first_year`. Curves follow a plausible age
/// schedule with a drifting random-walk improvement factor, a stationary
/// second factor, and observation noise; per-sex streams differ. Fully
/// determined by the seed.
void write_synthetic_mx(const std::string& path, int n_years, std::uint64_t seed,
                        int first_year = 1751);

/// In-memory equivalent on an arbitrary grid (used by tests): log10-scale
/// curves with one integrated factor, one stationary factor, and white noise.
FunctionalTimeSeries synthetic_log_mortality(int n_years, Eigen::Index p,
                                             std::uint64_t seed, int first_year = 1751);

}  // namespace curvecast
