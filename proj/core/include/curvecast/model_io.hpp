#pragma once

#include <map>
#include <string>

#include "curvecast/nsmodel.hpp"

namespace curvecast {

inline constexpr int kModelSchemaVersion = 1;

/// Serialize a fitted model (mean, bases, scores, residual curves, metadata)
/// to a versioned JSON document. `metadata` entries are carried verbatim.
std::string model_to_json(const TwoStageModel& model,
                          const std::map<std::string, std::string>& metadata);

struct LoadedModel {
    TwoStageModel model;
    std::map<std::string, std::string> metadata;
};

/// Parse and validate a model document; schema violations raise DataError.
LoadedModel model_from_json(const std::string& text);

}  // namespace curvecast
