#include "curvecast/model_io.hpp"

#include <json.hpp>

namespace curvecast {

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row.push_back(m(i, j));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) {
        throw DataError("model document: expected a matrix (array of arrays)");
    }
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (static_cast<Eigen::Index>(j[i].size()) != cols) {
            throw DataError("model document: ragged matrix");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(i, c) = j[i][c].get<double>();
        }
    }
    return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
    if (!j.is_array()) {
        throw DataError("model document: expected an array");
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v(i) = j[static_cast<std::size_t>(i)].get<double>();
    }
    return v;
}

json basis_to_json(const FpcaBasis& basis) {
    json out;
    out["eigenvalues"] = vector_to_json(basis.eigenvalues);
    out["eigenfunctions"] = matrix_to_json(basis.eigenfunctions);
    out["scores"] = matrix_to_json(basis.scores);
    switch (basis.source) {
        case BasisSource::static_cov: out["source"] = "static_cov"; break;
        case BasisSource::long_run_cov: out["source"] = "long_run_cov"; break;
        case BasisSource::weighted_long_run: out["source"] = "weighted_long_run"; break;
    }
    return out;
}

FpcaBasis basis_from_json(const json& j, const Curve& mean) {
    FpcaBasis basis{vector_from_json(j.at("eigenvalues")),
                    matrix_from_json(j.at("eigenfunctions")),
                    matrix_from_json(j.at("scores")), mean, BasisSource::long_run_cov};
    const std::string source = j.at("source").get<std::string>();
    if (source == "static_cov") basis.source = BasisSource::static_cov;
    if (source == "weighted_long_run") basis.source = BasisSource::weighted_long_run;
    return basis;
}

}  // namespace

std::string model_to_json(const TwoStageModel& model,
                          const std::map<std::string, std::string>& metadata) {
    json doc;
    doc["schema_version"] = kModelSchemaVersion;
    doc["grid"] = vector_to_json(model.grid().points());
    doc["time_labels"] = model.residuals_Y.time_labels();
    doc["mean"] = vector_to_json(model.mean.values);
    doc["stage1"] = basis_to_json(model.stage1);
    if (model.stage2) {
        doc["stage2"] = basis_to_json(*model.stage2);
    }
    doc["residuals_Z"] = matrix_to_json(model.residuals_Z.values());
    doc["residuals_Y"] = matrix_to_json(model.residuals_Y.values());
    doc["weighted"] = model.weighted;
    doc["kappa"] = model.kappa;
    doc["independence_p_value"] = model.independence_p_value;
    doc["warnings"] = model.warnings;
    doc["metadata"] = metadata;
    return doc.dump(1);
}

LoadedModel model_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw DataError(std::string("model document: not valid JSON: ") + e.what());
    }
    try {
        if (doc.at("schema_version").get<int>() != kModelSchemaVersion) {
            throw DataError("model document: unsupported schema version");
        }
        AgeGrid grid(vector_from_json(doc.at("grid")));
        const std::vector<int> labels = doc.at("time_labels").get<std::vector<int>>();
        Curve mean(vector_from_json(doc.at("mean")), grid);

        FunctionalTimeSeries z(matrix_from_json(doc.at("residuals_Z")), grid, labels,
                               ScaleTag::residual);
        FunctionalTimeSeries y(matrix_from_json(doc.at("residuals_Y")), grid, labels,
                               ScaleTag::residual);

        FpcaBasis stage1 = basis_from_json(doc.at("stage1"), mean);
        std::optional<FpcaBasis> stage2;
        if (doc.contains("stage2")) {
            stage2 = basis_from_json(doc.at("stage2"),
                                     Curve(Eigen::VectorXd::Zero(grid.size()), grid));
        }

        LoadedModel loaded{TwoStageModel{std::move(mean), std::move(stage1),
                                         std::move(stage2), std::move(z), std::move(y),
                                         doc.at("weighted").get<bool>(),
                                         doc.at("kappa").get<double>(),
                                         doc.at("independence_p_value").get<double>(),
                                         doc.value("warnings", std::vector<std::string>{})},
                           {}};
        if (doc.contains("metadata")) {
            loaded.metadata =
                doc.at("metadata").get<std::map<std::string, std::string>>();
        }
        return loaded;
    } catch (const json::exception& e) {
        throw DataError(std::string("model document: schema violation: ") + e.what());
    }
}

}  // namespace curvecast
