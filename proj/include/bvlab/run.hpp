#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "bvlab/config.hpp"
#include "bvlab/ensemble.hpp"
#include "bvlab/records.hpp"

namespace bvlab {

/// Ensemble dump consumed by `decompose`:
///   {"test_count", "k", "N", "c", "kind": "real" | "simplex",
///    "outputs": [test][repeat][part][c], "labels": [test][c] or [test] class ids}
struct PredictionDump {
    EnsembleShape shape;
    bool simplex = false;
    std::vector<double> outputs;  // [test][repeat][part][c]
    std::vector<double> labels;   // [test][c]
};

PredictionDump parse_prediction_dump(const nlohmann::json& doc);
PredictionDump load_prediction_dump(const std::filesystem::path& path);
nlohmann::json to_json(const PredictionDump& dump);

/// Runs the configured mode and returns its records in deterministic order:
/// theory is lambda0-major over the gamma grid, simulate is lambda0-major
/// over p, mlp-sweep is noise-major over ascending widths.
std::vector<SweepRecord> run_config(const SweepConfig& config);

}  // namespace bvlab
