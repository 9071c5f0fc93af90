#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "perilod/gaze.hpp"
#include "perilod/geometry.hpp"
#include "perilod/harness.hpp"
#include "perilod/simulator.hpp"

namespace perilod::json_io {

// Parsers are strict: required fields must be present with the right type,
// unknown fields are rejected. Parse failures throw ConfigError naming the
// offending field (and the line for file-level syntax errors).

geometry::DisplaySpec display_from_json(const nlohmann::json& j);
nlohmann::json to_json(const geometry::DisplaySpec& display);

geometry::InsetSpec inset_from_json(const nlohmann::json& j); // blend_band_deg optional
nlohmann::json to_json(const geometry::InsetSpec& inset);

gaze::GazeParams params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const gaze::GazeParams& params);

simulator::ProtocolSpec protocol_from_json(const nlohmann::json& j); // all fields optional
nlohmann::json to_json(const simulator::ProtocolSpec& protocol);

nlohmann::json to_json(const simulator::Trial& trial);
simulator::Trial trial_from_json(const nlohmann::json& j);
nlohmann::json to_json(const simulator::TrialResult& result);

/// Experiment config; `base_dir` resolves a relative "params_file".
harness::ExperimentConfig config_from_json(const nlohmann::json& j,
                                           const std::filesystem::path& base_dir);

harness::ExperimentConfig load_config(const std::filesystem::path& path);
gaze::GazeParams load_params(const std::filesystem::path& path);

/// Parameter-file document: the parameter fields plus provenance lines and
/// the calibration residual.
nlohmann::json params_document(const gaze::GazeParams& params,
                               const std::vector<std::string>& provenance,
                               double calibration_rmse_s);
void save_params(const std::filesystem::path& path, const gaze::GazeParams& params,
                 const std::vector<std::string>& provenance, double calibration_rmse_s);

/// Parse a JSON document from text, mapping syntax errors to ConfigError
/// with a line number.
nlohmann::json parse_document(const std::string& text, const std::string& origin);

} // namespace perilod::json_io
