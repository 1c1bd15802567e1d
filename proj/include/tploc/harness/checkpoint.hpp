#pragma once

// Checkpoint files: JSON {format, version, stage, config, config_hash,
// adam_steps, parameters: {name: {shape, values}}}. Doubles are written in
// shortest round-trip form, so save -> load reproduces every bit.

#include <filesystem>

#include "tploc/harness/model.hpp"

namespace tploc::harness {

inline constexpr int kCheckpointVersion = 1;

nlohmann::json checkpoint_json(const ParameterStore& store, const RunConfig& config, Stage stage);
void save_checkpoint(const CoarseModel& model, const std::filesystem::path& path);
void save_checkpoint(const FineModel& model, const std::filesystem::path& path);

/// Rebuilds the model from the stored config, then overwrites every parameter.
/// Throws VersionError on an unknown version, DataError on a wrong stage, a
/// config hash mismatch, or parameter names/shapes that the config does not produce.
CoarseModel load_coarse_checkpoint(const std::filesystem::path& path);
FineModel load_fine_checkpoint(const std::filesystem::path& path);

}  // namespace tploc::harness
