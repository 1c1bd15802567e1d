#pragma once

// Run configuration for training, evaluation and ablation.
//
// Layering, lowest first: built-in defaults, a JSON config file, the
// TPLOC_SEED environment variable, command-line flags.

#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"
#include "tploc/globalalign/losses.hpp"
#include "tploc/instalign/alignment.hpp"

namespace tploc::harness {

enum class Stage { kCoarse, kFine };
std::string_view to_string(Stage s);
Stage parse_stage(std::string_view s);

struct RunConfig {
  Stage stage = Stage::kCoarse;
  std::uint64_t seed = 0;

  int coarse_epochs = 20;
  int coarse_batch = 16;
  double coarse_learning_rate = 5e-4;
  int fine_epochs = 30;
  int fine_batch = 16;
  double fine_learning_rate = 3e-4;
  /// Training queries used per epoch (a fixed seeded subset); 0 means all.
  int train_queries = 0;

  std::size_t feature_width = 64;  // frontend features
  std::size_t edge_width = 64;     // edge and instance descriptors
  std::size_t global_width = 64;   // global descriptors
  std::size_t fine_width = 64;
  std::size_t fine_blocks = 2;
  std::size_t sequence_length = 10;  // instance sequence length fed to the submap encoder

  double gamma = 0.1;
  std::size_t beose_iterations = 2;

  globalalign::LossToggles losses;
  bool beose = true;
  bool gaussian_aggregation = true;  // off: per-channel max over edges
  bool fae = true;                   // off: recurrent encoder without frequency branches
  bool precision_head = true;        // off: lambda fixed at 1
  instalign::AlignMode align_mode = instalign::AlignMode::kCorrected;

  /// Batch 64, fine stage 100 epochs / batch 32, 256-wide descriptors.
  static RunConfig full_scale();
  /// Desk defaults with 32-wide features and a coarse learning rate of 3e-3, so
  /// a 20-epoch coarse run fits in about a minute on one core.
  static RunConfig benchmark_profile();

  /// Throws ConfigError on a non-positive hyperparameter or inconsistent toggles.
  void validate() const;

  /// Lowercase hex SHA-256 of the canonical JSON of every field that affects results.
  std::string hash() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

nlohmann::json to_json(const RunConfig& c);
/// Keys present in `j` override `base`; unknown keys are a ConfigError.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_config_file(const std::filesystem::path& path, RunConfig base = {});

/// Applies TPLOC_SEED when set. Throws ConfigError when it is not an unsigned integer.
void apply_seed_environment(RunConfig& config);

}  // namespace tploc::harness
