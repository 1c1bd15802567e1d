#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tploc/harness/config.hpp"
#include "tploc/scene/generator.hpp"

namespace tploc::harness {

struct AblationCell {
  std::string name;
  RunConfig config;
  /// Fine cells also train the fine stage and report localization error.
  bool fine = false;
};

/// Module removals, the seven coarse-loss combinations and the fine-stage
/// precision-head removal, all derived from `base`. "full" equals `base`.
std::vector<AblationCell> standard_matrix(const RunConfig& base);

/// Cells of `matrix` with the given names, in the given order. Throws
/// ConfigError for an unknown name or an empty selection.
std::vector<AblationCell> select_cells(const std::vector<AblationCell>& matrix, const std::vector<std::string>& names);

struct SeedOutcome {
  std::uint64_t seed = 0;
  std::map<std::size_t, double> recall;  // retrieval recall at {1,3,5}
  std::optional<double> fine_error;
  std::optional<double> center_error;
  double train_seconds = 0.0;
};

struct CellOutcome {
  std::string name;
  RunConfig config;
  std::vector<SeedOutcome> seeds;
  std::map<std::size_t, double> median_recall;
  std::optional<double> median_fine_error;
  std::optional<double> median_center_error;
};

struct AblationReport {
  std::vector<CellOutcome> cells;
  const CellOutcome& cell(const std::string& name) const;
};

using AblationProgress = std::function<void(const std::string& cell, std::uint64_t seed, const SeedOutcome&)>;

/// Trains and evaluates every cell once per seed (config.seed is overwritten).
/// Coarse models are shared between cells whose coarse settings coincide, so a
/// fine cell reuses the coarse model of the matching coarse cell.
/// Throws ConfigError for an empty matrix or seed list.
AblationReport ablate(const std::vector<AblationCell>& cells, const std::vector<std::uint64_t>& seeds,
                      const scene::Corpus& train, const scene::Corpus& eval, const AblationProgress& progress = {});

double median(std::vector<double> values);

/// Medians and per-seed values side by side.
nlohmann::json to_json(const AblationReport& report);
/// One row per cell: name, median recall@1/3/5, median fine/center error, then per-seed recall@1.
std::string ablation_csv(const AblationReport& report);

}  // namespace tploc::harness
