#pragma once

// Metric reports. metrics.json holds everything that is a function of
// (config, seed, corpus) and is bit-identical across reruns; wall-clock time
// goes to timing.json.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tploc/finestage/recall.hpp"
#include "tploc/harness/config.hpp"
#include "tploc/harness/training.hpp"

namespace tploc::harness {

struct MetricsReport {
  std::string command;
  RunConfig config;
  std::string corpus_checksum;  // the corpus the metrics were computed on
  std::vector<EpochLoss> coarse_curve;
  std::vector<EpochLoss> fine_curve;
  std::optional<std::map<std::size_t, double>> retrieval_recall;
  std::optional<finestage::RecallTable> localization_recall;
  std::optional<double> fine_error;    // mean L1 in the ground-truth submap
  std::optional<double> center_error;  // same for the submap center
};

nlohmann::json to_json(const MetricsReport& report);

/// Header "k,recall", one row per k.
std::string retrieval_csv(const std::map<std::size_t, double>& recall);
/// Header "k,eps5,eps10,eps15" with one row per k in {1,5,10}. Without a table
/// every cell reads "absent".
std::string localization_csv(const std::optional<finestage::RecallTable>& table);

/// Bar chart of recall against k, built from retrieval_csv output.
std::string recall_svg(const std::string& retrieval_csv_text);

struct Timing {
  std::map<std::string, double> seconds;  // phase -> wall-clock seconds
};

/// Writes metrics.json, timing.json, retrieval_recall.csv (when present),
/// localization_recall.csv, and recall.svg when `svg` is set.
void write_report(const MetricsReport& report, const Timing& timing, const std::filesystem::path& dir,
                  bool svg = false);

}  // namespace tploc::harness
