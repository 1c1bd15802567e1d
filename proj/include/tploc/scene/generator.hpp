#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tploc/scene/relations.hpp"
#include "tploc/scene/types.hpp"

namespace tploc::scene {

struct GenerationConfig {
  int num_submaps = 50;
  int num_queries = 500;
  int min_instances = 4;
  int max_instances = 10;
  int min_descriptions = 3;
  int max_descriptions = 6;
  double extent = 30.0;  // submap side length, meters
  /// Poses stay this far inside their submap's border so the nearest submap
  /// center is unambiguous.
  double pose_margin = 0.5;
  std::vector<Relation> relations = {Relation::kNorth, Relation::kSouth,   Relation::kEast,
                                     Relation::kWest,  Relation::kOnTopOf, Relation::kNear};

  /// Throws ConfigError on infeasible settings.
  void validate() const;
  friend bool operator==(const GenerationConfig&, const GenerationConfig&) = default;
};

struct DatasetManifest {
  int schema_version = 1;
  std::uint64_t seed = 0;
  Split split = Split::kTrain;
  int num_submaps = 0;
  int num_queries = 0;
  GenerationConfig params;
  std::string checksum;  // sha256 of submaps.jsonl followed by queries.jsonl
};

struct Corpus {
  DatasetManifest manifest;
  std::vector<SceneSubmap> submaps;
  std::vector<Query> queries;

  const SceneSubmap& submap(int id) const;
};

/// Generates one split of a synthetic city. Submap centers form a grid with
/// spacing `extent`; every submap and every query draws from its own stream
/// derived from (seed, split, index), so output is fixed by (seed, split, config).
Corpus generate_city(std::uint64_t seed, Split split, const GenerationConfig& config);

/// Sentences for a pose against chosen instances: one per instance, each true
/// under relation_truth.
std::vector<std::string> describe_pose(const Vec2& pose, const std::vector<ObjectInstance>& chosen);

/// Id ranges per split never overlap.
int submap_id_base(Split split);

/// Index of the submap whose center is closest to `p` (ties -> lowest index).
std::size_t nearest_submap(const std::vector<SceneSubmap>& submaps, const Vec2& p);

/// Checks every corpus invariant; returns human-readable violations (empty = valid).
std::vector<std::string> validate_corpus(const Corpus& corpus);

/// Fraction of unordered submap pairs sharing at least one identical (class, color) object.
double recurrence_fraction(const std::vector<SceneSubmap>& submaps);

}  // namespace tploc::scene
