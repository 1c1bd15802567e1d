#include "tploc/scene/generator.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "tploc/diffcore/rng.hpp"
#include "tploc/errors.hpp"

namespace tploc::scene {
namespace {

constexpr std::uint64_t kQuerySalt = 1u << 24;
constexpr double kMaxHeight = 4.0;

std::uint64_t split_seed(std::uint64_t seed, Split split) {
  return derive_seed(seed, 0xC17 + static_cast<std::uint64_t>(split));
}

SceneSubmap make_submap(std::uint64_t seed, Split split, int index, const GenerationConfig& cfg) {
  Rng rng(derive_seed(split_seed(seed, split), static_cast<std::uint64_t>(index)));
  int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(cfg.num_submaps))));
  SceneSubmap s;
  s.id = submap_id_base(split) + index;
  s.extent = cfg.extent;
  s.center = {(index % cols) * cfg.extent, (index / cols) * cfg.extent};
  int n = static_cast<int>(rng.uniform_int(cfg.min_instances, cfg.max_instances));
  double half = cfg.extent / 2.0;
  for (int k = 0; k < n; ++k) {
    ObjectInstance inst;
    inst.id = s.id * 100 + k;
    inst.object_class = kAllClasses[static_cast<std::size_t>(rng.uniform_int(0, kNumClasses - 1))];
    inst.color = kAllColors[static_cast<std::size_t>(rng.uniform_int(0, kNumColors - 1))];
    inst.centroid = {s.center.x + rng.uniform(-half, half), s.center.y + rng.uniform(-half, half),
                     rng.uniform(0.0, kMaxHeight)};
    s.instances.push_back(inst);
  }
  return s;
}

Query make_query(std::uint64_t seed, Split split, int index, const std::vector<SceneSubmap>& submaps,
                 const GenerationConfig& cfg) {
  Rng rng(derive_seed(split_seed(seed, split), kQuerySalt + static_cast<std::uint64_t>(index)));
  const std::set<Relation> allowed(cfg.relations.begin(), cfg.relations.end());
  double half = cfg.extent / 2.0 - cfg.pose_margin;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const auto& s = submaps[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(submaps.size()) - 1))];
    Vec2 pose{s.center.x + rng.uniform(-half, half), s.center.y + rng.uniform(-half, half)};
    std::vector<ObjectInstance> candidates;
    for (const auto& inst : s.instances) {
      if (allowed.count(relation_truth(pose, inst))) candidates.push_back(inst);
    }
    if (candidates.empty()) continue;
    auto want = static_cast<std::size_t>(rng.uniform_int(cfg.min_descriptions, cfg.max_descriptions));
    want = std::min(want, candidates.size());
    // Partial Fisher-Yates: distinct instances.
    std::vector<ObjectInstance> chosen;
    for (std::size_t j = 0; j < want; ++j) {
      auto pick = static_cast<std::size_t>(
          rng.uniform_int(static_cast<std::int64_t>(j), static_cast<std::int64_t>(candidates.size()) - 1));
      std::swap(candidates[j], candidates[pick]);
      chosen.push_back(candidates[j]);
    }
    Query q;
    q.id = submap_id_base(split) + index;
    q.gt_position = pose;
    q.gt_submap_id = s.id;
    q.descriptions = describe_pose(pose, chosen);
    return q;
  }
  throw ConfigError("generate_city: relation vocabulary admits no description for sampled poses");
}

}  // namespace

void GenerationConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError("generation config: " + m); };
  if (num_submaps < 0 || num_queries < 0) fail("counts must be non-negative");
  if (max_instances < 2) fail("max_instances must be >= 2");
  if (min_instances < 2 || min_instances > max_instances) fail("need 2 <= min_instances <= max_instances");
  if (min_descriptions < 1 || min_descriptions > max_descriptions) fail("need 1 <= min_descriptions <= max_descriptions");
  if (!(extent > 0.0)) fail("extent must be positive");
  if (pose_margin < 0.0 || pose_margin * 2.0 >= extent) fail("pose_margin must lie in [0, extent/2)");
  if (relations.empty()) fail("relation vocabulary is empty");
  if (num_queries > 0 && num_submaps == 0) fail("queries need at least one submap");
}

const SceneSubmap& Corpus::submap(int id) const {
  for (const auto& s : submaps)
    if (s.id == id) return s;
  throw DataError("corpus has no submap with id " + std::to_string(id));
}

int submap_id_base(Split split) { return 100000 * static_cast<int>(split); }

std::vector<std::string> describe_pose(const Vec2& pose, const std::vector<ObjectInstance>& chosen) {
  std::vector<std::string> out;
  out.reserve(chosen.size());
  for (const auto& inst : chosen) out.push_back(describe(relation_truth(pose, inst), inst));
  return out;
}

Corpus generate_city(std::uint64_t seed, Split split, const GenerationConfig& config) {
  config.validate();
  Corpus c;
  c.manifest.seed = seed;
  c.manifest.split = split;
  c.manifest.params = config;
  for (int i = 0; i < config.num_submaps; ++i) c.submaps.push_back(make_submap(seed, split, i, config));
  for (int i = 0; i < config.num_queries; ++i) c.queries.push_back(make_query(seed, split, i, c.submaps, config));
  c.manifest.num_submaps = config.num_submaps;
  c.manifest.num_queries = config.num_queries;
  return c;
}

std::size_t nearest_submap(const std::vector<SceneSubmap>& submaps, const Vec2& p) {
  std::size_t best = 0;
  double best_d = INFINITY;
  for (std::size_t i = 0; i < submaps.size(); ++i) {
    double d = std::hypot(p.x - submaps[i].center.x, p.y - submaps[i].center.y);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

std::vector<std::string> validate_corpus(const Corpus& corpus) {
  std::vector<std::string> errors;
  const auto& cfg = corpus.manifest.params;
  std::set<int> ids;
  for (const auto& s : corpus.submaps) {
    if (!ids.insert(s.id).second) errors.push_back("duplicate submap id " + std::to_string(s.id));
    int n = static_cast<int>(s.instances.size());
    if (n < 2 || n > cfg.max_instances) {
      errors.push_back("submap " + std::to_string(s.id) + " has " + std::to_string(n) + " instances");
    }
    for (const auto& inst : s.instances) {
      if (std::fabs(inst.centroid.x - s.center.x) > s.extent / 2 ||
          std::fabs(inst.centroid.y - s.center.y) > s.extent / 2) {
        errors.push_back("instance " + std::to_string(inst.id) + " outside its submap");
      }
    }
  }
  for (const auto& q : corpus.queries) {
    std::string tag = "query " + std::to_string(q.id) + ": ";
    if (q.descriptions.empty()) errors.push_back(tag + "no descriptions");
    const SceneSubmap* gt = nullptr;
    for (const auto& s : corpus.submaps)
      if (s.id == q.gt_submap_id) gt = &s;
    if (!gt) {
      errors.push_back(tag + "unknown ground-truth submap");
      continue;
    }
    if (std::fabs(q.gt_position.x - gt->center.x) > gt->extent / 2 ||
        std::fabs(q.gt_position.y - gt->center.y) > gt->extent / 2) {
      errors.push_back(tag + "position outside ground-truth submap");
    }
    if (corpus.submaps[nearest_submap(corpus.submaps, q.gt_position)].id != gt->id) {
      errors.push_back(tag + "ground-truth submap is not the nearest center");
    }
    for (const auto& sentence : q.descriptions) {
      ParsedDescription d;
      try {
        d = parse_description(sentence);
      } catch (const DataError& e) {
        errors.push_back(tag + e.what());
        continue;
      }
      // True iff some instance with the named (color, class) stands in that relation.
      bool holds = std::any_of(gt->instances.begin(), gt->instances.end(), [&](const auto& inst) {
        return inst.color == d.color && inst.object_class == d.object_class &&
               relation_truth(q.gt_position, inst) == d.relation;
      });
      if (!holds) errors.push_back(tag + "false sentence '" + sentence + "'");
    }
  }
  return errors;
}

double recurrence_fraction(const std::vector<SceneSubmap>& submaps) {
  std::vector<std::set<std::pair<int, int>>> keys;
  for (const auto& s : submaps) {
    std::set<std::pair<int, int>> k;
    for (const auto& inst : s.instances)
      k.emplace(static_cast<int>(inst.object_class), static_cast<int>(inst.color));
    keys.push_back(std::move(k));
  }
  std::size_t pairs = 0, shared = 0;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    for (std::size_t j = i + 1; j < keys.size(); ++j) {
      ++pairs;
      bool any = std::any_of(keys[i].begin(), keys[i].end(),
                             [&](const auto& k) { return keys[j].count(k) != 0; });
      if (any) ++shared;
    }
  }
  return pairs ? static_cast<double>(shared) / static_cast<double>(pairs) : 0.0;
}

}  // namespace tploc::scene
