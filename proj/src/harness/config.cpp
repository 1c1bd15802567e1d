#include "tploc/harness/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>

#include "tploc/errors.hpp"
#include "tploc/scene/corpus.hpp"

namespace tploc::harness {

using nlohmann::json;

std::string_view to_string(Stage s) { return s == Stage::kCoarse ? "coarse" : "fine"; }

Stage parse_stage(std::string_view s) {
  if (s == "coarse") return Stage::kCoarse;
  if (s == "fine") return Stage::kFine;
  throw ConfigError("unknown stage '" + std::string(s) + "'");
}

RunConfig RunConfig::full_scale() {
  RunConfig c;
  c.coarse_batch = 64;
  c.fine_epochs = 100;
  c.fine_batch = 32;
  c.global_width = 256;
  return c;
}

RunConfig RunConfig::benchmark_profile() {
  RunConfig c;
  c.feature_width = 32;
  c.edge_width = 32;
  c.global_width = 32;
  c.fine_width = 32;
  c.coarse_learning_rate = 3e-3;
  return c;
}

void RunConfig::validate() const {
  auto positive = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("config: ") + what + " must be positive");
  };
  positive(coarse_epochs > 0, "coarse_epochs");
  positive(coarse_batch > 0, "coarse_batch");
  positive(coarse_learning_rate > 0, "coarse_learning_rate");
  positive(fine_epochs > 0, "fine_epochs");
  positive(fine_batch > 0, "fine_batch");
  positive(fine_learning_rate > 0, "fine_learning_rate");
  positive(feature_width > 0, "feature_width");
  positive(edge_width > 0, "edge_width");
  positive(global_width > 0, "global_width");
  positive(fine_width > 0, "fine_width");
  positive(fine_blocks > 0, "fine_blocks");
  positive(sequence_length > 0, "sequence_length");
  positive(gamma > 0, "gamma");
  positive(beose_iterations > 0, "beose_iterations");
  if (train_queries < 0) throw ConfigError("config: train_queries must be >= 0");
  if (feature_width % 4 != 0) throw ConfigError("config: feature_width must be a multiple of 4");
  if (!losses.spatial && !losses.object && !losses.global) {
    throw ConfigError("config: at least one coarse loss must be enabled");
  }
  // BEOSE and GA only feed the spatial loss; toggling them without it is a no-op run.
  if (!losses.spatial && (!beose || !gaussian_aggregation)) {
    throw ConfigError("config: beose/gaussian_aggregation toggles require the spatial loss");
  }
}

json to_json(const RunConfig& c) {
  return json{{"stage", to_string(c.stage)},
              {"seed", c.seed},
              {"coarse_epochs", c.coarse_epochs},
              {"coarse_batch", c.coarse_batch},
              {"coarse_learning_rate", c.coarse_learning_rate},
              {"fine_epochs", c.fine_epochs},
              {"fine_batch", c.fine_batch},
              {"fine_learning_rate", c.fine_learning_rate},
              {"train_queries", c.train_queries},
              {"feature_width", c.feature_width},
              {"edge_width", c.edge_width},
              {"global_width", c.global_width},
              {"fine_width", c.fine_width},
              {"fine_blocks", c.fine_blocks},
              {"sequence_length", c.sequence_length},
              {"gamma", c.gamma},
              {"beose_iterations", c.beose_iterations},
              {"loss_spatial", c.losses.spatial},
              {"loss_object", c.losses.object},
              {"loss_global", c.losses.global},
              {"beose", c.beose},
              {"gaussian_aggregation", c.gaussian_aggregation},
              {"fae", c.fae},
              {"precision_head", c.precision_head},
              {"align_mode", instalign::to_string(c.align_mode)}};
}

namespace {

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

RunConfig config_from_json(const json& j, RunConfig c) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  static const std::set<std::string> known = [] {
    std::set<std::string> keys;
    json defaults = to_json(RunConfig{});
    for (auto& [k, v] : defaults.items()) keys.insert(k);
    return keys;
  }();
  for (auto& [k, v] : j.items()) {
    if (!known.count(k)) throw ConfigError("config: unknown key '" + k + "'");
  }
  std::string stage(to_string(c.stage)), align(instalign::to_string(c.align_mode));
  read(j, "stage", stage);
  read(j, "seed", c.seed);
  read(j, "coarse_epochs", c.coarse_epochs);
  read(j, "coarse_batch", c.coarse_batch);
  read(j, "coarse_learning_rate", c.coarse_learning_rate);
  read(j, "fine_epochs", c.fine_epochs);
  read(j, "fine_batch", c.fine_batch);
  read(j, "fine_learning_rate", c.fine_learning_rate);
  read(j, "train_queries", c.train_queries);
  read(j, "feature_width", c.feature_width);
  read(j, "edge_width", c.edge_width);
  read(j, "global_width", c.global_width);
  read(j, "fine_width", c.fine_width);
  read(j, "fine_blocks", c.fine_blocks);
  read(j, "sequence_length", c.sequence_length);
  read(j, "gamma", c.gamma);
  read(j, "beose_iterations", c.beose_iterations);
  read(j, "loss_spatial", c.losses.spatial);
  read(j, "loss_object", c.losses.object);
  read(j, "loss_global", c.losses.global);
  read(j, "beose", c.beose);
  read(j, "gaussian_aggregation", c.gaussian_aggregation);
  read(j, "fae", c.fae);
  read(j, "precision_head", c.precision_head);
  read(j, "align_mode", align);
  c.stage = parse_stage(stage);
  try {
    c.align_mode = instalign::parse_align_mode(align);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return c;
}

RunConfig load_config_file(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + path.string() + ": " + e.what());
  }
  return config_from_json(j, base);
}

void apply_seed_environment(RunConfig& config) {
  const char* env = std::getenv("TPLOC_SEED");
  if (!env || !*env) return;
  std::string_view s(env);
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("TPLOC_SEED is not an unsigned integer: '" + std::string(s) + "'");
  }
  config.seed = value;
}

std::string RunConfig::hash() const {
  json j = to_json(*this);
  // The stage selects which subcommand runs, not what a model computes.
  j.erase("stage");
  return scene::sha256_hex(j.dump());
}

}  // namespace tploc::harness
