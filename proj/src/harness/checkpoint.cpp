#include "tploc/harness/checkpoint.hpp"

#include <fstream>

#include "tploc/errors.hpp"

namespace tploc::harness {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "tploc-checkpoint";

void write_file(const json& j, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("checkpoint: cannot write " + path.string());
  out << j.dump() << '\n';
}

json read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("checkpoint: cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError("checkpoint: " + path.string() + ": " + e.what());
  }
}

RunConfig checked_config(const json& j, Stage stage, const std::filesystem::path& path) {
  if (!j.is_object() || j.value("format", "") != kFormat) {
    throw DataError("checkpoint: " + path.string() + " is not a checkpoint");
  }
  if (j.value("version", -1) != kCheckpointVersion) {
    throw VersionError("checkpoint: unsupported version " + j.value("version", json(-1)).dump());
  }
  if (j.value("stage", "") != to_string(stage)) {
    throw DataError("checkpoint: expected a " + std::string(to_string(stage)) + " checkpoint, got '" +
                    j.value("stage", "") + "'");
  }
  RunConfig config;
  try {
    config = config_from_json(j.at("config"));
  } catch (const json::exception& e) {
    throw DataError(std::string("checkpoint: missing config: ") + e.what());
  } catch (const ConfigError& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  }
  if (j.value("config_hash", "") != config.hash()) {
    throw DataError("checkpoint: config hash mismatch in " + path.string());
  }
  return config;
}

void restore(ParameterStore& store, const json& j) {
  const json* params = nullptr;
  try {
    params = &j.at("parameters");
  } catch (const json::exception&) {
    throw DataError("checkpoint: missing parameters");
  }
  if (params->size() != store.size()) {
    throw DataError("checkpoint: has " + std::to_string(params->size()) + " parameters, model expects " +
                    std::to_string(store.size()));
  }
  for (const auto& [name, p] : store.entries()) {
    if (!params->contains(name)) throw DataError("checkpoint: missing parameter " + name);
    const json& entry = params->at(name);
    Shape shape;
    std::vector<double> values;
    try {
      shape = entry.at("shape").get<Shape>();
      values = entry.at("values").get<std::vector<double>>();
    } catch (const json::exception& e) {
      throw DataError("checkpoint: bad parameter " + name + ": " + e.what());
    }
    if (shape != p.value.shape() || values.size() != p.value.numel()) {
      throw DataError("checkpoint: parameter " + name + " has shape " + shape_str(shape) + ", model expects " +
                      shape_str(p.value.shape()));
    }
    store.assign(name, values);
  }
  store.set_adam_steps(j.value("adam_steps", std::size_t{0}));
}

}  // namespace

json checkpoint_json(const ParameterStore& store, const RunConfig& config, Stage stage) {
  json params = json::object();
  for (const auto& [name, p] : store.entries()) {
    auto v = p.value.values();
    params[name] = json{{"shape", p.value.shape()}, {"values", std::vector<double>(v.begin(), v.end())}};
  }
  return json{{"format", kFormat},
              {"version", kCheckpointVersion},
              {"stage", to_string(stage)},
              {"config", to_json(config)},
              {"config_hash", config.hash()},
              {"adam_steps", store.adam_steps()},
              {"parameters", std::move(params)}};
}

void save_checkpoint(const CoarseModel& model, const std::filesystem::path& path) {
  write_file(checkpoint_json(model.store, model.config, Stage::kCoarse), path);
}

void save_checkpoint(const FineModel& model, const std::filesystem::path& path) {
  write_file(checkpoint_json(model.store, model.config, Stage::kFine), path);
}

CoarseModel load_coarse_checkpoint(const std::filesystem::path& path) {
  json j = read_file(path);
  CoarseModel m = CoarseModel::create(checked_config(j, Stage::kCoarse, path));
  restore(m.store, j);
  return m;
}

FineModel load_fine_checkpoint(const std::filesystem::path& path) {
  json j = read_file(path);
  FineModel m = FineModel::create(checked_config(j, Stage::kFine, path));
  restore(m.store, j);
  return m;
}

}  // namespace tploc::harness
