#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "tploc/scene/generator.hpp"

namespace tploc::scene {

inline constexpr int kCorpusSchemaVersion = 1;

nlohmann::json to_json(const SceneSubmap& s);
nlohmann::json to_json(const Query& q);
nlohmann::json to_json(const GenerationConfig& c);
SceneSubmap submap_from_json(const nlohmann::json& j);
Query query_from_json(const nlohmann::json& j);
GenerationConfig config_from_json(const nlohmann::json& j);

/// One JSON object per line, in corpus order.
std::string submaps_jsonl(const Corpus& corpus);
std::string queries_jsonl(const Corpus& corpus);

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(const std::string& data);

/// Writes <dir>/submaps.jsonl, <dir>/queries.jsonl and <dir>/manifest.json.
/// Throws DataError for an empty corpus.
void save_corpus(const Corpus& corpus, const std::filesystem::path& dir);

/// Throws CorruptCorpusError on checksum mismatch or unparsable records,
/// VersionError on an unknown schema version, DataError on missing files.
Corpus load_corpus(const std::filesystem::path& dir);

}  // namespace tploc::scene
