#include "tploc/scene/corpus.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iomanip>
#include <sstream>

#include "tploc/errors.hpp"

namespace tploc::scene {

using nlohmann::json;

namespace {

json vec(const Vec2& v) { return json::array({v.x, v.y}); }
json vec(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec2 vec2(const json& j) {
  if (!j.is_array() || j.size() != 2) throw DataError("expected a 2-vector");
  return {j[0].get<double>(), j[1].get<double>()};
}
Vec3 vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw DataError("expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& data) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + p.string());
  out << data;
  if (!out) throw DataError("write failed for " + p.string());
}

template <typename T, typename F>
std::vector<T> parse_lines(const std::string& text, const std::string& name, F parse) {
  std::vector<T> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(parse(json::parse(line)));
    } catch (const std::exception& e) {
      throw CorruptCorpusError(name + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::string corpus_checksum(const std::string& submaps, const std::string& queries) {
  return sha256_hex(submaps + queries);
}

}  // namespace

json to_json(const SceneSubmap& s) {
  json inst = json::array();
  for (const auto& i : s.instances) {
    inst.push_back({{"id", i.id},
                    {"class", std::string(to_string(i.object_class))},
                    {"color", std::string(to_string(i.color))},
                    {"centroid", vec(i.centroid)}});
  }
  return {{"id", s.id}, {"center", vec(s.center)}, {"extent", s.extent}, {"instances", inst}};
}

json to_json(const Query& q) {
  return {{"id", q.id},
          {"descriptions", q.descriptions},
          {"gt_position", vec(q.gt_position)},
          {"gt_submap_id", q.gt_submap_id}};
}

json to_json(const GenerationConfig& c) {
  json rel = json::array();
  for (auto r : c.relations) rel.push_back(std::string(to_string(r)));
  return {{"num_submaps", c.num_submaps},       {"num_queries", c.num_queries},
          {"min_instances", c.min_instances},   {"max_instances", c.max_instances},
          {"min_descriptions", c.min_descriptions}, {"max_descriptions", c.max_descriptions},
          {"extent", c.extent},                 {"pose_margin", c.pose_margin},
          {"relations", rel}};
}

SceneSubmap submap_from_json(const json& j) {
  SceneSubmap s;
  s.id = j.at("id").get<int>();
  s.center = vec2(j.at("center"));
  s.extent = j.at("extent").get<double>();
  for (const auto& i : j.at("instances")) {
    ObjectInstance inst;
    inst.id = i.at("id").get<int>();
    inst.object_class = parse_class(i.at("class").get<std::string>());
    inst.color = parse_color(i.at("color").get<std::string>());
    inst.centroid = vec3(i.at("centroid"));
    s.instances.push_back(inst);
  }
  return s;
}

Query query_from_json(const json& j) {
  Query q;
  q.id = j.at("id").get<int>();
  q.descriptions = j.at("descriptions").get<std::vector<std::string>>();
  q.gt_position = vec2(j.at("gt_position"));
  q.gt_submap_id = j.at("gt_submap_id").get<int>();
  return q;
}

GenerationConfig config_from_json(const json& j) {
  GenerationConfig c;
  c.num_submaps = j.value("num_submaps", c.num_submaps);
  c.num_queries = j.value("num_queries", c.num_queries);
  c.min_instances = j.value("min_instances", c.min_instances);
  c.max_instances = j.value("max_instances", c.max_instances);
  c.min_descriptions = j.value("min_descriptions", c.min_descriptions);
  c.max_descriptions = j.value("max_descriptions", c.max_descriptions);
  c.extent = j.value("extent", c.extent);
  c.pose_margin = j.value("pose_margin", c.pose_margin);
  if (j.contains("relations")) {
    c.relations.clear();
    for (const auto& r : j.at("relations")) c.relations.push_back(parse_relation(r.get<std::string>()));
  }
  return c;
}

std::string submaps_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& s : corpus.submaps) out += to_json(s).dump() + "\n";
  return out;
}

std::string queries_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& q : corpus.queries) out += to_json(q).dump() + "\n";
  return out;
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
  if (corpus.submaps.empty()) throw DataError("refusing to save a corpus with no submaps");
  std::filesystem::create_directories(dir);
  std::string sub = submaps_jsonl(corpus);
  std::string qry = queries_jsonl(corpus);
  json manifest = {{"schema_version", kCorpusSchemaVersion},
                   {"seed", corpus.manifest.seed},
                   {"split", std::string(to_string(corpus.manifest.split))},
                   {"num_submaps", corpus.submaps.size()},
                   {"num_queries", corpus.queries.size()},
                   {"params", to_json(corpus.manifest.params)},
                   {"checksum", corpus_checksum(sub, qry)}};
  write_file(dir / "submaps.jsonl", sub);
  write_file(dir / "queries.jsonl", qry);
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

Corpus load_corpus(const std::filesystem::path& dir) {
  json m;
  try {
    m = json::parse(read_file(dir / "manifest.json"));
  } catch (const json::exception& e) {
    throw CorruptCorpusError("manifest.json: " + std::string(e.what()));
  }
  int version = m.value("schema_version", -1);
  if (version != kCorpusSchemaVersion) {
    throw VersionError("corpus schema version " + std::to_string(version) + " is not supported (expected " +
                       std::to_string(kCorpusSchemaVersion) + ")");
  }
  std::string sub = read_file(dir / "submaps.jsonl");
  std::string qry = read_file(dir / "queries.jsonl");
  if (corpus_checksum(sub, qry) != m.value("checksum", std::string())) {
    throw CorruptCorpusError("checksum mismatch in " + dir.string());
  }
  Corpus c;
  try {
    c.manifest.schema_version = version;
    c.manifest.seed = m.at("seed").get<std::uint64_t>();
    c.manifest.split = parse_split(m.at("split").get<std::string>());
    c.manifest.params = config_from_json(m.at("params"));
    c.manifest.checksum = m.at("checksum").get<std::string>();
  } catch (const json::exception& e) {
    throw CorruptCorpusError("manifest.json: " + std::string(e.what()));
  }
  c.submaps = parse_lines<SceneSubmap>(sub, "submaps.jsonl", submap_from_json);
  c.queries = parse_lines<Query>(qry, "queries.jsonl", query_from_json);
  c.manifest.num_submaps = static_cast<int>(c.submaps.size());
  c.manifest.num_queries = static_cast<int>(c.queries.size());
  if (c.manifest.num_submaps != m.value("num_submaps", -1) || c.manifest.num_queries != m.value("num_queries", -1)) {
    throw CorruptCorpusError("record counts disagree with manifest in " + dir.string());
  }
  return c;
}

}  // namespace tploc::scene
