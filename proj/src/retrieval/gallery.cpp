#include "tploc/retrieval/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tploc/errors.hpp"

namespace tploc::retrieval {

using nlohmann::json;

void Gallery::add(int submap_id, std::vector<double> descriptor) {
  if (descriptor.empty()) throw ContractViolation("gallery: empty descriptor");
  if (ids_.empty()) {
    dim_ = descriptor.size();
  } else if (descriptor.size() != dim_) {
    throw ContractViolation("gallery: descriptor width " + std::to_string(descriptor.size()) +
                            " does not match " + std::to_string(dim_));
  }
  if (std::find(ids_.begin(), ids_.end(), submap_id) != ids_.end()) {
    throw ContractViolation("gallery: duplicate submap id " + std::to_string(submap_id));
  }
  ids_.push_back(submap_id);
  data_.insert(data_.end(), descriptor.begin(), descriptor.end());
}

std::span<const double> Gallery::descriptor(std::size_t index) const {
  return std::span<const double>(data_).subspan(index * dim_, dim_);
}

RetrievalResult retrieve(int query_id, std::span<const double> query, const Gallery& gallery, std::size_t k) {
  if (k == 0) throw ContractViolation("retrieve: k must be at least 1");
  if (gallery.empty()) throw ContractViolation("retrieve: gallery is empty");
  if (query.size() != gallery.dimension()) {
    throw ContractViolation("retrieve: query width " + std::to_string(query.size()) + " does not match gallery width " +
                            std::to_string(gallery.dimension()));
  }
  std::vector<Neighbor> all;
  all.reserve(gallery.size());
  for (std::size_t i = 0; i < gallery.size(); ++i) {
    auto d = gallery.descriptor(i);
    double s = 0.0;
    for (std::size_t c = 0; c < d.size(); ++c) s += (query[c] - d[c]) * (query[c] - d[c]);
    all.push_back({gallery.ids()[i], std::sqrt(s)});
  }
  k = std::min(k, all.size());
  auto before = [](const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.id < b.id);
  };
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), before);
  all.resize(k);
  return {query_id, std::move(all)};
}

std::map<std::size_t, double> recall_at_k(const std::vector<RetrievalResult>& results,
                                          const std::map<int, int>& truth, const std::vector<std::size_t>& ks) {
  std::map<std::size_t, double> out;
  for (auto k : ks) out[k] = 0.0;
  if (results.empty()) return out;
  for (const auto& r : results) {
    auto it = truth.find(r.query_id);
    if (it == truth.end()) throw DataError("recall: no ground truth for query " + std::to_string(r.query_id));
    auto pos = std::find_if(r.topk.begin(), r.topk.end(), [&](const Neighbor& n) { return n.id == it->second; });
    auto rank = static_cast<std::size_t>(pos - r.topk.begin());
    for (auto k : ks)
      if (rank < k) out[k] += 1.0;
  }
  for (auto& [k, v] : out) v /= static_cast<double>(results.size());
  return out;
}

json descriptors_to_json(const std::vector<GlobalDescriptor>& descriptors) {
  json arr = json::array();
  for (const auto& d : descriptors) arr.push_back({{"id", d.id}, {"modality", d.modality}, {"vector", d.vector}});
  return arr;
}

std::vector<GlobalDescriptor> descriptors_from_json(const json& j) {
  std::vector<GlobalDescriptor> out;
  try {
    for (const auto& e : j) {
      out.push_back({e.at("id").get<int>(), e.at("modality").get<std::string>(),
                     e.at("vector").get<std::vector<double>>()});
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("descriptor dump: ") + e.what());
  }
  return out;
}

void save_descriptors(const std::vector<GlobalDescriptor>& descriptors, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << descriptors_to_json(descriptors).dump() << '\n';
}

std::vector<GlobalDescriptor> load_descriptors(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  try {
    return descriptors_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

Gallery gallery_from_descriptors(const std::vector<GlobalDescriptor>& descriptors) {
  Gallery g;
  for (const auto& d : descriptors)
    if (d.modality == "point") g.add(d.id, d.vector);
  return g;
}

std::string results_jsonl(const std::vector<RetrievalResult>& results) {
  std::string out;
  for (const auto& r : results) {
    json top = json::array();
    for (const auto& n : r.topk) top.push_back({{"id", n.id}, {"dist", n.distance}});
    out += json{{"query_id", r.query_id}, {"topk", top}}.dump() + "\n";
  }
  return out;
}

std::vector<RetrievalResult> parse_results_jsonl(const std::string& text) {
  std::vector<RetrievalResult> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      auto j = json::parse(line);
      RetrievalResult r{j.at("query_id").get<int>(), {}};
      for (const auto& n : j.at("topk")) r.topk.push_back({n.at("id").get<int>(), n.at("dist").get<double>()});
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw DataError(std::string("retrieval results: ") + e.what());
    }
  }
  return out;
}

}  // namespace tploc::retrieval
