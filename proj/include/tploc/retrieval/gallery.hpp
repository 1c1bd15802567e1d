#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace tploc::retrieval {

/// A fixed-width descriptor tagged with its source.
struct GlobalDescriptor {
  int id = 0;
  std::string modality;  // "point" or "text"
  std::vector<double> vector;
  friend bool operator==(const GlobalDescriptor&, const GlobalDescriptor&) = default;
};

/// Point descriptors keyed by submap id. Immutable once built.
class Gallery {
 public:
  Gallery() = default;
  /// Throws ContractViolation on a duplicate id or a width mismatch.
  void add(int submap_id, std::vector<double> descriptor);

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  std::size_t dimension() const { return dim_; }
  const std::vector<int>& ids() const { return ids_; }
  std::span<const double> descriptor(std::size_t index) const;

 private:
  std::vector<int> ids_;
  std::vector<double> data_;
  std::size_t dim_ = 0;
};

struct Neighbor {
  int id = 0;
  double distance = 0.0;
  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

struct RetrievalResult {
  int query_id = 0;
  std::vector<Neighbor> topk;  // non-decreasing distance, ties by ascending id
  friend bool operator==(const RetrievalResult&, const RetrievalResult&) = default;
};

/// Exact k nearest gallery entries by Euclidean distance. k is capped at the
/// gallery size. Throws ContractViolation for k == 0, an empty gallery or a
/// width mismatch.
RetrievalResult retrieve(int query_id, std::span<const double> query, const Gallery& gallery, std::size_t k);

/// Fraction of results whose ground-truth id is among the first k entries, for
/// each k. `truth` maps query id to submap id; a missing entry is a DataError.
std::map<std::size_t, double> recall_at_k(const std::vector<RetrievalResult>& results,
                                          const std::map<int, int>& truth, const std::vector<std::size_t>& ks);

// Serialization. Descriptor dumps are a JSON array of {id, modality, vector};
// retrieval results are JSONL {query_id, topk: [{id, dist}]}.
nlohmann::json descriptors_to_json(const std::vector<GlobalDescriptor>& descriptors);
std::vector<GlobalDescriptor> descriptors_from_json(const nlohmann::json& j);
void save_descriptors(const std::vector<GlobalDescriptor>& descriptors, const std::filesystem::path& path);
std::vector<GlobalDescriptor> load_descriptors(const std::filesystem::path& path);
/// Gallery from the "point" entries of a dump.
Gallery gallery_from_descriptors(const std::vector<GlobalDescriptor>& descriptors);

std::string results_jsonl(const std::vector<RetrievalResult>& results);
std::vector<RetrievalResult> parse_results_jsonl(const std::string& text);

}  // namespace tploc::retrieval
