#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tploc/scene/types.hpp"

namespace tploc::finestage {

struct CandidatePrediction {
  int submap_id = 0;
  scene::Vec2 position;
  double precision = 1.0;
  friend bool operator==(const CandidatePrediction&, const CandidatePrediction&) = default;
};

/// Fine predictions for one query, in retrieval rank order.
struct QueryPredictions {
  int query_id = 0;
  scene::Vec2 truth;
  std::vector<CandidatePrediction> candidates;
};

/// Keyed by (k, epsilon): fraction of queries with any of their first k
/// candidates within epsilon meters (2D Euclidean) of the truth. Throws
/// DataError when a query has no candidates.
using RecallTable = std::map<std::pair<std::size_t, double>, double>;

RecallTable localization_recall(const std::vector<QueryPredictions>& predictions,
                                const std::vector<double>& epsilons, const std::vector<std::size_t>& ks);

/// JSONL {query_id, submap_id, L_pr: [x, y], lambda}, one line per candidate.
std::string predictions_jsonl(const std::vector<QueryPredictions>& predictions);

}  // namespace tploc::finestage
