#include "tploc/finestage/recall.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "tploc/errors.hpp"

namespace tploc::finestage {

RecallTable localization_recall(const std::vector<QueryPredictions>& predictions,
                                const std::vector<double>& epsilons, const std::vector<std::size_t>& ks) {
  RecallTable table;
  for (auto k : ks)
    for (double e : epsilons) table[{k, e}] = 0.0;
  if (predictions.empty()) return table;
  for (const auto& q : predictions) {
    if (q.candidates.empty()) throw DataError("localization recall: query " + std::to_string(q.query_id) + " has no predictions");
    for (auto k : ks) {
      double best = INFINITY;
      for (std::size_t i = 0; i < std::min(k, q.candidates.size()); ++i) {
        const auto& p = q.candidates[i].position;
        best = std::min(best, std::hypot(p.x - q.truth.x, p.y - q.truth.y));
      }
      for (double e : epsilons)
        if (best < e) table[{k, e}] += 1.0;
    }
  }
  for (auto& [_, v] : table) v /= static_cast<double>(predictions.size());
  return table;
}

std::string predictions_jsonl(const std::vector<QueryPredictions>& predictions) {
  std::string out;
  for (const auto& q : predictions)
    for (const auto& c : q.candidates) {
      nlohmann::json j = {{"query_id", q.query_id},
                          {"submap_id", c.submap_id},
                          {"L_pr", {c.position.x, c.position.y}},
                          {"lambda", c.precision}};
      out += j.dump() + "\n";
    }
  return out;
}

}  // namespace tploc::finestage
