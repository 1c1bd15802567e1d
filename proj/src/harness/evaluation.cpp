#include "tploc/harness/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "tploc/errors.hpp"

namespace tploc::harness {

namespace {

double l1(const scene::Vec2& a, const scene::Vec2& b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

void fill_errors(const FineModel& model, const std::vector<Sample>& samples, LocalizationEvaluation& out) {
  double err = 0.0, base = 0.0;
  for (const auto& s : samples) {
    err += l1(model.predict(*s.query, *s.submap).position, s.query->gt_position);
    base += l1(s.submap->center, s.query->gt_position);
  }
  out.mean_error = err / static_cast<double>(samples.size());
  out.center_error = base / static_cast<double>(samples.size());
}

}  // namespace

RetrievalEvaluation evaluate_retrieval(const CoarseModel& model, const scene::Corpus& corpus) {
  if (corpus.submaps.empty() || corpus.queries.empty()) throw DataError("evaluate: split has no submaps or queries");
  RetrievalEvaluation out;
  retrieval::Gallery gallery;
  for (const auto& s : corpus.submaps) {
    auto v = model.encode_submap(s);
    gallery.add(s.id, v);
    out.descriptors.push_back({s.id, "point", std::move(v)});
  }
  std::map<int, int> truth;
  std::size_t k = std::max(kLocalizationKs.back(), kRetrievalKs.back());
  for (const auto& q : corpus.queries) {
    auto v = model.encode_query(q);
    out.results.push_back(retrieval::retrieve(q.id, v, gallery, k));
    out.descriptors.push_back({q.id, "text", std::move(v)});
    truth[q.id] = q.gt_submap_id;
  }
  out.recall = retrieval::recall_at_k(out.results, truth, kRetrievalKs);
  return out;
}

LocalizationEvaluation evaluate_localization(const FineModel& model, const scene::Corpus& corpus,
                                             const std::vector<retrieval::RetrievalResult>& retrieved) {
  auto samples = corpus_samples(corpus);
  std::map<int, const retrieval::RetrievalResult*> by_query;
  for (const auto& r : retrieved) by_query[r.query_id] = &r;
  LocalizationEvaluation out;
  for (const auto& s : samples) {
    auto it = by_query.find(s.query->id);
    if (it == by_query.end()) throw DataError("evaluate: no retrieval result for query " + std::to_string(s.query->id));
    finestage::QueryPredictions qp;
    qp.query_id = s.query->id;
    qp.truth = s.query->gt_position;
    for (const auto& n : it->second->topk) {
      auto p = model.predict(*s.query, corpus.submap(n.id));
      qp.candidates.push_back({n.id, p.position, p.precision});
    }
    out.predictions.push_back(std::move(qp));
  }
  out.recall = finestage::localization_recall(out.predictions, kLocalizationEpsilons, kLocalizationKs);
  fill_errors(model, samples, out);
  return out;
}

LocalizationEvaluation evaluate_fine_error(const FineModel& model, const scene::Corpus& corpus) {
  auto samples = corpus_samples(corpus);
  if (samples.empty()) throw DataError("evaluate: split has no queries");
  LocalizationEvaluation out;
  fill_errors(model, samples, out);
  return out;
}

}  // namespace tploc::harness
