#pragma once

#include <map>
#include <optional>
#include <vector>

#include "tploc/finestage/recall.hpp"
#include "tploc/harness/model.hpp"
#include "tploc/retrieval/gallery.hpp"

namespace tploc::harness {

inline const std::vector<std::size_t> kRetrievalKs = {1, 3, 5};
inline const std::vector<std::size_t> kLocalizationKs = {1, 5, 10};
inline const std::vector<double> kLocalizationEpsilons = {5.0, 10.0, 15.0};

struct RetrievalEvaluation {
  std::vector<retrieval::GlobalDescriptor> descriptors;  // submaps then queries
  std::vector<retrieval::RetrievalResult> results;       // top max(kLocalizationKs) per query
  std::map<std::size_t, double> recall;                  // at kRetrievalKs
};

/// Gallery of every submap in the corpus, one retrieval per query.
RetrievalEvaluation evaluate_retrieval(const CoarseModel& model, const scene::Corpus& corpus);

struct LocalizationEvaluation {
  std::vector<finestage::QueryPredictions> predictions;  // on retrieved candidates
  finestage::RecallTable recall;
  /// Mean |x - x*| + |y - y*| predicted inside the ground-truth submap.
  double mean_error = 0.0;
  /// The same error when predicting the submap center (delta = 0).
  double center_error = 0.0;
};

LocalizationEvaluation evaluate_localization(const FineModel& model, const scene::Corpus& corpus,
                                             const std::vector<retrieval::RetrievalResult>& retrieved);

/// Only the ground-truth-submap errors; no retrieval needed.
LocalizationEvaluation evaluate_fine_error(const FineModel& model, const scene::Corpus& corpus);

}  // namespace tploc::harness
