#pragma once

// End-to-end gradient checks of both stage losses on a tiny synthetic batch.

#include "tploc/diffcore/gradcheck.hpp"
#include "tploc/harness/model.hpp"

namespace tploc::harness {

/// `batch` submaps with `instances` instances each and one query per submap
/// with `sentences` sentences; the queries' ground-truth submaps are distinct.
scene::Corpus micro_corpus(std::uint64_t seed, int batch, int instances, int sentences);

/// Full-model config at width `width`. The instance sequence keeps its default
/// length (zero-padded): at T <= 3 the high-pass mask keeps no bins and the
/// submap descriptor degenerates to a constant.
RunConfig micro_config(std::uint64_t seed, std::size_t width);

struct StageGradChecks {
  GradCheckReport coarse;  // L_Coarse over every coarse parameter, noise frozen
  GradCheckReport fine;    // uncertainty loss over every fine parameter
};

/// B=2, N_s=3, N_q=2, D=8 by default.
StageGradChecks check_stage_gradients(std::uint64_t seed, const GradCheckOptions& options, int batch = 2,
                                      int instances = 3, int sentences = 2, std::size_t width = 8);

}  // namespace tploc::harness
