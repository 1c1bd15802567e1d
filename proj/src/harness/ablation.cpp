#include "tploc/harness/ablation.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <memory>
#include <sstream>

#include "tploc/errors.hpp"
#include "tploc/harness/evaluation.hpp"
#include "tploc/harness/training.hpp"

namespace tploc::harness {

using nlohmann::json;

std::vector<AblationCell> standard_matrix(const RunConfig& base) {
  std::vector<AblationCell> cells;
  auto add = [&](std::string name, const std::function<void(RunConfig&)>& edit, bool fine = false) {
    RunConfig c = base;
    edit(c);
    cells.push_back({std::move(name), c, fine});
  };
  add("full", [](RunConfig&) {});
  add("no_beose", [](RunConfig& c) { c.beose = false; });
  add("no_fae", [](RunConfig& c) { c.fae = false; });
  add("ga_maxpool", [](RunConfig& c) { c.gaussian_aggregation = false; });
  struct Combo {
    const char* name;
    bool spatial, object, global;
  };
  for (auto [name, is, io, glo] : {Combo{"loss_is", true, false, false}, Combo{"loss_io", false, true, false},
                                   Combo{"loss_global", false, false, true}, Combo{"loss_is_io", true, true, false},
                                   Combo{"loss_is_global", true, false, true}, Combo{"loss_io_global", false, true, true},
                                   Combo{"loss_all", true, true, true}}) {
    add(name, [=](RunConfig& c) { c.losses = {is, io, glo}; });
  }
  add("fine", [](RunConfig&) {}, true);
  add("fine_no_precision", [](RunConfig& c) { c.precision_head = false; }, true);
  return cells;
}

std::vector<AblationCell> select_cells(const std::vector<AblationCell>& matrix, const std::vector<std::string>& names) {
  if (names.empty()) throw ConfigError("ablate: empty cell selection");
  std::vector<AblationCell> out;
  for (const auto& n : names) {
    auto it = std::find_if(matrix.begin(), matrix.end(), [&](const AblationCell& c) { return c.name == n; });
    if (it == matrix.end()) throw ConfigError("ablate: unknown cell '" + n + "'");
    out.push_back(*it);
  }
  return out;
}

const CellOutcome& AblationReport::cell(const std::string& name) const {
  for (const auto& c : cells) {
    if (c.name == name) return c;
  }
  throw ContractViolation("ablation report has no cell '" + name + "'");
}

double median(std::vector<double> values) {
  if (values.empty()) throw EmptyInputError("median of no values");
  std::sort(values.begin(), values.end());
  std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

// Identifies the coarse model a config trains: everything except fine-stage settings.
std::string coarse_key(const RunConfig& c) {
  json j = to_json(c);
  for (const char* k : {"stage", "fine_epochs", "fine_batch", "fine_learning_rate", "fine_width", "fine_blocks",
                        "precision_head"}) {
    j.erase(k);
  }
  return j.dump();
}

struct TrainedCoarse {
  std::shared_ptr<CoarseModel> model;
  std::map<std::size_t, double> recall;
  double seconds = 0.0;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

AblationReport ablate(const std::vector<AblationCell>& cells, const std::vector<std::uint64_t>& seeds,
                      const scene::Corpus& train, const scene::Corpus& eval, const AblationProgress& progress) {
  if (cells.empty()) throw ConfigError("ablate: empty matrix");
  if (seeds.empty()) throw ConfigError("ablate: no seeds");
  for (const auto& c : cells) c.config.validate();
  std::map<std::string, TrainedCoarse> cache;
  AblationReport report;
  for (const auto& cell : cells) {
    CellOutcome outcome;
    outcome.name = cell.name;
    outcome.config = cell.config;
    for (auto seed : seeds) {
      RunConfig cfg = cell.config;
      cfg.seed = seed;
      SeedOutcome so;
      so.seed = seed;
      auto key = coarse_key(cfg);
      auto it = cache.find(key);
      if (it == cache.end()) {
        auto t0 = std::chrono::steady_clock::now();
        auto model = std::make_shared<CoarseModel>(CoarseModel::create(cfg));
        train_coarse(*model, train);
        TrainedCoarse tc{model, evaluate_retrieval(*model, eval).recall, seconds_since(t0)};
        it = cache.emplace(key, std::move(tc)).first;
        so.train_seconds = it->second.seconds;
      }
      so.recall = it->second.recall;
      if (cell.fine) {
        auto t0 = std::chrono::steady_clock::now();
        FineModel fine = FineModel::create(cfg, it->second.model.get());
        train_fine(fine, train);
        auto ev = evaluate_fine_error(fine, eval);
        so.fine_error = ev.mean_error;
        so.center_error = ev.center_error;
        so.train_seconds += seconds_since(t0);
      }
      if (progress) progress(cell.name, seed, so);
      outcome.seeds.push_back(std::move(so));
    }
    for (auto k : kRetrievalKs) {
      std::vector<double> v;
      for (const auto& s : outcome.seeds) v.push_back(s.recall.at(k));
      outcome.median_recall[k] = median(v);
    }
    if (cell.fine) {
      std::vector<double> err, base;
      for (const auto& s : outcome.seeds) {
        err.push_back(*s.fine_error);
        base.push_back(*s.center_error);
      }
      outcome.median_fine_error = median(err);
      outcome.median_center_error = median(base);
    }
    report.cells.push_back(std::move(outcome));
  }
  return report;
}

json to_json(const AblationReport& report) {
  json cells = json::array();
  for (const auto& c : report.cells) {
    json med = json::object();
    for (auto [k, v] : c.median_recall) med[std::to_string(k)] = v;
    json per = json::array();
    for (const auto& s : c.seeds) {
      json rec = json::object();
      for (auto [k, v] : s.recall) rec[std::to_string(k)] = v;
      json row{{"seed", s.seed}, {"recall", rec}};
      if (s.fine_error) row["fine_error"] = *s.fine_error;
      if (s.center_error) row["center_error"] = *s.center_error;
      per.push_back(std::move(row));
    }
    json cell{{"name", c.name},
              {"config_hash", c.config.hash()},
              {"config", to_json(c.config)},
              {"median_recall", med},
              {"seeds", per}};
    if (c.median_fine_error) cell["median_fine_error"] = *c.median_fine_error;
    if (c.median_center_error) cell["median_center_error"] = *c.median_center_error;
    cells.push_back(std::move(cell));
  }
  return json{{"cells", cells}};
}

std::string ablation_csv(const AblationReport& report) {
  std::ostringstream os;
  os << std::setprecision(6) << std::fixed;
  std::size_t nseeds = report.cells.empty() ? 0 : report.cells.front().seeds.size();
  os << "cell,recall1,recall3,recall5,fine_error,center_error";
  for (std::size_t i = 0; i < nseeds; ++i) os << ",recall1_seed" << report.cells.front().seeds[i].seed;
  os << "\n";
  for (const auto& c : report.cells) {
    os << c.name << "," << c.median_recall.at(1) << "," << c.median_recall.at(3) << "," << c.median_recall.at(5) << ",";
    if (c.median_fine_error) os << *c.median_fine_error;
    os << ",";
    if (c.median_center_error) os << *c.median_center_error;
    for (const auto& s : c.seeds) os << "," << s.recall.at(1);
    os << "\n";
  }
  return os.str();
}

}  // namespace tploc::harness
