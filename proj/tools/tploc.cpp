// tploc command-line interface.
//
// Config precedence, lowest first: --profile preset, --config file,
// TPLOC_SEED, individual flags. Exit codes: 0 ok, 2 config, 3 data,
// 4 numeric, 5 contract, 1 anything else.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "tploc/errors.hpp"
#include "tploc/harness/ablation.hpp"
#include "tploc/harness/checkpoint.hpp"
#include "tploc/harness/evaluation.hpp"
#include "tploc/harness/gradcheck_batch.hpp"
#include "tploc/harness/report.hpp"
#include "tploc/harness/training.hpp"
#include "tploc/scene/corpus.hpp"

namespace {

using namespace tploc;
using namespace tploc::harness;
namespace fs = std::filesystem;

struct ConfigFlags {
  std::string profile = "desk";
  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::optional<int> coarse_epochs, coarse_batch, fine_epochs, fine_batch, train_queries;
  std::optional<double> coarse_lr, fine_lr, gamma;
  std::optional<std::size_t> feature_width, edge_width, global_width, fine_width, fine_blocks, sequence_length,
      beose_iterations;
  std::optional<bool> loss_spatial, loss_object, loss_global, beose, ga, fae, precision_head;
  std::optional<std::string> align_mode;

  void attach(CLI::App* app, bool with_profile = true) {
    if (with_profile) {
      app->add_option("--profile", profile, "Base preset")->check(CLI::IsMember({"desk", "benchmark", "full"}));
    }
    app->add_option("--config", config_file, "JSON config file (keys as in metrics.json 'config')");
    app->add_option("--seed", seed, "Master seed (overrides TPLOC_SEED)");
    app->add_option("--coarse-epochs", coarse_epochs);
    app->add_option("--coarse-batch", coarse_batch);
    app->add_option("--coarse-learning-rate", coarse_lr);
    app->add_option("--fine-epochs", fine_epochs);
    app->add_option("--fine-batch", fine_batch);
    app->add_option("--fine-learning-rate", fine_lr);
    app->add_option("--train-queries", train_queries, "Training queries per epoch (0 = all)");
    app->add_option("--feature-width", feature_width);
    app->add_option("--edge-width", edge_width);
    app->add_option("--global-width", global_width);
    app->add_option("--fine-width", fine_width);
    app->add_option("--fine-blocks", fine_blocks);
    app->add_option("--sequence-length", sequence_length);
    app->add_option("--gamma", gamma, "Contrastive temperature");
    app->add_option("--beose-iterations", beose_iterations);
    app->add_option("--loss-spatial", loss_spatial);
    app->add_option("--loss-object", loss_object);
    app->add_option("--loss-global", loss_global);
    app->add_option("--beose", beose);
    app->add_option("--gaussian-aggregation", ga);
    app->add_option("--fae", fae);
    app->add_option("--precision-head", precision_head);
    app->add_option("--align-mode", align_mode)->check(CLI::IsMember({"corrected", "literal"}));
  }

  RunConfig resolve(RunConfig base) const {
    if (profile == "benchmark") base = RunConfig::benchmark_profile();
    if (profile == "full") base = RunConfig::full_scale();
    if (!config_file.empty()) base = load_config_file(config_file, base);
    apply_seed_environment(base);
    auto set = [](auto& field, const auto& opt) {
      if (opt) field = *opt;
    };
    set(base.seed, seed);
    set(base.coarse_epochs, coarse_epochs);
    set(base.coarse_batch, coarse_batch);
    set(base.coarse_learning_rate, coarse_lr);
    set(base.fine_epochs, fine_epochs);
    set(base.fine_batch, fine_batch);
    set(base.fine_learning_rate, fine_lr);
    set(base.train_queries, train_queries);
    set(base.feature_width, feature_width);
    set(base.edge_width, edge_width);
    set(base.global_width, global_width);
    set(base.fine_width, fine_width);
    set(base.fine_blocks, fine_blocks);
    set(base.sequence_length, sequence_length);
    set(base.gamma, gamma);
    set(base.beose_iterations, beose_iterations);
    set(base.losses.spatial, loss_spatial);
    set(base.losses.object, loss_object);
    set(base.losses.global, loss_global);
    set(base.beose, beose);
    set(base.gaussian_aggregation, ga);
    set(base.fae, fae);
    set(base.precision_head, precision_head);
    if (align_mode) base.align_mode = instalign::parse_align_mode(*align_mode);
    base.validate();
    return base;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

void print_epoch(const char* stage, const EpochLoss& e) {
  std::cerr << stage << " epoch " << e.epoch << " loss " << e.total;
  if (std::string(stage) == "coarse") {
    std::cerr << " (global " << e.global << ", spatial " << e.spatial << ", object " << e.object << ")";
  }
  std::cerr << "\n";
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Text-to-point-cloud localization: data generation, training, evaluation, ablation"};
  app.require_subcommand(1);

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "Generate one split of a synthetic city corpus");
  std::uint64_t gen_seed = 0;
  bool gen_seed_set = false;
  std::string gen_split = "train";
  std::string gen_out;
  scene::GenerationConfig gen_cfg;
  gen->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t v) { gen_seed = v, gen_seed_set = true; });
  gen->add_option("--split", gen_split)->check(CLI::IsMember({"train", "val", "test"}));
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--submaps", gen_cfg.num_submaps);
  gen->add_option("--queries", gen_cfg.num_queries);
  gen->add_option("--min-instances", gen_cfg.min_instances);
  gen->add_option("--max-instances", gen_cfg.max_instances);
  gen->add_option("--min-descriptions", gen_cfg.min_descriptions);
  gen->add_option("--max-descriptions", gen_cfg.max_descriptions);
  gen->add_option("--extent", gen_cfg.extent, "Submap side length in meters");

  // train-coarse
  auto* tc = app.add_subcommand("train-coarse", "Train the coarse stage");
  ConfigFlags tc_flags;
  std::string tc_data, tc_out, tc_eval;
  tc_flags.attach(tc);
  tc->add_option("--data", tc_data, "Training corpus directory")->required();
  tc->add_option("--eval-data", tc_eval, "Corpus to report retrieval recall on");
  tc->add_option("--out", tc_out, "Output directory")->required();

  // train-fine
  auto* tf = app.add_subcommand("train-fine", "Train the fine stage from a coarse checkpoint");
  ConfigFlags tf_flags;
  std::string tf_data, tf_out, tf_coarse, tf_eval;
  tf_flags.attach(tf, false);
  tf->add_option("--data", tf_data, "Training corpus directory")->required();
  tf->add_option("--coarse", tf_coarse, "Coarse checkpoint")->required();
  tf->add_option("--eval-data", tf_eval, "Corpus to report localization error on");
  tf->add_option("--out", tf_out, "Output directory")->required();

  // eval
  auto* ev = app.add_subcommand("eval", "Evaluate checkpoints on a corpus split");
  std::string ev_coarse, ev_fine, ev_data, ev_out;
  bool ev_svg = false;
  ev->add_option("--coarse", ev_coarse, "Coarse checkpoint")->required();
  ev->add_option("--fine", ev_fine, "Fine checkpoint (omit for retrieval only)");
  ev->add_option("--data", ev_data, "Corpus directory")->required();
  ev->add_option("--out", ev_out, "Output directory")->required();
  ev->add_flag("--svg", ev_svg, "Also write recall.svg");

  // ablate
  auto* ab = app.add_subcommand("ablate", "Train and evaluate an ablation matrix over seeds");
  ConfigFlags ab_flags;
  std::string ab_train, ab_eval, ab_out, ab_cells, ab_seeds = "0,1,2";
  ab_flags.attach(ab);
  ab->add_option("--train-data", ab_train)->required();
  ab->add_option("--eval-data", ab_eval)->required();
  ab->add_option("--out", ab_out)->required();
  ab->add_option("--cells", ab_cells, "Comma-separated cell names (default: all)");
  ab->add_option("--seeds", ab_seeds, "Comma-separated seeds");

  // gradcheck
  auto* gc = app.add_subcommand("gradcheck", "Check L_Coarse and L_reg gradients on a micro-batch");
  std::uint64_t gc_seed = 0;
  int gc_batch = 2, gc_instances = 3, gc_sentences = 2;
  std::size_t gc_width = 8;
  GradCheckOptions gc_opts;
  gc_opts.tolerance = 1e-3;
  gc->add_option("--seed", gc_seed);
  gc->add_option("--batch", gc_batch);
  gc->add_option("--instances", gc_instances);
  gc->add_option("--sentences", gc_sentences);
  gc->add_option("--width", gc_width);
  gc->add_option("--tolerance", gc_opts.tolerance);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : exit_code_for(ErrorCategory::kConfig);
  }

  if (gen->parsed()) {
    if (!gen_seed_set) {
      RunConfig env;
      env.seed = gen_seed;
      apply_seed_environment(env);
      gen_seed = env.seed;
    }
    gen_cfg.validate();
    auto corpus = scene::generate_city(gen_seed, scene::parse_split(gen_split), gen_cfg);
    scene::save_corpus(corpus, gen_out);
    corpus.manifest = scene::load_corpus(gen_out).manifest;
    std::cout << "wrote " << corpus.submaps.size() << " submaps, " << corpus.queries.size() << " queries to "
              << gen_out << " (checksum " << corpus.manifest.checksum << ")\n";
    return 0;
  }

  if (tc->parsed()) {
    RunConfig cfg = tc_flags.resolve({});
    cfg.stage = Stage::kCoarse;
    auto corpus = scene::load_corpus(tc_data);
    Timing timing;
    auto t0 = std::chrono::steady_clock::now();
    CoarseModel model = CoarseModel::create(cfg);
    MetricsReport report;
    report.command = "train-coarse";
    report.config = cfg;
    report.corpus_checksum = corpus.manifest.checksum;
    report.coarse_curve = train_coarse(model, corpus, [](const EpochLoss& e) { print_epoch("coarse", e); });
    timing.seconds["train"] = seconds_since(t0);
    save_checkpoint(model, fs::path(tc_out) / "coarse.ckpt.json");
    if (!tc_eval.empty()) {
      auto eval = scene::load_corpus(tc_eval);
      auto t1 = std::chrono::steady_clock::now();
      report.retrieval_recall = evaluate_retrieval(model, eval).recall;
      report.corpus_checksum = eval.manifest.checksum;
      timing.seconds["eval"] = seconds_since(t1);
    }
    write_report(report, timing, tc_out);
    std::cout << "config " << cfg.hash() << "\ncheckpoint " << (fs::path(tc_out) / "coarse.ckpt.json").string() << "\n";
    return 0;
  }

  if (tf->parsed()) {
    CoarseModel coarse = load_coarse_checkpoint(tf_coarse);
    RunConfig cfg = tf_flags.resolve(coarse.config);
    cfg.stage = Stage::kFine;
    auto corpus = scene::load_corpus(tf_data);
    Timing timing;
    auto t0 = std::chrono::steady_clock::now();
    FineModel model = FineModel::create(cfg, &coarse);
    MetricsReport report;
    report.command = "train-fine";
    report.config = cfg;
    report.corpus_checksum = corpus.manifest.checksum;
    report.fine_curve = train_fine(model, corpus, [](const EpochLoss& e) { print_epoch("fine", e); });
    timing.seconds["train"] = seconds_since(t0);
    save_checkpoint(model, fs::path(tf_out) / "fine.ckpt.json");
    if (!tf_eval.empty()) {
      auto eval = scene::load_corpus(tf_eval);
      auto t1 = std::chrono::steady_clock::now();
      auto le = evaluate_fine_error(model, eval);
      report.fine_error = le.mean_error;
      report.center_error = le.center_error;
      report.corpus_checksum = eval.manifest.checksum;
      timing.seconds["eval"] = seconds_since(t1);
    }
    write_report(report, timing, tf_out);
    std::cout << "config " << cfg.hash() << "\ncheckpoint " << (fs::path(tf_out) / "fine.ckpt.json").string() << "\n";
    return 0;
  }

  if (ev->parsed()) {
    auto t0 = std::chrono::steady_clock::now();
    CoarseModel coarse = load_coarse_checkpoint(ev_coarse);
    auto corpus = scene::load_corpus(ev_data);
    fs::path out(ev_out);
    fs::create_directories(out);
    MetricsReport report;
    report.command = "eval";
    report.config = coarse.config;
    report.corpus_checksum = corpus.manifest.checksum;
    auto re = evaluate_retrieval(coarse, corpus);
    report.retrieval_recall = re.recall;
    retrieval::save_descriptors(re.descriptors, out / "descriptors.json");
    write_text(out / "retrieval.jsonl", retrieval::results_jsonl(re.results));
    if (!ev_fine.empty()) {
      FineModel fine = load_fine_checkpoint(ev_fine);
      report.config = fine.config;
      auto le = evaluate_localization(fine, corpus, re.results);
      report.localization_recall = le.recall;
      report.fine_error = le.mean_error;
      report.center_error = le.center_error;
      write_text(out / "predictions.jsonl", finestage::predictions_jsonl(le.predictions));
    }
    Timing timing;
    timing.seconds["eval"] = seconds_since(t0);
    write_report(report, timing, out, ev_svg);
    std::cout << retrieval_csv(*report.retrieval_recall) << localization_csv(report.localization_recall);
    return 0;
  }

  if (ab->parsed()) {
    RunConfig base = ab_flags.resolve({});
    auto matrix = standard_matrix(base);
    std::vector<AblationCell> cells = matrix;
    if (!ab_cells.empty()) cells = select_cells(matrix, split_list(ab_cells));
    std::vector<std::uint64_t> seeds;
    for (const auto& s : split_list(ab_seeds)) {
      try {
        seeds.push_back(std::stoull(s));
      } catch (const std::exception&) {
        throw ConfigError("ablate: bad seed '" + s + "'");
      }
    }
    auto train = scene::load_corpus(ab_train);
    auto eval = scene::load_corpus(ab_eval);
    auto t0 = std::chrono::steady_clock::now();
    auto report = ablate(cells, seeds, train, eval, [](const std::string& cell, std::uint64_t seed, const SeedOutcome& o) {
      std::cerr << cell << " seed " << seed << " recall@1 " << o.recall.at(1);
      if (o.fine_error) std::cerr << " fine error " << *o.fine_error;
      std::cerr << " (" << o.train_seconds << " s)\n";
    });
    nlohmann::json j = to_json(report);
    j["train_corpus_checksum"] = train.manifest.checksum;
    j["eval_corpus_checksum"] = eval.manifest.checksum;
    j["base_config_hash"] = base.hash();
    fs::path out(ab_out);
    write_text(out / "ablation.json", j.dump(2) + "\n");
    write_text(out / "ablation.csv", ablation_csv(report));
    write_text(out / "timing.json", nlohmann::json{{"wall_seconds", seconds_since(t0)}}.dump(2) + "\n");
    std::cout << ablation_csv(report);
    return 0;
  }

  if (gc->parsed()) {
    auto r = check_stage_gradients(gc_seed, gc_opts, gc_batch, gc_instances, gc_sentences, gc_width);
    std::cout << "L_Coarse\n" << r.coarse.table() << "\nL_reg\n" << r.fine.table();
    std::cout << "\nworst relative error: coarse " << r.coarse.worst_rel_error() << ", fine "
              << r.fine.worst_rel_error() << " (tolerance " << gc_opts.tolerance << ")\n";
    return r.coarse.passed() && r.fine.passed() ? 0 : 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const tploc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return tploc::exit_code_for(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
