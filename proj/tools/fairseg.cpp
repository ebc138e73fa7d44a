// Command-line entry point: dataset generation, training, evaluation,
// experiment runs, reporting and parameter sweeps. Failures print a
// machine-readable JSON object on stderr and exit nonzero.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fairseg/config.hpp"
#include "fairseg/dataset_io.hpp"
#include "fairseg/experiment.hpp"
#include "fairseg/report.hpp"

using nlohmann::json;

namespace {

fairseg::ExperimentConfig load_experiment_config(const std::string& path) {
  if (path.empty()) return fairseg::ExperimentConfig{};
  return fairseg::experiment_config_from_json(fairseg::load_json_file(path));
}

fairseg::DatasetSpec load_dataset_spec(const std::string& path) {
  if (path.empty()) return fairseg::default_dataset_spec();
  return fairseg::dataset_spec_from_json(fairseg::load_json_file(path));
}

int cmd_gen_data(const std::string& spec_path, const std::string& out) {
  fairseg::DatasetSpec spec = load_dataset_spec(spec_path);
  fairseg::GroupedDataset ds = fairseg::generate_dataset(spec);
  fairseg::save_dataset(ds, out);
  json j = {{"status", "ok"},
            {"out", out},
            {"train", ds.train.size()},
            {"internal", ds.internal_test.size()},
            {"external", ds.external_test.size()}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_train(const std::string& config_path, const std::string& data,
              const std::string& out, int64_t seed_flag) {
  fairseg::ExperimentConfig cfg = load_experiment_config(config_path);
  fairseg::GroupedDataset ds = fairseg::load_dataset(data);
  uint64_t seed = seed_flag >= 0 ? static_cast<uint64_t>(seed_flag) : cfg.seeds.front();

  fairseg::ModelConfig mcfg = cfg.model;
  mcfg.seed = fairseg::derive_seed(seed, 0x4d4f4445);
  fairseg::TrainConfig tcfg = cfg.train;
  tcfg.seed = seed;
  tcfg.strategy = fairseg::parse_strategy(cfg.strategy);
  if (cfg.cropping == "gt_crop" || cfg.cropping == "cascaded") tcfg.cropping_mode = "gt_crop";

  fairseg::TrainResult tr = fairseg::train(ds.train, mcfg, tcfg);
  json meta = {{"strategy", cfg.strategy},
               {"cropping_mode", tcfg.cropping_mode},
               {"seed", seed},
               {"config_digest", fairseg::config_digest(cfg)},
               {"final_loss", tr.log.total_loss.back()},
               {"train_wall_seconds", tr.log.wall_seconds}};
  fairseg::save_checkpoint(out, tr.model, tr.crop, meta);
  json j = {{"status", "ok"},
            {"checkpoint", out},
            {"seed", seed},
            {"final_loss", tr.log.total_loss.back()},
            {"wall_seconds", tr.log.wall_seconds}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_eval(const std::string& checkpoint, const std::string& stage1,
             const std::string& data, const std::string& split, const std::string& out,
             bool ed_only) {
  fairseg::GroupedDataset ds = fairseg::load_dataset(data);
  const std::vector<fairseg::LabeledSubject>* subjects = &ds.split(split);
  if (subjects->empty()) throw fairseg::MissingDataset("split is empty: " + split);
  auto [majority, minority] =
      fairseg::infer_majority_minority(ds.train.empty() ? *subjects : ds.train);

  fairseg::Checkpoint main_ck = fairseg::load_checkpoint(checkpoint);
  fairseg::EvalContext ctx;
  fairseg::Checkpoint stage1_ck;
  if (!stage1.empty()) {
    stage1_ck = fairseg::load_checkpoint(stage1);
    if (!main_ck.crop)
      throw fairseg::CorruptCheckpoint("cascaded eval needs a crop-trained stage-2 checkpoint");
    ctx.mode = "cascaded";
    ctx.full_model = &stage1_ck.model;
    ctx.crop_model = &main_ck.model;
    ctx.crop = main_ck.crop;
  } else if (main_ck.crop) {
    ctx.mode = "gt_crop";
    ctx.crop_model = &main_ck.model;
    ctx.crop = main_ck.crop;
  } else {
    ctx.mode = "none";
    ctx.full_model = &main_ck.model;
  }

  fairseg::SplitEval ev = fairseg::evaluate_split(ctx, *subjects, ed_only, majority, minority);
  std::filesystem::create_directories(out);
  fairseg::save_scores_csv(out + "/scores.csv", ev.scores);
  json rep = fairseg::fairness_report_json(ev.report);
  {
    std::ofstream f(out + "/fairness_report.json");
    f << rep.dump(2) << "\n";
  }
  json j = {{"status", "ok"}, {"out", out}, {"mode", ctx.mode}, {"report", rep}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_run_experiment(const std::string& config_path, const std::string& data,
                       const std::string& out, const std::string& cache) {
  fairseg::ExperimentConfig cfg = load_experiment_config(config_path);
  std::string cache_dir = cache.empty() ? out + "/checkpoints" : cache;
  fairseg::ExperimentResult res = fairseg::run_experiment(cfg, data, out, cache_dir);
  json j = {{"status", "ok"},
            {"name", cfg.name},
            {"digest", res.digest},
            {"out", out},
            {"runtime_seconds", res.runtime_seconds}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& out) {
  std::vector<fairseg::ExperimentResult> results;
  for (const auto& dir : inputs) results.push_back(fairseg::load_experiment_result(dir));
  fairseg::render_report(results, out);
  json j = {{"status", "ok"}, {"out", out}, {"experiments", results.size()}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& spec_path,
              const std::string& axis, const std::vector<double>& values,
              const std::string& out, const std::string& cache) {
  fairseg::ExperimentConfig cfg = load_experiment_config(config_path);
  fairseg::DatasetSpec spec = load_dataset_spec(spec_path);
  std::string cache_dir = cache.empty() ? out + "/checkpoints" : cache;
  fairseg::SweepResult res = fairseg::sweep(cfg, spec, axis, values, out, cache_dir);
  json pts = json::array();
  for (const auto& p : res.points)
    pts.push_back({{"value", p.value},
                   {"median_dsc_majority", p.median_dsc_majority},
                   {"median_dsc_minority", p.median_dsc_minority},
                   {"fairness_gap", p.fairness_gap},
                   {"ser", p.ser},
                   {"mwu_p", p.mwu_p}});
  json j = {{"status", "ok"}, {"axis", axis}, {"out", out}, {"points", pts}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fairseg: bias mitigation toolkit for group-imbalanced segmentation"};
  app.require_subcommand(1);

  std::string spec_path, config_path, data, out, cache, checkpoint, stage1, split = "internal";
  std::string axis;
  std::vector<std::string> report_inputs;
  std::vector<double> sweep_values;
  int64_t seed_flag = -1;
  bool ed_only = false;

  auto* gen = app.add_subcommand("gen-data", "Generate the synthetic dataset");
  gen->add_option("--spec", spec_path, "Dataset spec JSON (defaults used when omitted)");
  gen->add_option("--out", out, "Output dataset directory")->required();

  auto* trn = app.add_subcommand("train", "Train one model");
  trn->add_option("--config", config_path, "Experiment config JSON");
  trn->add_option("--data", data, "Dataset directory")->required();
  trn->add_option("--out", out, "Checkpoint output directory")->required();
  trn->add_option("--seed", seed_flag, "Training seed (default: first config seed)");

  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset split");
  ev->add_option("--checkpoint", checkpoint, "Checkpoint directory")->required();
  ev->add_option("--stage1", stage1, "Full-image stage-1 checkpoint (enables cascaded mode)");
  ev->add_option("--data", data, "Dataset directory")->required();
  ev->add_option("--split", split, "Split to evaluate: train|internal|external");
  ev->add_option("--out", out, "Output directory")->required();
  ev->add_flag("--ed-only", ed_only, "Evaluate only the ED frame");

  auto* run = app.add_subcommand("run-experiment", "Train (all seeds) and evaluate");
  run->add_option("--config", config_path, "Experiment config JSON");
  run->add_option("--data", data, "Dataset directory")->required();
  run->add_option("--out", out, "Output directory")->required();
  run->add_option("--cache", cache, "Checkpoint cache directory");

  auto* rep = app.add_subcommand("report", "Render tables and plots from experiment outputs");
  rep->add_option("--in", report_inputs, "Experiment output directories")->required();
  rep->add_option("--out", out, "Report output directory")->required();

  auto* sw = app.add_subcommand("sweep", "Sweep one axis and plot the trade-off");
  sw->add_option("--config", config_path, "Experiment config JSON");
  sw->add_option("--spec", spec_path, "Dataset spec JSON");
  sw->add_option("--axis", axis, "oversampling_level | minority_train_count")->required();
  sw->add_option("--values", sweep_values, "Axis values")->required();
  sw->add_option("--out", out, "Output directory")->required();
  sw->add_option("--cache", cache, "Checkpoint cache directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen_data(spec_path, out);
    if (trn->parsed()) return cmd_train(config_path, data, out, seed_flag);
    if (ev->parsed()) return cmd_eval(checkpoint, stage1, data, split, out, ed_only);
    if (run->parsed()) return cmd_run_experiment(config_path, data, out, cache);
    if (rep->parsed()) return cmd_report(report_inputs, out);
    if (sw->parsed()) return cmd_sweep(config_path, spec_path, axis, sweep_values, out, cache);
  } catch (const fairseg::Error& e) {
    json j = {{"status", "error"}, {"kind", e.kind}, {"message", e.what()}};
    std::cerr << j.dump(2) << "\n";
    return 1;
  } catch (const std::exception& e) {
    json j = {{"status", "error"}, {"kind", "Unexpected"}, {"message", e.what()}};
    std::cerr << j.dump(2) << "\n";
    return 2;
  }
  return 0;
}
