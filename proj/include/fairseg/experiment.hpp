#pragma once
// Experiment orchestration: trains (or reuses cached) models per seed,
// evaluates internal and external splits through the configured cropping
// path, and persists scores.csv / fairness_report.json / result.json so
// every reported number is recomputable from disk.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairseg/config.hpp"
#include "fairseg/cropping.hpp"
#include "fairseg/dataset_io.hpp"
#include "fairseg/metrics.hpp"
#include "fairseg/trainer.hpp"

namespace fairseg {

// Majority = larger training group; ties broken lexicographically.
inline std::pair<std::string, std::string> infer_majority_minority(
    const std::vector<LabeledSubject>& train) {
  auto groups = group_indices(train);
  if (groups.size() < 2) throw InvalidSpec("need at least two groups in the train split");
  std::string maj, min_;
  size_t maj_n = 0, min_n = SIZE_MAX;
  for (const auto& [g, idx] : groups) {
    if (idx.size() > maj_n || (idx.size() == maj_n && g < maj)) {
      maj = g;
      maj_n = idx.size();
    }
  }
  for (const auto& [g, idx] : groups) {
    if (g == maj) continue;
    if (idx.size() < min_n || (idx.size() == min_n && g < min_)) {
      min_ = g;
      min_n = idx.size();
    }
  }
  return {maj, min_};
}

// Like make_fairness_report, but tolerates the perfect-scores edge case
// (both medians 1): FG is still 0 from the medians, SER is undefined and
// reported as NaN (serialized as null).
inline FairnessReport split_fairness_report(const std::vector<SubjectScore>& scores,
                                            const std::string& majority,
                                            const std::string& minority) {
  try {
    return make_fairness_report(scores, majority, minority);
  } catch (const PerfectScores&) {
    FairnessReport rep;
    std::vector<SubjectScore> maj, min_;
    std::vector<double> dmaj, dmin;
    for (const auto& s : scores) {
      if (s.group == majority) {
        maj.push_back(s);
        dmaj.push_back(s.overall_dsc);
      } else if (s.group == minority) {
        min_.push_back(s);
        dmin.push_back(s.overall_dsc);
      }
    }
    rep.majority = summarize_group(maj);
    rep.minority = summarize_group(min_);
    rep.fairness_gap = rep.majority.median_dsc - rep.minority.median_dsc;
    rep.ser = std::numeric_limits<double>::quiet_NaN();
    rep.mann_whitney = mann_whitney_u(dmaj, dmin);
    return rep;
  }
}

struct SplitEval {
  std::vector<SubjectScore> scores;
  FairnessReport report;
  std::vector<std::pair<double, double>> bbox_errors;  // (x%, y%) per frame, cascaded only
  int stage1_empty_count = 0;
};

struct EvalContext {
  std::string mode = "none";  // none | gt_crop | cascaded
  const UNet<float>* full_model = nullptr;
  const UNet<float>* crop_model = nullptr;
  std::optional<CropConfig> crop;
  // test hooks: when set, used instead of the models
  SegmentFn stage1_override;
  SegmentFn stage2_override;
};

inline SplitEval evaluate_split(const EvalContext& ctx,
                                const std::vector<LabeledSubject>& subjects, bool ed_only,
                                const std::string& majority, const std::string& minority) {
  SplitEval out;
  const int nframes = ed_only ? 1 : 2;
  for (const auto& s : subjects) {
    std::vector<LabelMap> preds(nframes);
    for (int f = 0; f < nframes; ++f) {
      const ImageF& img = s.frames[f];
      if (ctx.mode == "none") {
        preds[f] = ctx.stage1_override ? ctx.stage1_override(img)
                                       : predict_full(*ctx.full_model, img);
      } else if (ctx.mode == "gt_crop") {
        BoundingBox box = mask_bounding_box(s.masks[f]);
        auto [crop_img, rec] = crop_around(img, box, *ctx.crop);
        LabelMap pred = ctx.stage2_override ? ctx.stage2_override(crop_img)
                                            : predict_full(*ctx.crop_model, crop_img);
        preds[f] = paste_back(pred, rec);
      } else {  // cascaded
        SegmentFn stage1 = ctx.stage1_override
                               ? ctx.stage1_override
                               : SegmentFn([&](const ImageF& im) {
                                   return predict_full(*ctx.full_model, im);
                                 });
        SegmentFn stage2 = ctx.stage2_override
                               ? ctx.stage2_override
                               : SegmentFn([&](const ImageF& im) {
                                   return predict_full(*ctx.crop_model, im);
                                 });
        CascadeResult cr = cascaded_segment(stage1, stage2, img, *ctx.crop);
        preds[f] = std::move(cr.prediction);
        if (cr.stage1_empty) {
          out.stage1_empty_count += 1;
        } else {
          BoundingBox gt_box = mask_bounding_box(s.masks[f]);
          out.bbox_errors.push_back(bbox_size_error(gt_box, cr.stage1_box));
        }
      }
    }
    std::vector<const LabelMap*> pp, gg;
    for (int f = 0; f < nframes; ++f) {
      pp.push_back(&preds[f]);
      gg.push_back(&s.masks[f]);
    }
    out.scores.push_back(score_subject(s.subject_id, s.group, pp, gg, s.spacing_mm));
  }
  out.report = split_fairness_report(out.scores, majority, minority);
  return out;
}

// ---- persistence ----

inline void save_scores_csv(const std::string& path, const std::vector<SubjectScore>& scores) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path);
  f << "subject_id,group,frame,structure,dsc,hd_mm\n";
  f.precision(17);
  for (const auto& s : scores)
    for (const auto& st : s.structures) {
      f << s.subject_id << ',' << s.group << ',' << frame_name(st.frame) << ','
        << static_cast<int>(st.label) << ',' << st.dsc << ',';
      if (st.hd_mm) f << *st.hd_mm;
      f << '\n';
    }
}

inline std::vector<SubjectScore> load_scores_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read " + path);
  std::string line;
  std::getline(f, line);
  std::map<std::string, SubjectScore> by_subject;
  std::vector<std::string> order;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string id, group, frame, structure, dsc, hd;
    std::getline(ss, id, ',');
    std::getline(ss, group, ',');
    std::getline(ss, frame, ',');
    std::getline(ss, structure, ',');
    std::getline(ss, dsc, ',');
    std::getline(ss, hd, ',');
    auto [it, inserted] = by_subject.try_emplace(id);
    if (inserted) {
      it->second.subject_id = id;
      it->second.group = group;
      order.push_back(id);
    }
    StructureScore st;
    st.frame = (frame == "ED") ? 0 : 1;
    st.label = static_cast<uint8_t>(std::stoi(structure));
    st.dsc = std::stod(dsc);
    if (!hd.empty()) st.hd_mm = std::stod(hd);
    it->second.structures.push_back(st);
  }
  std::vector<SubjectScore> out;
  for (const auto& id : order) {
    by_subject[id].finalize();
    out.push_back(std::move(by_subject[id]));
  }
  return out;
}

inline json fairness_report_json(const FairnessReport& rep) {
  auto group_json = [](const GroupSummary& g) {
    json j = {{"n", g.n}, {"median_dsc", g.median_dsc}, {"iqr_dsc", g.iqr_dsc}};
    j["median_hd"] = g.median_hd ? json(*g.median_hd) : json(nullptr);
    j["iqr_hd"] = g.iqr_hd ? json(*g.iqr_hd) : json(nullptr);
    return j;
  };
  return {{"majority", rep.majority.group},
          {"minority", rep.minority.group},
          {"groups", {{rep.majority.group, group_json(rep.majority)},
                      {rep.minority.group, group_json(rep.minority)}}},
          {"fairness_gap", rep.fairness_gap},
          {"ser", std::isnan(rep.ser) ? json(nullptr) : json(rep.ser)},
          {"mwu_u", rep.mann_whitney.u},
          {"mwu_p", rep.mann_whitney.p_two_sided},
          {"mwu_method", rep.mann_whitney.method}};
}

// ---- training with checkpoint cache ----

inline std::string dataset_digest(const std::string& data_dir) {
  std::ifstream f(data_dir + "/manifest.csv");
  if (!f) throw MissingDataset("no manifest.csv under " + data_dir);
  std::stringstream ss;
  ss << f.rdbuf();
  return hex64(fnv1a(ss.str()));
}

struct TrainedModel {
  UNet<float> model;
  std::optional<CropConfig> crop;
};

// Trains, or reuses a cached checkpoint whose key matches. The key covers
// the model/train configs, seed, strategy, cropping mode and data digest.
inline TrainedModel train_or_load(const std::vector<LabeledSubject>& train_subjects,
                                  const ModelConfig& model_cfg, const TrainConfig& train_cfg,
                                  const std::string& data_digest,
                                  const std::string& cache_dir) {
  json key_json = {{"model_widths", model_cfg.widths},
                   {"num_classes", model_cfg.num_classes},
                   {"model_seed", model_cfg.seed},
                   {"batch_size", train_cfg.batch_size},
                   {"iterations", train_cfg.iterations},
                   {"crop_iterations", train_cfg.crop_iterations},
                   {"learning_rate", train_cfg.learning_rate},
                   {"momentum", train_cfg.momentum},
                   {"poly_power", train_cfg.poly_power},
                   {"seed", train_cfg.seed},
                   {"strategy", train_cfg.strategy.name},
                   {"cropping_mode", train_cfg.cropping_mode},
                   {"crop_buffer_px", train_cfg.crop_buffer_px},
                   {"crop_jitter_px", train_cfg.crop_jitter_px},
                   {"augment", train_cfg.augment},
                   {"max_rotation_deg", train_cfg.max_rotation_deg},
                   {"oversample_level", train_cfg.oversample_level},
                   {"data", data_digest}};
  std::string key = hex64(fnv1a(key_json.dump()));
  std::string dir = cache_dir + "/" + key;
  namespace fs = std::filesystem;
  if (fs::exists(dir + "/metadata.json")) {
    Checkpoint ck = load_checkpoint(dir, model_cfg.num_classes);
    if (ck.metadata.value("cache_key", "") == key)
      return {std::move(ck.model), ck.crop};
  }
  TrainResult tr = train(train_subjects, model_cfg, train_cfg);
  json meta = {{"cache_key", key},
               {"key_fields", key_json},
               {"cropping_mode", train_cfg.cropping_mode},
               {"strategy", train_cfg.strategy.name},
               {"seed", train_cfg.seed},
               {"final_loss", tr.log.total_loss.back()},
               {"train_wall_seconds", tr.log.wall_seconds}};
  save_checkpoint(dir, tr.model, tr.crop, meta);
  return {std::move(tr.model), tr.crop};
}

// ---- run_experiment ----

struct SeedResult {
  uint64_t seed = 0;
  std::map<std::string, SplitEval> splits;  // "internal", "external"
};

struct ExperimentResult {
  ExperimentConfig config;
  std::string digest;
  std::string majority, minority;
  std::vector<SeedResult> per_seed;
  double runtime_seconds = 0.0;
};

inline ExperimentResult run_experiment(const ExperimentConfig& config,
                                       const std::string& data_dir,
                                       const std::string& out_dir,
                                       const std::string& cache_dir) {
  config.validate();
  auto t0 = std::chrono::steady_clock::now();
  GroupedDataset ds = load_dataset(data_dir);
  if (ds.train.empty()) throw MissingDataset("train split is empty in " + data_dir);
  auto [majority, minority] = infer_majority_minority(ds.train);
  std::string ddigest = dataset_digest(data_dir);

  ExperimentResult result;
  result.config = config;
  result.digest = config_digest(config);
  result.majority = majority;
  result.minority = minority;

  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  for (uint64_t seed : config.seeds) {
    SeedResult sr;
    sr.seed = seed;

    ModelConfig mcfg = config.model;
    mcfg.seed = derive_seed(seed, 0x4d4f4445);
    TrainConfig tcfg = config.train;
    tcfg.seed = seed;
    tcfg.strategy = parse_strategy(config.strategy);

    EvalContext ctx;
    ctx.mode = config.cropping;
    TrainedModel full_model, crop_model;

    if (config.cropping == "none") {
      full_model = train_or_load(ds.train, mcfg, tcfg, ddigest, cache_dir);
      ctx.full_model = &full_model.model;
    } else if (config.cropping == "gt_crop") {
      tcfg.cropping_mode = "gt_crop";
      crop_model = train_or_load(ds.train, mcfg, tcfg, ddigest, cache_dir);
      ctx.crop_model = &crop_model.model;
      ctx.crop = crop_model.crop;
    } else {  // cascaded: baseline full-image stage1, strategy-trained stage2
      TrainConfig stage1_cfg = tcfg;
      stage1_cfg.strategy = parse_strategy("baseline");
      full_model = train_or_load(ds.train, mcfg, stage1_cfg, ddigest, cache_dir);
      TrainConfig stage2_cfg = tcfg;
      stage2_cfg.cropping_mode = "gt_crop";
      crop_model = train_or_load(ds.train, mcfg, stage2_cfg, ddigest, cache_dir);
      ctx.full_model = &full_model.model;
      ctx.crop_model = &crop_model.model;
      ctx.crop = crop_model.crop;
    }

    const std::pair<const char*, const std::vector<LabeledSubject>*> eval_splits[] = {
        {"internal", &ds.internal_test}, {"external", &ds.external_test}};
    for (const auto& [split_name, subjects] : eval_splits) {
      if (subjects->empty()) continue;
      bool ed_only = (std::string(split_name) == "external") && config.external_ed_only;
      SplitEval ev = evaluate_split(ctx, *subjects, ed_only, majority, minority);

      fs::path dir = fs::path(out_dir) / ("seed" + std::to_string(seed)) / split_name;
      fs::create_directories(dir);
      save_scores_csv((dir / "scores.csv").string(), ev.scores);
      std::ofstream rf(dir / "fairness_report.json");
      rf << fairness_report_json(ev.report).dump(2) << "\n";
      if (config.cropping == "cascaded") {
        std::vector<double> ex, ey;
        for (auto [x, y] : ev.bbox_errors) {
          ex.push_back(x);
          ey.push_back(y);
        }
        json bj = {{"n", ev.bbox_errors.size()},
                   {"stage1_empty_count", ev.stage1_empty_count},
                   {"median_error_x_pct", ex.empty() ? json(nullptr) : json(median(ex))},
                   {"median_error_y_pct", ey.empty() ? json(nullptr) : json(median(ey))},
                   {"mean_error_x_pct",
                    ex.empty() ? json(nullptr)
                               : json(std::accumulate(ex.begin(), ex.end(), 0.0) / ex.size())},
                   {"mean_error_y_pct",
                    ey.empty() ? json(nullptr)
                               : json(std::accumulate(ey.begin(), ey.end(), 0.0) / ey.size())}};
        std::ofstream bf(dir / "bbox_error.json");
        bf << bj.dump(2) << "\n";
      }
      sr.splits[split_name] = std::move(ev);
    }
    result.per_seed.push_back(std::move(sr));
  }

  result.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json rj = {{"name", config.name},
             {"digest", result.digest},
             {"config", to_json(config)},
             {"majority", majority},
             {"minority", minority},
             {"seeds", config.seeds},
             {"runtime_seconds", result.runtime_seconds}};
  std::ofstream rf(fs::path(out_dir) / "result.json");
  rf << rj.dump(2) << "\n";
  return result;
}

// Reload a persisted experiment for reporting. All numbers are recomputed
// from scores.csv, not from the cached fairness reports.
inline ExperimentResult load_experiment_result(const std::string& out_dir) {
  namespace fs = std::filesystem;
  json rj = load_json_file(out_dir + "/result.json");
  ExperimentResult result;
  result.config = experiment_config_from_json(rj.at("config"));
  result.digest = rj.at("digest");
  result.majority = rj.at("majority");
  result.minority = rj.at("minority");
  result.runtime_seconds = rj.value("runtime_seconds", 0.0);
  for (uint64_t seed : rj.at("seeds").get<std::vector<uint64_t>>()) {
    SeedResult sr;
    sr.seed = seed;
    for (const char* split : {"internal", "external"}) {
      fs::path dir = fs::path(out_dir) / ("seed" + std::to_string(seed)) / split;
      if (!fs::exists(dir / "scores.csv")) continue;
      SplitEval ev;
      ev.scores = load_scores_csv((dir / "scores.csv").string());
      ev.report = split_fairness_report(ev.scores, result.majority, result.minority);
      if (fs::exists(dir / "bbox_error.json")) {
        json bj = load_json_file((dir / "bbox_error.json").string());
        if (!bj.at("median_error_x_pct").is_null())
          ev.bbox_errors.push_back({bj["median_error_x_pct"], bj["median_error_y_pct"]});
        ev.stage1_empty_count = bj.value("stage1_empty_count", 0);
      }
      sr.splits[split] = std::move(ev);
    }
    result.per_seed.push_back(std::move(sr));
  }
  if (result.per_seed.empty()) throw EmptyResults("no seed results under " + out_dir);
  return result;
}

}  // namespace fairseg
