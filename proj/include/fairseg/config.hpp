#pragma once
// JSON config schemas for dataset generation and experiments, with defaults
// matching the stock imbalanced-cohort study (200 A vs 8 B training
// subjects, 60/60 internal test, inverted 30/54 external test).

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairseg/common.hpp"
#include "fairseg/mitigation.hpp"
#include "fairseg/model.hpp"
#include "fairseg/phantom.hpp"
#include "fairseg/trainer.hpp"

namespace fairseg {

using nlohmann::json;

// ---- dataset spec ----

inline DatasetSpec default_dataset_spec() {
  DatasetSpec spec;
  spec.master_seed = 17;
  spec.majority_group = "A";
  spec.minority_group = "B";
  GroupSignal a;
  a.rim_thickness_px = {2.0, 3.0};
  a.background_offset = 0.0;
  a.texture_amplitude = 0.04;
  GroupSignal b;
  b.rim_thickness_px = {6.0, 9.0};
  b.background_offset = 0.12;
  b.texture_amplitude = 0.16;
  spec.phantom.group_signals = {{"A", a}, {"B", b}};
  spec.train.per_group = {{"A", 200}, {"B", 8}};
  spec.internal_test.per_group = {{"A", 60}, {"B", 60}};
  spec.external_test.per_group = {{"A", 30}, {"B", 54}};
  spec.external_shift = {1.12, 0.04, 0.02, 1.1, 0};
  return spec;
}

namespace detail {

inline Range range_from_json(const json& j, Range def) {
  if (j.is_null()) return def;
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

inline json range_to_json(const Range& r) { return json::array({r.lo, r.hi}); }

}  // namespace detail

inline json to_json(const DatasetSpec& s) {
  json groups = json::object();
  for (const auto& [g, sig] : s.phantom.group_signals)
    groups[g] = {{"rim_thickness_px", detail::range_to_json(sig.rim_thickness_px)},
                 {"background_offset", sig.background_offset},
                 {"texture_amplitude", sig.texture_amplitude}};
  auto counts = [](const SplitCounts& c) {
    json j = json::object();
    for (const auto& [g, n] : c.per_group) j[g] = n;
    return j;
  };
  return {
      {"master_seed", s.master_seed},
      {"majority_group", s.majority_group},
      {"minority_group", s.minority_group},
      {"phantom",
       {{"image_size", s.phantom.image_size},
        {"spacing_mm", s.phantom.spacing_mm},
        {"heart_radius_range", detail::range_to_json(s.phantom.heart_radius_range)},
        {"myocardium_thickness_range",
         detail::range_to_json(s.phantom.myocardium_thickness_range)},
        {"rv",
         {{"radius_px", detail::range_to_json(s.phantom.rv.radius_px)},
          {"center_gap_frac", s.phantom.rv.center_gap_frac}}},
        {"ed_es_contraction", s.phantom.ed_es_contraction},
        {"noise_sigma", s.phantom.noise_sigma},
        {"rim_gap_px", s.phantom.rim_gap_px},
        {"rim_intensity", s.phantom.rim_intensity},
        {"center_jitter_px", s.phantom.center_jitter_px},
        {"group_signals", groups}}},
      {"splits",
       {{"train", counts(s.train)},
        {"internal", counts(s.internal_test)},
        {"external", counts(s.external_test)}}},
      {"external_shift",
       {{"gain", s.external_shift.gain},
        {"bias", s.external_shift.bias},
        {"extra_noise_sigma", s.external_shift.extra_noise_sigma},
        {"spacing_scale", s.external_shift.spacing_scale}}}};
}

inline DatasetSpec dataset_spec_from_json(const json& j) {
  DatasetSpec s = default_dataset_spec();
  try {
    s.master_seed = j.value("master_seed", s.master_seed);
    s.majority_group = j.value("majority_group", s.majority_group);
    s.minority_group = j.value("minority_group", s.minority_group);
    if (j.contains("phantom")) {
      const json& p = j["phantom"];
      s.phantom.image_size = p.value("image_size", s.phantom.image_size);
      s.phantom.spacing_mm = p.value("spacing_mm", s.phantom.spacing_mm);
      s.phantom.heart_radius_range = detail::range_from_json(
          p.value("heart_radius_range", json()), s.phantom.heart_radius_range);
      s.phantom.myocardium_thickness_range = detail::range_from_json(
          p.value("myocardium_thickness_range", json()), s.phantom.myocardium_thickness_range);
      if (p.contains("rv")) {
        s.phantom.rv.radius_px =
            detail::range_from_json(p["rv"].value("radius_px", json()), s.phantom.rv.radius_px);
        s.phantom.rv.center_gap_frac =
            p["rv"].value("center_gap_frac", s.phantom.rv.center_gap_frac);
      }
      s.phantom.ed_es_contraction = p.value("ed_es_contraction", s.phantom.ed_es_contraction);
      s.phantom.noise_sigma = p.value("noise_sigma", s.phantom.noise_sigma);
      s.phantom.rim_gap_px = p.value("rim_gap_px", s.phantom.rim_gap_px);
      s.phantom.rim_intensity = p.value("rim_intensity", s.phantom.rim_intensity);
      s.phantom.center_jitter_px = p.value("center_jitter_px", s.phantom.center_jitter_px);
      if (p.contains("group_signals")) {
        s.phantom.group_signals.clear();
        for (const auto& [g, sj] : p["group_signals"].items()) {
          GroupSignal sig;
          sig.rim_thickness_px =
              detail::range_from_json(sj.value("rim_thickness_px", json()), sig.rim_thickness_px);
          sig.background_offset = sj.value("background_offset", sig.background_offset);
          sig.texture_amplitude = sj.value("texture_amplitude", sig.texture_amplitude);
          s.phantom.group_signals[g] = sig;
        }
      }
    }
    if (j.contains("splits")) {
      auto read_counts = [&](const char* name, SplitCounts& out) {
        if (!j["splits"].contains(name)) return;
        out.per_group.clear();
        for (const auto& [g, n] : j["splits"][name].items()) out.per_group[g] = n.get<int>();
      };
      read_counts("train", s.train);
      read_counts("internal", s.internal_test);
      read_counts("external", s.external_test);
    }
    if (j.contains("external_shift")) {
      const json& e = j["external_shift"];
      s.external_shift.gain = e.value("gain", s.external_shift.gain);
      s.external_shift.bias = e.value("bias", s.external_shift.bias);
      s.external_shift.extra_noise_sigma =
          e.value("extra_noise_sigma", s.external_shift.extra_noise_sigma);
      s.external_shift.spacing_scale = e.value("spacing_scale", s.external_shift.spacing_scale);
    }
  } catch (const json::exception& e) {
    throw InvalidSpec(std::string("bad dataset spec: ") + e.what());
  }
  s.validate();
  return s;
}

// ---- experiment config ----

struct ExperimentConfig {
  std::string name = "baseline";
  std::string strategy = "baseline";
  std::string cropping = "none";  // none | gt_crop | cascaded
  std::vector<uint64_t> seeds = {1, 2, 3};
  TrainConfig train;
  ModelConfig model;
  bool external_ed_only = true;

  void validate() const {
    if (seeds.empty()) throw InvalidSpec("seeds must be nonempty");
    if (cropping != "none" && cropping != "gt_crop" && cropping != "cascaded")
      throw InvalidSpec("unknown cropping mode: " + cropping);
    parse_strategy(strategy);
  }
};

inline json to_json(const ExperimentConfig& c) {
  return {{"name", c.name},
          {"strategy", c.strategy},
          {"cropping", c.cropping},
          {"seeds", c.seeds},
          {"train",
           {{"batch_size", c.train.batch_size},
            {"iterations", c.train.iterations},
            {"crop_iterations", c.train.crop_iterations},
            {"learning_rate", c.train.learning_rate},
            {"momentum", c.train.momentum},
            {"poly_power", c.train.poly_power},
            {"augment", c.train.augment},
            {"max_rotation_deg", c.train.max_rotation_deg},
            {"oversample_level", c.train.oversample_level},
            {"crop_buffer_px", c.train.crop_buffer_px},
            {"crop_jitter_px", c.train.crop_jitter_px}}},
          {"model", {{"widths", c.model.widths}, {"num_classes", c.model.num_classes}}},
          {"external_ed_only", c.external_ed_only}};
}

inline ExperimentConfig experiment_config_from_json(const json& j) {
  ExperimentConfig c;
  try {
    c.name = j.value("name", j.value("strategy", c.name));
    c.strategy = j.value("strategy", c.strategy);
    c.cropping = j.value("cropping", c.cropping);
    if (j.contains("seeds")) c.seeds = j["seeds"].get<std::vector<uint64_t>>();
    if (j.contains("train")) {
      const json& t = j["train"];
      c.train.batch_size = t.value("batch_size", c.train.batch_size);
      c.train.iterations = t.value("iterations", c.train.iterations);
      c.train.crop_iterations = t.value("crop_iterations", c.train.crop_iterations);
      c.train.learning_rate = t.value("learning_rate", c.train.learning_rate);
      c.train.momentum = t.value("momentum", c.train.momentum);
      c.train.poly_power = t.value("poly_power", c.train.poly_power);
      c.train.augment = t.value("augment", c.train.augment);
      c.train.max_rotation_deg = t.value("max_rotation_deg", c.train.max_rotation_deg);
      c.train.oversample_level = t.value("oversample_level", c.train.oversample_level);
      c.train.crop_buffer_px = t.value("crop_buffer_px", c.train.crop_buffer_px);
      c.train.crop_jitter_px = t.value("crop_jitter_px", c.train.crop_jitter_px);
    }
    if (j.contains("model")) {
      if (j["model"].contains("widths"))
        c.model.widths = j["model"]["widths"].get<std::vector<int>>();
      c.model.num_classes = j["model"].value("num_classes", c.model.num_classes);
    }
    c.external_ed_only = j.value("external_ed_only", c.external_ed_only);
  } catch (const json::exception& e) {
    throw InvalidSpec(std::string("bad experiment config: ") + e.what());
  }
  c.train.strategy = parse_strategy(c.strategy);
  c.validate();
  return c;
}

// Digest is a pure function of config content (no paths, no timestamps).
inline std::string config_digest(const ExperimentConfig& c) {
  return hex64(fnv1a(to_json(c).dump()));
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidSpec(std::string("bad JSON in ") + path + ": " + e.what());
  }
  return j;
}

}  // namespace fairseg
