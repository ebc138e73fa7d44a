#pragma once
// Deterministic training loop composing the sampler, base loss and group
// loss wrapper, with optional ground-truth cropping of the training inputs.
// Optimizer is SGD with momentum and polynomial learning-rate decay.

#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairseg/common.hpp"
#include "fairseg/cropping.hpp"
#include "fairseg/losses.hpp"
#include "fairseg/mitigation.hpp"
#include "fairseg/model.hpp"
#include "fairseg/phantom.hpp"

namespace fairseg {

inline constexpr const char* kCodeVersion = "fairseg-1.0";

struct TrainConfig {
  int batch_size = 8;  // subjects per batch; both frames of each enter the batch
  int iterations = 300;
  // crop-model trainings are much cheaper per iteration, so the gt_crop mode
  // gets its own budget (jitter augmentation needs the extra steps)
  int crop_iterations = 600;
  double learning_rate = 0.05;
  double momentum = 0.9;
  double poly_power = 0.9;
  uint64_t seed = 0;
  TrainingStrategy strategy;
  std::string cropping_mode = "none";  // none | gt_crop
  int crop_buffer_px = 5;
  int crop_jitter_px = 5;  // random crop-window shift (gt_crop mode, augment only)
  bool augment = true;
  double max_rotation_deg = 10.0;
  double oversample_level = 1.0;  // fraction of full per-batch balance

  int effective_iterations() const {
    return cropping_mode == "gt_crop" ? crop_iterations : iterations;
  }

  void validate() const {
    if (iterations < 1 || crop_iterations < 1) throw InvalidParams("iterations must be >= 1");
    if (batch_size < 1) throw InvalidParams("batch_size must be >= 1");
    if (cropping_mode != "none" && cropping_mode != "gt_crop")
      throw InvalidParams("unknown cropping_mode: " + cropping_mode);
    strategy.validate();
  }
};

struct TrainLog {
  std::vector<double> total_loss;                       // per iteration
  std::vector<std::map<std::string, double>> group_mean_loss;
  std::map<std::string, long> sampled_counts;           // subject draws per group
  double wall_seconds = 0.0;
};

// ---- augmentation ----

namespace detail {

inline ImageF rotate_bilinear(const ImageF& img, double deg) {
  const double rad = deg * M_PI / 180.0;
  const double s = std::sin(rad), c = std::cos(rad);
  const double cy = (img.rows() - 1) / 2.0, cx = (img.cols() - 1) / 2.0;
  ImageF out(img.rows(), img.cols(), 0.0f);
  for (int r = 0; r < img.rows(); ++r)
    for (int w = 0; w < img.cols(); ++w) {
      double y = c * (r - cy) - s * (w - cx) + cy;
      double x = s * (r - cy) + c * (w - cx) + cx;
      int y0 = static_cast<int>(std::floor(y)), x0 = static_cast<int>(std::floor(x));
      if (y0 < 0 || x0 < 0 || y0 + 1 >= img.rows() || x0 + 1 >= img.cols()) continue;
      double fy = y - y0, fx = x - x0;
      out(r, w) = static_cast<float>(
          img(y0, x0) * (1 - fy) * (1 - fx) + img(y0, x0 + 1) * (1 - fy) * fx +
          img(y0 + 1, x0) * fy * (1 - fx) + img(y0 + 1, x0 + 1) * fy * fx);
    }
  return out;
}

inline LabelMap rotate_nearest(const LabelMap& m, double deg) {
  const double rad = deg * M_PI / 180.0;
  const double s = std::sin(rad), c = std::cos(rad);
  const double cy = (m.rows() - 1) / 2.0, cx = (m.cols() - 1) / 2.0;
  LabelMap out(m.rows(), m.cols(), kBackground);
  for (int r = 0; r < m.rows(); ++r)
    for (int w = 0; w < m.cols(); ++w) {
      int y = static_cast<int>(std::lround(c * (r - cy) - s * (w - cx) + cy));
      int x = static_cast<int>(std::lround(s * (r - cy) + c * (w - cx) + cx));
      if (y < 0 || x < 0 || y >= m.rows() || x >= m.cols()) continue;
      out(r, w) = m(y, x);
    }
  return out;
}

template <typename T>
inline void flip_h(Grid<T>& g) {
  for (int r = 0; r < g.rows(); ++r)
    for (int c = 0; c < g.cols() / 2; ++c) std::swap(g(r, c), g(r, g.cols() - 1 - c));
}

template <typename T>
inline void flip_v(Grid<T>& g) {
  for (int r = 0; r < g.rows() / 2; ++r)
    for (int c = 0; c < g.cols(); ++c) std::swap(g(r, c), g(g.rows() - 1 - r, c));
}

inline void augment_slice(ImageF& img, LabelMap& mask, double max_rot_deg,
                          std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double angle = std::uniform_real_distribution<double>(-max_rot_deg, max_rot_deg)(rng);
  bool hf = u01(rng) < 0.5, vf = u01(rng) < 0.5;
  if (angle != 0.0) {
    img = rotate_bilinear(img, angle);
    mask = rotate_nearest(mask, angle);
  }
  if (hf) {
    flip_h(img);
    flip_h(mask);
  }
  if (vf) {
    flip_v(img);
    flip_v(mask);
  }
}

inline std::map<std::string, double> group_mean_losses(
    const std::vector<double>& losses, const std::vector<std::string>& groups) {
  std::map<std::string, std::pair<double, int>> acc;
  for (size_t i = 0; i < losses.size(); ++i) {
    acc[groups[i]].first += losses[i];
    acc[groups[i]].second += 1;
  }
  std::map<std::string, double> out;
  for (const auto& [g, v] : acc) out[g] = v.first / v.second;
  return out;
}

}  // namespace detail

struct TrainResult {
  UNet<float> model;
  TrainLog log;
  std::optional<CropConfig> crop;  // set in gt_crop mode
};

inline TrainResult train(const std::vector<LabeledSubject>& subjects, ModelConfig model_cfg,
                         const TrainConfig& cfg) {
  cfg.validate();
  if (subjects.empty()) throw EmptyGroup("train split is empty");
  auto t0 = std::chrono::steady_clock::now();

  auto groups = group_indices(subjects);
  std::map<std::string, double> counts;
  for (const auto& [g, idx] : groups) counts[g] = static_cast<double>(idx.size());
  GroupWeighting weighting = compute_group_weights(counts);

  // training slices: (image, mask, group, subject index) per frame
  struct Slice { ImageF img; LabelMap mask; };
  std::vector<std::array<Slice, 2>> slices(subjects.size());
  std::vector<std::array<BoundingBox, 2>> boxes(subjects.size());
  std::optional<CropConfig> crop;
  if (cfg.cropping_mode == "gt_crop") {
    std::vector<const LabelMap*> masks;
    for (const auto& s : subjects)
      for (int f = 0; f < 2; ++f) masks.push_back(&s.masks[f]);
    crop = training_crop_size(masks, cfg.crop_buffer_px);
    // keep full-size slices; crops are taken per draw so the window can be
    // jittered, which trains the crop model to tolerate imperfect
    // localization at cascaded inference time
    for (size_t i = 0; i < subjects.size(); ++i)
      for (int f = 0; f < 2; ++f) {
        slices[i][f] = {subjects[i].frames[f], subjects[i].masks[f]};
        boxes[i][f] = mask_bounding_box(subjects[i].masks[f]);
      }
    model_cfg.input_rows = crop->crop_height;
    model_cfg.input_cols = crop->crop_width;
    // padded internally; keep the configured dims aligned for validate()
    int m = 1 << model_cfg.depth();
    model_cfg.input_rows = (model_cfg.input_rows + m - 1) / m * m;
    model_cfg.input_cols = (model_cfg.input_cols + m - 1) / m * m;
  } else {
    for (size_t i = 0; i < subjects.size(); ++i)
      for (int f = 0; f < 2; ++f)
        slices[i][f] = {subjects[i].frames[f], subjects[i].masks[f]};
    model_cfg.input_rows = subjects[0].frames[0].rows();
    model_cfg.input_cols = subjects[0].frames[0].cols();
  }

  UNet<float> model(model_cfg);
  std::vector<float> velocity(model.param_count(), 0.0f);

  std::optional<BalancedSampler> sampler;
  if (cfg.strategy.sampler == SamplerKind::oversample)
    sampler.emplace(groups, cfg.oversample_level);

  std::mt19937_64 rng(derive_seed(cfg.seed, 0x5452414e));
  std::uniform_int_distribution<size_t> pick_subject(0, subjects.size() - 1);

  TrainResult res{std::move(model), {}, crop};
  UNet<float>::Grads grads;
  std::vector<UNet<float>::Cache> caches(2 * cfg.batch_size);

  const int n_iters = cfg.effective_iterations();
  for (int it = 0; it < n_iters; ++it) {
    // draw subjects
    std::vector<int> subj_idx;
    std::vector<std::string> subj_group;
    if (sampler) {
      BatchPlan plan = sampler->next(cfg.batch_size, rng);
      subj_idx = plan.indices;
      subj_group = plan.group_of;
    } else {
      for (int k = 0; k < cfg.batch_size; ++k) {
        int i = static_cast<int>(pick_subject(rng));
        subj_idx.push_back(i);
        subj_group.push_back(subjects[i].group);
      }
    }
    for (const auto& g : subj_group) res.log.sampled_counts[g] += 1;

    // assemble and augment slices (both frames of each drawn subject)
    std::vector<ImageF> imgs;
    std::vector<LabelMap> masks;
    std::vector<std::string> slice_group;
    for (size_t k = 0; k < subj_idx.size(); ++k)
      for (int f = 0; f < 2; ++f) {
        ImageF img;
        LabelMap mask;
        if (crop) {
          BoundingBox box = boxes[subj_idx[k]][f];
          if (cfg.augment && cfg.crop_jitter_px > 0) {
            std::uniform_int_distribution<int> j(-cfg.crop_jitter_px, cfg.crop_jitter_px);
            int dr = j(rng), dc = j(rng);
            box.row_min += dr;
            box.row_max += dr;
            box.col_min += dc;
            box.col_max += dc;
          }
          img = crop_around(slices[subj_idx[k]][f].img, box, *crop).first;
          mask = crop_around(slices[subj_idx[k]][f].mask, box, *crop).first;
        } else {
          img = slices[subj_idx[k]][f].img;
          mask = slices[subj_idx[k]][f].mask;
        }
        if (cfg.augment) detail::augment_slice(img, mask, cfg.max_rotation_deg, rng);
        imgs.push_back(std::move(img));
        masks.push_back(std::move(mask));
        slice_group.push_back(subj_group[k]);
      }

    // forward + per-slice loss
    const size_t ns = imgs.size();
    std::vector<double> losses(ns);
    std::vector<LossResult<float>> lres(ns);
    for (size_t s = 0; s < ns; ++s) {
      auto logits = res.model.forward(imgs[s], caches[s]);
      lres[s] = segmentation_loss_grad(logits, masks[s], cfg.strategy.base_loss);
      losses[s] = lres[s].value;
    }
    std::vector<double> coeff = loss_coefficients(
        losses, slice_group, cfg.strategy, cfg.strategy.reweigh ? &weighting : nullptr);

    // backward, skipping zero-coefficient slices
    grads.reset(res.model);
    double total = 0.0;
    for (size_t s = 0; s < ns; ++s) {
      total += coeff[s] * losses[s];
      if (coeff[s] == 0.0) continue;
      auto dl = lres[s].dlogits;
      for (auto& v : dl.data) v *= static_cast<float>(coeff[s]);
      res.model.backward(dl, caches[s], grads);
    }

    // SGD with momentum, polynomial decay
    double lr = cfg.learning_rate *
                std::pow(1.0 - static_cast<double>(it) / n_iters, cfg.poly_power);
    std::vector<float> g = grads.flat();
    std::vector<float> p = res.model.flat_params();
    for (size_t i = 0; i < p.size(); ++i) {
      velocity[i] = static_cast<float>(cfg.momentum * velocity[i] - lr * g[i]);
      p[i] += velocity[i];
    }
    res.model.set_flat_params(p);

    res.log.total_loss.push_back(total);
    res.log.group_mean_loss.push_back(detail::group_mean_losses(losses, slice_group));
  }

  res.log.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

// ---- inference ----

inline LabelMap predict_full(const UNet<float>& model, const ImageF& image) {
  return predict(model, image);
}

// ---- checkpoints ----

namespace detail {

inline nlohmann::json model_config_json(const ModelConfig& c) {
  return {{"input_rows", c.input_rows}, {"input_cols", c.input_cols},
          {"num_classes", c.num_classes}, {"widths", c.widths},
          {"normalization", c.normalization}, {"seed", c.seed}};
}

inline ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.input_rows = j.at("input_rows");
  c.input_cols = j.at("input_cols");
  c.num_classes = j.at("num_classes");
  c.widths = j.at("widths").get<std::vector<int>>();
  c.normalization = j.at("normalization");
  c.seed = j.at("seed");
  return c;
}

}  // namespace detail

inline void save_checkpoint(const std::string& dir, const UNet<float>& model,
                            const std::optional<CropConfig>& crop,
                            nlohmann::json metadata = {}) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<float> flat = model.flat_params();
  std::ofstream w(dir + "/weights.bin", std::ios::binary);
  if (!w) throw IoError("cannot write weights in " + dir);
  const char magic[8] = {'F', 'S', 'E', 'G', '0', '0', '0', '1'};
  uint64_t count = flat.size();
  w.write(magic, 8);
  w.write(reinterpret_cast<const char*>(&count), sizeof(count));
  w.write(reinterpret_cast<const char*>(flat.data()), count * sizeof(float));

  metadata["code_version"] = kCodeVersion;
  metadata["model"] = detail::model_config_json(model.config());
  if (crop) {
    metadata["crop"] = {{"crop_height", crop->crop_height},
                        {"crop_width", crop->crop_width},
                        {"buffer_px", crop->buffer_px}};
  } else {
    metadata["crop"] = nullptr;
  }
  std::ofstream m(dir + "/metadata.json");
  m << metadata.dump(2) << "\n";
}

struct Checkpoint {
  UNet<float> model;
  std::optional<CropConfig> crop;
  nlohmann::json metadata;
};

inline Checkpoint load_checkpoint(const std::string& dir,
                                  int expected_num_classes = kNumClasses) {
  std::ifstream m(dir + "/metadata.json");
  if (!m) throw MissingCheckpoint("no metadata.json under " + dir);
  nlohmann::json metadata;
  try {
    m >> metadata;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptCheckpoint(std::string("bad metadata.json: ") + e.what());
  }
  Checkpoint ck;
  ck.metadata = metadata;
  ModelConfig cfg;
  try {
    cfg = detail::model_config_from_json(metadata.at("model"));
  } catch (const nlohmann::json::exception& e) {
    throw CorruptCheckpoint(std::string("bad model config: ") + e.what());
  }
  if (cfg.num_classes != expected_num_classes)
    throw CorruptCheckpoint("checkpoint num_classes does not match");
  if (metadata.contains("crop") && !metadata["crop"].is_null()) {
    CropConfig cc;
    cc.crop_height = metadata["crop"].at("crop_height");
    cc.crop_width = metadata["crop"].at("crop_width");
    cc.buffer_px = metadata["crop"].at("buffer_px");
    ck.crop = cc;
  }
  // a crop-trained model is unusable without its crop config
  if (metadata.value("cropping_mode", "none") == "gt_crop" && !ck.crop)
    throw CorruptCheckpoint("crop-trained checkpoint lacks its crop config");

  std::ifstream w(dir + "/weights.bin", std::ios::binary);
  if (!w) throw MissingCheckpoint("no weights.bin under " + dir);
  char magic[8];
  uint64_t count = 0;
  w.read(magic, 8);
  w.read(reinterpret_cast<char*>(&count), sizeof(count));
  if (!w || std::string(magic, 8) != "FSEG0001")
    throw CorruptCheckpoint("bad weights magic in " + dir);
  std::vector<float> flat(count);
  w.read(reinterpret_cast<char*>(flat.data()), count * sizeof(float));
  if (!w) throw CorruptCheckpoint("truncated weights in " + dir);
  ck.model = UNet<float>(cfg);
  if (ck.model.param_count() != count)
    throw CorruptCheckpoint("weight count does not match model config");
  ck.model.set_flat_params(flat);
  return ck;
}

}  // namespace fairseg
