#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>

#include "fairseg/metrics.hpp"
#include "fairseg/trainer.hpp"

using namespace fairseg;

namespace {

// Small, fast phantom cohort for trainer tests (64x64 images).
PhantomParams small_params() {
  PhantomParams p;
  p.image_size = 64;
  p.heart_radius_range = {8.0, 10.0};
  p.myocardium_thickness_range = {3.5, 4.0};
  p.rv.radius_px = {5.0, 6.0};
  p.center_jitter_px = 2.0;
  GroupSignal a;
  a.rim_thickness_px = {2.0, 3.0};
  GroupSignal b = a;
  b.background_offset = 0.10;
  p.group_signals = {{"A", a}, {"B", b}};
  return p;
}

std::vector<LabeledSubject> small_cohort(int n_a, int n_b, uint64_t seed) {
  auto p = small_params();
  std::vector<LabeledSubject> out;
  for (int i = 0; i < n_a; ++i) {
    auto s = generate_subject(derive_seed(seed, 1, i), "A", p);
    s.subject_id = "A" + std::to_string(i);
    out.push_back(std::move(s));
  }
  for (int i = 0; i < n_b; ++i) {
    auto s = generate_subject(derive_seed(seed, 2, i), "B", p);
    s.subject_id = "B" + std::to_string(i);
    out.push_back(std::move(s));
  }
  return out;
}

ModelConfig small_model() {
  ModelConfig cfg;
  cfg.widths = {8, 16, 32};
  return cfg;
}

double mean_train_dsc(const UNet<float>& model, const std::vector<LabeledSubject>& subjects) {
  double sum = 0.0;
  int n = 0;
  for (const auto& s : subjects)
    for (int f = 0; f < 2; ++f) {
      LabelMap pred = predict_full(model, s.frames[f]);
      for (uint8_t lab : {kLVBP, kLVM, kRVBP}) {
        sum += dice(pred, s.masks[f], lab);
        ++n;
      }
    }
  return sum / n;
}

}  // namespace

TEST_CASE("training is deterministic: identical seeds give identical loss trajectories") {
  auto subjects = small_cohort(3, 1, 7);
  TrainConfig cfg;
  cfg.iterations = 8;
  cfg.batch_size = 2;
  cfg.seed = 5;
  cfg.strategy = parse_strategy("baseline");
  auto r1 = train(subjects, small_model(), cfg);
  auto r2 = train(subjects, small_model(), cfg);
  REQUIRE(r1.log.total_loss == r2.log.total_loss);
  REQUIRE(r1.model.flat_params() == r2.model.flat_params());
  REQUIRE(r1.log.total_loss.size() == 8);
  REQUIRE(r1.log.group_mean_loss.size() == 8);

  TrainConfig other = cfg;
  other.seed = 6;
  auto r3 = train(subjects, small_model(), other);
  REQUIRE_FALSE(r3.log.total_loss == r1.log.total_loss);
}

TEST_CASE("overfit smoke test: 4 subjects, 200 iterations, mean train DSC >= 0.90") {
  auto subjects = small_cohort(2, 2, 11);
  TrainConfig cfg;
  cfg.iterations = 200;
  cfg.batch_size = 4;
  cfg.seed = 1;
  cfg.augment = false;
  cfg.strategy = parse_strategy("baseline");
  auto res = train(subjects, small_model(), cfg);
  REQUIRE(mean_train_dsc(res.model, subjects) >= 0.90);

  // loss monotone trend: median of last 10% < median of first 10%
  const auto& L = res.log.total_loss;
  size_t k = L.size() / 10;
  std::vector<double> first(L.begin(), L.begin() + k), last(L.end() - k, L.end());
  REQUIRE(median(last) < median(first));

  // prediction on a training image beats the smoke threshold (mean over structures)
  LabelMap pred = predict_full(res.model, subjects[0].frames[0]);
  double d = (dice(pred, subjects[0].masks[0], kLVBP) + dice(pred, subjects[0].masks[0], kLVM) +
              dice(pred, subjects[0].masks[0], kRVBP)) /
             3.0;
  REQUIRE(d >= 0.85);
}

TEST_CASE("oversample strategy: 100 batches of 8 from {A:50, B:2} sample 400/400 subjects") {
  auto subjects = small_cohort(50, 2, 23);
  TrainConfig cfg;
  cfg.iterations = 100;
  cfg.batch_size = 8;
  cfg.seed = 2;
  cfg.augment = false;
  cfg.strategy = parse_strategy("oversample");
  ModelConfig tiny;
  tiny.widths = {2, 2};
  auto res = train(subjects, tiny, cfg);
  REQUIRE(res.log.sampled_counts.at("A") == 400);
  REQUIRE(res.log.sampled_counts.at("B") == 400);
}

TEST_CASE("gt_crop training derives the crop from training masks") {
  auto subjects = small_cohort(3, 1, 31);
  TrainConfig cfg;
  cfg.iterations = 4;
  cfg.batch_size = 2;
  cfg.seed = 3;
  cfg.cropping_mode = "gt_crop";
  cfg.crop_iterations = 4;
  cfg.strategy = parse_strategy("baseline");
  ModelConfig tiny;
  tiny.widths = {2, 2};
  auto res = train(subjects, tiny, cfg);
  REQUIRE(res.crop.has_value());
  std::vector<const LabelMap*> masks;
  for (const auto& s : subjects)
    for (int f = 0; f < 2; ++f) masks.push_back(&s.masks[f]);
  auto expect = training_crop_size(masks, cfg.crop_buffer_px);
  REQUIRE(res.crop->crop_height == expect.crop_height);
  REQUIRE(res.crop->crop_width == expect.crop_width);
  // model accepts crop-sized inputs
  auto box = mask_bounding_box(subjects[0].masks[0]);
  auto [crop_img, rec] = crop_around(subjects[0].frames[0], box, *res.crop);
  LabelMap pred = predict_full(res.model, crop_img);
  REQUIRE(pred.rows() == res.crop->crop_height);
  REQUIRE(pred.cols() == res.crop->crop_width);
}

TEST_CASE("train config validation") {
  auto subjects = small_cohort(2, 1, 41);
  TrainConfig cfg;
  cfg.iterations = 0;
  REQUIRE_THROWS_AS(train(subjects, small_model(), cfg), InvalidParams);
  cfg.iterations = 1;
  cfg.cropping_mode = "bogus";
  REQUIRE_THROWS_AS(cfg.validate(), InvalidParams);
  cfg.cropping_mode = "none";
  cfg.strategy.group_dro = true;
  cfg.strategy.base_loss = BaseLoss::ce_dice;
  REQUIRE_THROWS_AS(train(subjects, small_model(), cfg), ConfigConflict);
  REQUIRE_THROWS_AS(train({}, small_model(), TrainConfig{}), EmptyGroup);
}

TEST_CASE("checkpoint round-trip and corruption handling") {
  namespace fs = std::filesystem;
  auto subjects = small_cohort(2, 1, 51);
  TrainConfig cfg;
  cfg.iterations = 3;
  cfg.batch_size = 2;
  cfg.strategy = parse_strategy("baseline");
  ModelConfig tiny;
  tiny.widths = {2, 3};
  auto res = train(subjects, tiny, cfg);

  std::string dir = (fs::temp_directory_path() / "fairseg_ckpt_test").string();
  fs::remove_all(dir);
  save_checkpoint(dir, res.model, res.crop, {{"note", "test"}});

  auto ck = load_checkpoint(dir);
  REQUIRE(ck.metadata.at("code_version") == kCodeVersion);
  REQUIRE_FALSE(ck.crop.has_value());
  std::mt19937_64 rng(8);
  for (int t = 0; t < 10; ++t) {
    ImageF img(64, 64);
    for (auto& v : img.raw()) v = std::uniform_real_distribution<float>(0, 1)(rng);
    REQUIRE(predict_full(ck.model, img) == predict_full(res.model, img));
  }

  SECTION("num_classes mismatch is a corrupt checkpoint") {
    REQUIRE_THROWS_AS(load_checkpoint(dir, 5), CorruptCheckpoint);
  }

  SECTION("missing checkpoint directory") {
    REQUIRE_THROWS_AS(load_checkpoint(dir + "_nope"), MissingCheckpoint);
  }

  SECTION("crop-trained checkpoint without crop config is corrupt") {
    nlohmann::json meta = ck.metadata;
    meta["cropping_mode"] = "gt_crop";
    meta["crop"] = nullptr;
    std::ofstream(dir + "/metadata.json") << meta.dump(2);
    REQUIRE_THROWS_AS(load_checkpoint(dir), CorruptCheckpoint);
  }

  SECTION("truncated weights blob is corrupt") {
    save_checkpoint(dir, res.model, res.crop);  // restore metadata
    auto size = fs::file_size(dir + "/weights.bin");
    fs::resize_file(dir + "/weights.bin", size - 8);
    REQUIRE_THROWS_AS(load_checkpoint(dir), CorruptCheckpoint);
  }

  SECTION("bad magic is corrupt") {
    save_checkpoint(dir, res.model, res.crop);
    std::fstream f(dir + "/weights.bin", std::ios::in | std::ios::out | std::ios::binary);
    f.write("XXXX", 4);
    f.close();
    REQUIRE_THROWS_AS(load_checkpoint(dir), CorruptCheckpoint);
  }

  SECTION("crop config round-trips through the checkpoint") {
    TrainConfig ccfg = cfg;
    ccfg.cropping_mode = "gt_crop";
    ccfg.crop_iterations = 3;
    auto cres = train(subjects, tiny, ccfg);
    save_checkpoint(dir, cres.model, cres.crop, {{"cropping_mode", "gt_crop"}});
    auto ck2 = load_checkpoint(dir);
    REQUIRE(ck2.crop.has_value());
    REQUIRE(ck2.crop->crop_height == cres.crop->crop_height);
    REQUIRE(ck2.crop->crop_width == cres.crop->crop_width);
    REQUIRE(ck2.crop->buffer_px == cres.crop->buffer_px);
  }
  fs::remove_all(dir);
}
