#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fairseg/losses.hpp"
#include "fairseg/mitigation.hpp"
#include "fairseg/model.hpp"

using namespace fairseg;

namespace {

ModelConfig tiny_config() {
  ModelConfig cfg;
  cfg.input_rows = 8;
  cfg.input_cols = 8;
  cfg.widths = {2, 3};
  cfg.seed = 5;
  return cfg;
}

Grid<double> random_image(int h, int w, uint64_t seed) {
  Grid<double> img(h, w);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  for (auto& v : img.raw()) v = u(rng);
  return img;
}

LabelMap random_mask(int h, int w, uint64_t seed) {
  LabelMap m(h, w, 0);
  std::mt19937_64 rng(seed);
  for (auto& v : m.raw()) v = std::uniform_int_distribution<int>(0, 3)(rng);
  return m;
}

}  // namespace

TEST_CASE("model config validation") {
  ModelConfig bad = tiny_config();
  bad.input_rows = 7;  // not divisible by 2^depth through validate()
  REQUIRE_THROWS_AS(bad.validate(), InvalidParams);
  bad = tiny_config();
  bad.widths = {4};
  REQUIRE_THROWS_AS(bad.validate(), InvalidParams);
  bad = tiny_config();
  bad.num_classes = 1;
  REQUIRE_THROWS_AS(bad.validate(), InvalidParams);
}

TEST_CASE("forward output matches input dims, including non-aligned crops") {
  UNet<double> net(tiny_config());
  REQUIRE(net.param_count() <= 500);  // tiny model used for gradient checks

  for (auto [h, w] : {std::pair{8, 8}, std::pair{11, 9}, std::pair{31, 21}}) {
    UNet<double>::Cache cache;
    auto img = random_image(h, w, 100 + h);
    auto logits = net.forward(img, cache);
    REQUIRE(logits.ch == 4);
    REQUIRE(logits.rows == h);
    REQUIRE(logits.cols == w);
    LabelMap pred = predict(net, img);
    REQUIRE(pred.rows() == h);
    REQUIRE(pred.cols() == w);
    for (uint8_t v : pred.raw()) REQUIRE(v <= 3);
    // determinism
    REQUIRE(predict(net, img) == pred);
  }
}

TEST_CASE("flat parameter round-trip") {
  UNet<double> net(tiny_config());
  auto flat = net.flat_params();
  UNet<double> other(tiny_config());
  other.set_flat_params(flat);
  auto img = random_image(8, 8, 3);
  REQUIRE(predict(net, img) == predict(other, img));
  flat.pop_back();
  REQUIRE_THROWS_AS(other.set_flat_params(flat), CorruptCheckpoint);
}

// Gradient check for the full composed pipeline: two samples in different
// groups, per-sample segmentation losses combined via loss_coefficients,
// analytic parameter gradients vs central finite differences.
TEST_CASE("composed loss gradients match finite differences (rel 1e-4)") {
  const int H = 8, W = 8;
  auto img_a = random_image(H, W, 11);
  auto img_b = random_image(H, W, 12);
  auto mask_a = random_mask(H, W, 13);
  auto mask_b = random_mask(H, W, 14);
  const std::vector<std::string> groups = {"A", "B"};
  GroupWeighting weighting = compute_group_weights({{"A", 9.0}, {"B", 1.0}});

  struct Scenario {
    const char* strategy;
    BaseLoss loss;
  };
  const Scenario scenarios[] = {{"baseline", BaseLoss::ce},
                                {"baseline", BaseLoss::ce_dice},
                                {"reweigh", BaseLoss::ce_dice},
                                {"group_dro", BaseLoss::ce}};

  for (const auto& sc : scenarios) {
    INFO("strategy=" << sc.strategy << " loss=" << base_loss_name(sc.loss));
    UNet<double> net(tiny_config());
    TrainingStrategy strat = parse_strategy(sc.strategy);
    strat.base_loss = sc.loss;

    auto composed = [&](UNet<double>& model, UNet<double>::Grads* grads) {
      UNet<double>::Cache ca, cb;
      auto la = model.forward(img_a, ca);
      auto lb = model.forward(img_b, cb);
      auto ra = segmentation_loss_grad(la, mask_a, sc.loss);
      auto rb = segmentation_loss_grad(lb, mask_b, sc.loss);
      std::vector<double> losses = {ra.value, rb.value};
      auto coeff =
          loss_coefficients(losses, groups, strat, strat.reweigh ? &weighting : nullptr);
      if (grads) {
        grads->reset(model);
        for (int s = 0; s < 2; ++s) {
          if (coeff[s] == 0.0) continue;
          auto& res = s == 0 ? ra : rb;
          auto& cache = s == 0 ? ca : cb;
          for (auto& v : res.dlogits.data) v *= coeff[s];
          model.backward(res.dlogits, cache, *grads);
        }
      }
      return coeff[0] * losses[0] + coeff[1] * losses[1];
    };

    if (strat.group_dro) {
      // ensure the argmax group is unique at the evaluation point
      UNet<double>::Cache ca, cb;
      auto la = net.forward(img_a, ca);
      auto lb = net.forward(img_b, cb);
      double va = segmentation_loss(la, mask_a, sc.loss);
      double vb = segmentation_loss(lb, mask_b, sc.loss);
      REQUIRE(std::abs(va - vb) > 1e-6);
    }

    UNet<double>::Grads grads;
    composed(net, &grads);
    std::vector<double> g = grads.flat();
    std::vector<double> params = net.flat_params();
    REQUIRE(g.size() == params.size());

    std::mt19937_64 pick_rng(42);
    const double h = 1e-5;
    int checked = 0;
    double max_rel = 0.0;
    for (size_t trial = 0; trial < 40; ++trial) {
      size_t i = std::uniform_int_distribution<size_t>(0, params.size() - 1)(pick_rng);
      auto p = params;
      p[i] += h;
      net.set_flat_params(p);
      double fp = composed(net, nullptr);
      p[i] -= 2 * h;
      net.set_flat_params(p);
      double fm = composed(net, nullptr);
      net.set_flat_params(params);
      double fd = (fp - fm) / (2 * h);
      double denom = std::max({std::abs(fd), std::abs(g[i]), 1e-4});
      max_rel = std::max(max_rel, std::abs(fd - g[i]) / denom);
      ++checked;
    }
    REQUIRE(checked == 40);
    REQUIRE(max_rel < 1e-4);
  }
}
