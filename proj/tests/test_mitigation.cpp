#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fairseg/mitigation.hpp"
#include "oracles.hpp"

using namespace fairseg;

TEST_CASE("group weights: severely imbalanced cohort counts") {
  const double eps = 1e-6;
  auto w = compute_group_weights({{"W", 4221.0}, {"B", 15.0}}, eps);
  double sum = 0.0;
  for (double v : w.normalized_weights) sum += v;
  REQUIRE(std::abs(sum - 1.0) < 1e-12);
  REQUIRE(std::abs(w.normalized("B") / w.normalized("W") - (4221.0 + eps) / (15.0 + eps)) <
          1e-9);
  REQUIRE(w.normalized("B") == Catch::Approx(0.996459).margin(1e-6));
  REQUIRE(w.normalized("W") == Catch::Approx(0.003541).margin(1e-6));
  // raw weights follow the defining formula
  REQUIRE(w.total == Catch::Approx(4236.0));
  for (size_t i = 0; i < w.group_ids.size(); ++i)
    REQUIRE(w.raw_weights[i] == Catch::Approx(w.total / (w.counts[i] + eps)));
}

TEST_CASE("group weights: symmetric and small hand cases") {
  auto eq = compute_group_weights({{"A", 10.0}, {"B", 10.0}});
  REQUIRE(eq.normalized("A") == Catch::Approx(0.5).margin(1e-9));
  REQUIRE(eq.normalized("B") == Catch::Approx(0.5).margin(1e-9));

  auto w = compute_group_weights({{"A", 1.0}, {"B", 3.0}});
  REQUIRE(w.normalized("A") == Catch::Approx(0.75).margin(1e-6));
  REQUIRE(w.normalized("B") == Catch::Approx(0.25).margin(1e-6));
}

TEST_CASE("group weights: error cases") {
  REQUIRE_THROWS_AS(compute_group_weights({}), EmptyGrouping);
  REQUIRE_THROWS_AS(compute_group_weights({{"A", 0.0}, {"B", 0.0}}), AllZeroCounts);
  REQUIRE_THROWS_AS(compute_group_weights({{"A", -1.0}}), InvalidParams);
  REQUIRE_THROWS_AS(compute_group_weights({{"A", 1.0}}, 0.0), InvalidParams);
  auto w = compute_group_weights({{"A", 1.0}});
  REQUIRE_THROWS_AS(w.normalized("Z"), UnknownGroup);
}

TEST_CASE("balanced sampler: forced splits") {
  std::mt19937_64 rng(1);

  SECTION("{A:7, B:1}, batch 8 -> 4/4 with the single B repeated") {
    std::map<std::string, std::vector<int>> groups = {{"A", {0, 1, 2, 3, 4, 5, 6}},
                                                      {"B", {7}}};
    auto plan = balanced_batch_indices(groups, 8, rng);
    REQUIRE(plan.indices.size() == 8);
    int na = 0, nb = 0;
    for (size_t i = 0; i < plan.indices.size(); ++i) {
      if (plan.group_of[i] == "A") ++na;
      else {
        ++nb;
        REQUIRE(plan.indices[i] == 7);
      }
    }
    REQUIRE(na == 4);
    REQUIRE(nb == 4);
  }

  SECTION("{A:5, B:5}, batch 10 -> 5/5") {
    std::map<std::string, std::vector<int>> groups = {{"A", {0, 1, 2, 3, 4}},
                                                      {"B", {5, 6, 7, 8, 9}}};
    auto plan = balanced_batch_indices(groups, 10, rng);
    int na = 0;
    for (const auto& g : plan.group_of) na += g == "A";
    REQUIRE(na == 5);
  }
}

TEST_CASE("balanced sampler: odd batch remainder rotates; 4 batches of 9 give 18/18") {
  std::map<std::string, std::vector<int>> groups = {{"A", {0, 1, 2}}, {"B", {3, 4}}};
  BalancedSampler sampler(groups);
  std::mt19937_64 rng(3);
  int na = 0, nb = 0;
  for (int k = 0; k < 4; ++k) {
    auto plan = sampler.next(9, rng);
    int a = 0, b = 0;
    for (const auto& g : plan.group_of) (g == "A" ? a : b)++;
    REQUIRE(std::abs(a - b) == 1);  // per-batch counts differ by at most 1
    na += a;
    nb += b;
  }
  REQUIRE(na == 18);
  REQUIRE(nb == 18);
}

TEST_CASE("balanced sampler: determinism and errors") {
  std::map<std::string, std::vector<int>> groups = {{"A", {0, 1, 2}}, {"B", {3}}};
  std::mt19937_64 r1(9), r2(9);
  BalancedSampler s1(groups), s2(groups);
  for (int k = 0; k < 5; ++k) {
    auto p1 = s1.next(6, r1), p2 = s2.next(6, r2);
    REQUIRE(p1.indices == p2.indices);
    REQUIRE(p1.group_of == p2.group_of);
  }
  REQUIRE_THROWS_AS(BalancedSampler({{"A", {0}}, {"B", {}}}), EmptyGroup);
  std::mt19937_64 rng(0);
  REQUIRE_THROWS_AS(s1.next(1, rng), InvalidParams);
}

TEST_CASE("balanced sampler: divisible batch sizes give exact long-run balance") {
  std::map<std::string, std::vector<int>> groups = {
      {"A", {0, 1, 2, 3, 4, 5, 6, 7}}, {"B", {8}}, {"C", {9, 10}}};
  BalancedSampler sampler(groups);
  std::mt19937_64 rng(11);
  std::map<std::string, int> tally;
  const int K = 10, batch = 6;  // divisible by 3 groups
  for (int k = 0; k < K; ++k) {
    auto plan = sampler.next(batch, rng);
    for (const auto& g : plan.group_of) tally[g]++;
  }
  for (const auto& [g, n] : tally) REQUIRE(n == K * batch / 3);
}

TEST_CASE("reweighted loss hand examples") {
  GroupWeighting w;
  w.group_ids = {"A", "B"};
  w.counts = {3, 1};
  w.total = 4;
  w.raw_weights = {4.0 / 3.0, 4.0};
  w.normalized_weights = {0.25, 0.75};

  std::vector<double> losses = {1.0, 3.0};
  std::vector<std::string> groups = {"A", "B"};
  REQUIRE(reweighted_loss(losses, groups, w) == Catch::Approx(2.5).margin(1e-12));

  // equal weights reduce to the unweighted mean of group means
  GroupWeighting eq;
  eq.group_ids = {"A", "B"};
  eq.normalized_weights = {0.5, 0.5};
  std::vector<double> l2 = {1.0, 3.0, 4.0};
  std::vector<std::string> g2 = {"A", "A", "B"};  // group means 2 and 4
  REQUIRE(reweighted_loss(l2, g2, eq) == Catch::Approx(3.0).margin(1e-12));

  // single-group batch: plain mean of that group regardless of weights
  std::vector<double> l3 = {1.0, 2.0};
  std::vector<std::string> g3 = {"A", "A"};
  REQUIRE(reweighted_loss(l3, g3, w) == Catch::Approx(1.5).margin(1e-12));

  std::vector<std::string> bad = {"A", "Z"};
  REQUIRE_THROWS_AS(reweighted_loss(losses, bad, w), UnknownGroup);
}

TEST_CASE("group DRO loss hand examples") {
  std::vector<double> losses = {0.2, 0.4, 0.1};
  std::vector<std::string> groups = {"A", "A", "B"};
  REQUIRE(group_dro_loss(losses, groups) == Catch::Approx(0.3).margin(1e-12));

  std::vector<double> eq = {0.7, 0.7, 0.7};
  REQUIRE(group_dro_loss(eq, groups) == Catch::Approx(0.7).margin(1e-12));

  std::vector<double> single = {0.1, 0.5};
  std::vector<std::string> sg = {"A", "A"};
  REQUIRE(group_dro_loss(single, sg) == Catch::Approx(0.3).margin(1e-12));
}

TEST_CASE("group DRO matches max-of-group-means oracle on 1000 random batches") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> nsz(1, 12), ng(1, 4);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  const std::string names[] = {"A", "B", "C", "D"};
  for (int t = 0; t < 1000; ++t) {
    int n = nsz(rng), k = ng(rng);
    std::vector<double> losses(n);
    std::vector<std::string> groups(n);
    for (int i = 0; i < n; ++i) {
      losses[i] = u(rng);
      groups[i] = names[std::uniform_int_distribution<int>(0, k - 1)(rng)];
    }
    REQUIRE(group_dro_loss(losses, groups) ==
            Catch::Approx(oracle::max_group_mean(losses, groups)).margin(1e-12));
    // DRO dominance over the plain mean
    double mean = 0.0;
    for (double v : losses) mean += v;
    mean /= n;
    REQUIRE(group_dro_loss(losses, groups) >= mean - 1e-12);
  }
}

TEST_CASE("DRO gradient locality: non-argmax samples have zero coefficient") {
  std::vector<double> losses = {0.2, 0.4, 0.1};  // A mean 0.3 > B mean 0.1
  std::vector<std::string> groups = {"A", "A", "B"};
  TrainingStrategy s = parse_strategy("group_dro");
  auto coeff = loss_coefficients(losses, groups, s, nullptr);
  REQUIRE(coeff[2] == 0.0);
  // perturbing the B sample by less than the gap*n_g leaves the value unchanged
  double base = group_dro_loss(losses, groups);
  std::vector<double> pert = losses;
  pert[2] += 0.15;  // gap 0.2 * n_B 1 = 0.2 bound
  REQUIRE(group_dro_loss(pert, groups) == Catch::Approx(base).margin(1e-12));
}

TEST_CASE("strategy parsing and the CE constraint") {
  for (const char* name : {"baseline", "oversample", "reweigh", "group_dro",
                           "oversample+group_dro", "reweigh+group_dro", "oversample+reweigh"}) {
    auto s = parse_strategy(name);
    REQUIRE(s.name == name);
    if (s.group_dro) REQUIRE(s.base_loss == BaseLoss::ce);
  }
  REQUIRE_THROWS_AS(parse_strategy("nonsense"), InvalidParams);

  TrainingStrategy bad;
  bad.group_dro = true;
  bad.base_loss = BaseLoss::ce_dice;
  REQUIRE_THROWS_AS(bad.validate(), ConfigConflict);
}

TEST_CASE("loss coefficients reproduce every wrapped loss exactly") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  const std::string names[] = {"A", "B", "C"};
  GroupWeighting w = compute_group_weights({{"A", 50.0}, {"B", 3.0}, {"C", 10.0}});
  for (int t = 0; t < 300; ++t) {
    int n = std::uniform_int_distribution<int>(1, 10)(rng);
    std::vector<double> losses(n);
    std::vector<std::string> groups(n);
    for (int i = 0; i < n; ++i) {
      losses[i] = u(rng);
      groups[i] = names[std::uniform_int_distribution<int>(0, 2)(rng)];
    }
    auto total_with = [&](const TrainingStrategy& s) {
      auto c = loss_coefficients(losses, groups, s, s.reweigh ? &w : nullptr);
      double tot = 0.0;
      for (int i = 0; i < n; ++i) tot += c[i] * losses[i];
      return tot;
    };
    // plain: mean over samples
    double mean = 0.0;
    for (double v : losses) mean += v;
    mean /= n;
    REQUIRE(total_with(parse_strategy("baseline")) == Catch::Approx(mean).margin(1e-12));
    REQUIRE(total_with(parse_strategy("reweigh")) ==
            Catch::Approx(reweighted_loss(losses, groups, w)).margin(1e-12));
    REQUIRE(total_with(parse_strategy("group_dro")) ==
            Catch::Approx(group_dro_loss(losses, groups)).margin(1e-12));
    // reweigh+group_dro: max over groups of renormalized-weight * group mean
    auto gm = detail::group_means(losses, groups);
    double wsum = 0.0;
    for (const auto& g : gm.ids) wsum += w.normalized(g);
    double best = -1e300;
    for (size_t j = 0; j < gm.ids.size(); ++j)
      best = std::max(best, w.normalized(gm.ids[j]) / wsum * gm.means[j]);
    REQUIRE(total_with(parse_strategy("reweigh+group_dro")) ==
            Catch::Approx(best).margin(1e-12));
  }
}
