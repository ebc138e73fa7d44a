#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fairseg/metrics.hpp"
#include "oracles.hpp"

using namespace fairseg;

TEST_CASE("dice hand examples") {
  LabelMap a(2, 2, 1), b(2, 2, 1);
  REQUIRE(dice(a, b, 1) == 1.0);

  LabelMap c(2, 2, 0), d(2, 2, 0);
  c(0, 0) = 1;
  d(1, 1) = 1;
  REQUIRE(dice(c, d, 1) == 0.0);

  // both-empty convention
  REQUIRE(dice(c, d, 2) == 1.0);

  // 2x2 masks sharing exactly 2 of 4 pixels each -> 2*2/(4+4) ... use 3x3
  LabelMap e(3, 3, 0), f(3, 3, 0);
  e(0, 0) = e(0, 1) = e(1, 0) = e(1, 1) = 1;  // 4 pixels
  f(1, 0) = f(1, 1) = f(2, 0) = f(2, 1) = 1;  // 4 pixels, overlap 2
  REQUIRE(dice(e, f, 1) == Catch::Approx(0.5).margin(1e-15));

  LabelMap wrong(2, 3, 0);
  REQUIRE_THROWS_AS(dice(a, wrong, 1), ShapeMismatch);
}

TEST_CASE("hausdorff hand examples") {
  LabelMap a(8, 8, 0), b(8, 8, 0);
  a(0, 0) = 1;
  b(3, 4) = 1;
  auto h1 = hausdorff(a, b, 1, 1.0);
  REQUIRE(h1);
  REQUIRE(*h1 == Catch::Approx(5.0).margin(1e-12));
  auto h18 = hausdorff(a, b, 1, 1.8);
  REQUIRE(*h18 == Catch::Approx(9.0).margin(1e-12));

  auto same = hausdorff(a, a, 1, 1.8);
  REQUIRE(*same == 0.0);

  // missing when either set is empty
  REQUIRE_FALSE(hausdorff(a, b, 2, 1.0).has_value());
  LabelMap empty(8, 8, 0);
  REQUIRE_FALSE(hausdorff(a, empty, 1, 1.0).has_value());

  LabelMap wrong(8, 7, 0);
  REQUIRE_THROWS_AS(hausdorff(a, wrong, 1, 1.0), ShapeMismatch);
}

TEST_CASE("dice and hausdorff match brute-force oracles on 1000 random 16x16 pairs") {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 1000; ++t) {
    int H = std::uniform_int_distribution<int>(2, 16)(rng);
    int W = std::uniform_int_distribution<int>(2, 16)(rng);
    LabelMap a(H, W, 0), b(H, W, 0);
    double density = std::uniform_real_distribution<double>(0.0, 0.6)(rng);
    std::uniform_real_distribution<double> u(0, 1);
    for (auto& v : a.raw()) v = u(rng) < density ? std::uniform_int_distribution<int>(1, 3)(rng) : 0;
    for (auto& v : b.raw()) v = u(rng) < density ? std::uniform_int_distribution<int>(1, 3)(rng) : 0;
    double spacing = std::uniform_real_distribution<double>(0.5, 3.0)(rng);
    for (uint8_t lab : {uint8_t(1), uint8_t(2), uint8_t(3)}) {
      REQUIRE(dice(a, b, lab) == oracle::brute_dice(a, b, lab));
      REQUIRE(dice(a, b, lab) == dice(b, a, lab));  // symmetry
      auto got = hausdorff(a, b, lab, spacing);
      auto want = oracle::brute_hausdorff(a, b, lab, spacing);
      REQUIRE(got.has_value() == want.has_value());
      if (got) {
        REQUIRE(*got == Catch::Approx(*want).margin(1e-9));
        auto rev = hausdorff(b, a, lab, spacing);
        REQUIRE(*got == Catch::Approx(*rev).margin(1e-12));  // symmetry
        // linear spacing scaling
        auto scaled = hausdorff(a, b, lab, 2.0 * spacing);
        REQUIRE(*scaled == Catch::Approx(2.0 * *got).margin(1e-9));
      }
    }
  }
}

TEST_CASE("quantiles, median and IQR") {
  std::vector<double> v = {0.8, 0.9, 1.0};
  REQUIRE(median(v) == Catch::Approx(0.9).margin(1e-15));
  REQUIRE(quantile(v, 0.25) == Catch::Approx(0.85).margin(1e-15));
  REQUIRE(quantile(v, 0.75) == Catch::Approx(0.95).margin(1e-15));
  REQUIRE(iqr(v) == Catch::Approx(0.1).margin(1e-12));

  std::vector<double> single = {0.7};
  REQUIRE(median(single) == 0.7);
  REQUIRE(iqr(single) == 0.0);

  std::vector<double> flat = {0.5, 0.5, 0.5, 0.5};
  REQUIRE(median(flat) == 0.5);
  REQUIRE(iqr(flat) == 0.0);

  REQUIRE_THROWS_AS(quantile({}, 0.5), EmptyGroup);
}

TEST_CASE("fairness metrics: FG and SER from medians") {
  GroupSummary w, b;
  w.median_dsc = 0.896;
  b.median_dsc = 0.846;
  auto [fg, ser] = fairness_metrics(w, b);
  REQUIRE(fg == Catch::Approx(0.050).margin(1e-12));
  REQUIRE(ser == Catch::Approx(0.154 / 0.104).margin(1e-12));
  REQUIRE(ser == Catch::Approx(1.4808).margin(1e-3));
  REQUIRE(std::abs(ser - 1.486) < 0.01);  // paper value from unrounded medians

  GroupSummary eq = w;
  auto [fg0, ser0] = fairness_metrics(w, eq);
  REQUIRE(fg0 == 0.0);
  REQUIRE(ser0 == 1.0);

  // SER >= 1 regardless of which group is worse
  GroupSummary lo, hi;
  lo.median_dsc = 0.7;
  hi.median_dsc = 0.9;
  REQUIRE(fairness_metrics(lo, hi).second >= 1.0);
  REQUIRE(fairness_metrics(lo, hi).first < 0.0);  // sign convention

  GroupSummary p1, p2;
  p1.median_dsc = 1.0;
  p2.median_dsc = 1.0;
  REQUIRE_THROWS_AS(fairness_metrics(p1, p2), PerfectScores);
}

TEST_CASE("Mann-Whitney hand examples") {
  auto r1 = mann_whitney_u({1, 2, 3}, {4, 5, 6});
  REQUIRE(r1.u == 0.0);
  REQUIRE(r1.method == "exact");
  REQUIRE(r1.p_two_sided == Catch::Approx(0.1).margin(1e-12));

  auto r2 = mann_whitney_u({1, 3}, {2, 4});
  REQUIRE(r2.u == 1.0);
  REQUIRE(r2.p_two_sided == Catch::Approx(4.0 / 6.0).margin(1e-12));

  auto r3 = mann_whitney_u({1, 4}, {2, 3});
  REQUIRE(r3.u == 2.0);
  REQUIRE(r3.p_two_sided == Catch::Approx(1.0).margin(1e-12));

  REQUIRE_THROWS_AS(mann_whitney_u({}, {1.0}), EmptySample);
}

TEST_CASE("Mann-Whitney exact p matches full enumeration for tie-free n1,n2 <= 7") {
  std::mt19937_64 rng(55);
  for (int n1 = 1; n1 <= 7; ++n1)
    for (int n2 = 1; n2 <= 7; ++n2)
      for (int rep = 0; rep < 5; ++rep) {
        // tie-free sample: a random permutation of distinct values
        std::vector<double> pool(n1 + n2);
        for (int i = 0; i < n1 + n2; ++i) pool[i] = i + 1;
        std::shuffle(pool.begin(), pool.end(), rng);
        std::vector<double> a(pool.begin(), pool.begin() + n1);
        std::vector<double> b(pool.begin() + n1, pool.end());
        auto got = mann_whitney_u(a, b);
        auto [u_want, p_want] = oracle::enum_mwu(a, b);
        REQUIRE(got.method == "exact");
        REQUIRE(got.u == Catch::Approx(u_want).margin(1e-12));
        REQUIRE(got.p_two_sided == Catch::Approx(p_want).margin(1e-12));
        REQUIRE(got.u >= 0.0);
        REQUIRE(got.u <= double(n1) * n2);
      }
}

TEST_CASE("Mann-Whitney normal approximation agrees with exact within 0.02 at n1=n2=8") {
  std::mt19937_64 rng(99);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> pool(16);
    for (int i = 0; i < 16; ++i) pool[i] = i + 1;
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<double> a(pool.begin(), pool.begin() + 8);
    std::vector<double> b(pool.begin() + 8, pool.end());
    auto info = detail::rank_u(a, b);
    double u_min = std::min(info.u1, info.u2);
    double p_exact = mann_whitney_exact_p(8, 8, u_min);
    double p_norm = mann_whitney_normal_p(8, 8, u_min, 0.0);
    REQUIRE(std::abs(p_exact - p_norm) < 0.02);
  }
}

TEST_CASE("Mann-Whitney ties: U halves and tie-corrected normal path") {
  std::vector<double> a = {1, 2, 2, 5};
  std::vector<double> b = {2, 3, 4, 6};
  auto info = detail::rank_u(a, b);
  REQUIRE(info.has_ties);
  REQUIRE(info.u1 + info.u2 == Catch::Approx(16.0).margin(1e-12));
  auto res = mann_whitney_u(a, b);
  REQUIRE(res.method == "normal-approx");
  REQUIRE(res.p_two_sided > 0.0);
  REQUIRE(res.p_two_sided <= 1.0);
}

TEST_CASE("group summaries and subject aggregation") {
  std::vector<SubjectScore> scores;
  for (double d : {0.8, 0.9, 1.0}) {
    SubjectScore s;
    s.group = "A";
    StructureScore st;
    st.dsc = d;
    st.hd_mm = 2.0 * d;
    s.structures = {st};
    s.finalize();
    scores.push_back(s);
  }
  auto g = summarize_group(scores);
  REQUIRE(g.n == 3);
  REQUIRE(g.median_dsc == Catch::Approx(0.9).margin(1e-15));
  REQUIRE(g.iqr_dsc == Catch::Approx(0.1).margin(1e-12));
  REQUIRE(g.median_hd);
  REQUIRE(*g.median_hd == Catch::Approx(1.8).margin(1e-12));
  REQUIRE_THROWS_AS(summarize_group({}), EmptyGroup);

  // overall = unweighted mean over structures; HD skips missing entries
  SubjectScore s;
  s.group = "B";
  StructureScore s1, s2;
  s1.dsc = 0.5;
  s1.hd_mm = 4.0;
  s2.dsc = 1.0;  // hd missing
  s.structures = {s1, s2};
  s.finalize();
  REQUIRE(s.overall_dsc == Catch::Approx(0.75).margin(1e-15));
  REQUIRE(s.overall_hd);
  REQUIRE(*s.overall_hd == Catch::Approx(4.0).margin(1e-15));
}

TEST_CASE("score_subject computes 3 structures x frames") {
  LabelMap gt(16, 16, 0);
  for (int r = 2; r < 8; ++r)
    for (int c = 2; c < 8; ++c) gt(r, c) = 1 + (r % 3);
  LabelMap pred = gt;
  auto s = score_subject("x", "A", {&pred, &pred}, {&gt, &gt}, 1.8);
  REQUIRE(s.structures.size() == 6);
  REQUIRE(s.overall_dsc == 1.0);
  REQUIRE(s.overall_hd);
  REQUIRE(*s.overall_hd == 0.0);
  REQUIRE_THROWS_AS(score_subject("x", "A", {&pred}, {&gt, &gt}, 1.8), ShapeMismatch);
}

TEST_CASE("make_fairness_report end to end") {
  std::vector<SubjectScore> scores;
  auto add = [&](const std::string& g, double d) {
    SubjectScore s;
    s.group = g;
    StructureScore st;
    st.dsc = d;
    s.structures = {st};
    s.finalize();
    scores.push_back(s);
  };
  for (double d : {0.9, 0.92, 0.88}) add("A", d);
  for (double d : {0.7, 0.72, 0.68}) add("B", d);
  auto rep = make_fairness_report(scores, "A", "B");
  REQUIRE(rep.majority.group == "A");
  REQUIRE(rep.fairness_gap == Catch::Approx(0.2).margin(1e-12));
  REQUIRE(rep.ser == Catch::Approx(0.3 / 0.1).margin(1e-9));
  REQUIRE(rep.mann_whitney.p_two_sided == Catch::Approx(0.1).margin(1e-12));
}
