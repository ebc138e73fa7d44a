#pragma once
// Segmentation quality metrics (Dice, Hausdorff distance in mm), per-group
// median/IQR summaries, fairness gap and skewed error ratio, and the
// two-sided Mann-Whitney U test (exact via the null U distribution for small
// tie-free samples, normal approximation with tie and continuity corrections
// otherwise).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fairseg/common.hpp"

namespace fairseg {

// 2|P∩G| / (|P|+|G|); 1.0 when both sets are empty.
inline double dice(const LabelMap& pred, const LabelMap& gt, uint8_t label) {
  if (!pred.same_shape(gt)) throw ShapeMismatch("pred and gt dims differ");
  long long inter = 0, np = 0, ng = 0;
  for (size_t i = 0; i < pred.size(); ++i) {
    bool p = pred.raw()[i] == label;
    bool g = gt.raw()[i] == label;
    np += p;
    ng += g;
    inter += (p && g);
  }
  if (np + ng == 0) return 1.0;
  return 2.0 * inter / static_cast<double>(np + ng);
}

namespace detail {

// Felzenszwalb-Huttenlocher 1D squared-distance transform.
inline void edt_1d(const std::vector<double>& f, std::vector<double>& d) {
  const int n = static_cast<int>(f.size());
  d.assign(n, 0.0);
  std::vector<int> v(n);
  std::vector<double> z(n + 1);
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; ++q) {
    double s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
    while (s <= z[k]) {
      --k;
      s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    double dq = q - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

// Exact squared Euclidean distance to the nearest pixel of `set`.
inline Grid<double> squared_edt(const LabelMap& m, uint8_t label) {
  const int H = m.rows(), W = m.cols();
  const double inf = 1e18;
  Grid<double> d(H, W);
  std::vector<double> col(H), out(H);
  for (int c = 0; c < W; ++c) {
    for (int r = 0; r < H; ++r) col[r] = (m(r, c) == label) ? 0.0 : inf;
    edt_1d(col, out);
    for (int r = 0; r < H; ++r) d(r, c) = out[r];
  }
  std::vector<double> row(W), rout(W);
  for (int r = 0; r < H; ++r) {
    for (int c = 0; c < W; ++c) row[c] = d(r, c);
    edt_1d(row, rout);
    for (int c = 0; c < W; ++c) d(r, c) = rout[c];
  }
  return d;
}

inline double directed_hausdorff_sq(const LabelMap& from, const Grid<double>& edt_to,
                                    uint8_t label) {
  double best = 0.0;
  for (int r = 0; r < from.rows(); ++r)
    for (int c = 0; c < from.cols(); ++c)
      if (from(r, c) == label) best = std::max(best, edt_to(r, c));
  return best;
}

}  // namespace detail

// Symmetric Hausdorff distance between the pixel-center point sets of the
// label, scaled to mm. Missing (nullopt) when either set is empty.
inline std::optional<double> hausdorff(const LabelMap& pred, const LabelMap& gt,
                                       uint8_t label, double spacing_mm) {
  if (!pred.same_shape(gt)) throw ShapeMismatch("pred and gt dims differ");
  bool has_p = false, has_g = false;
  for (size_t i = 0; i < pred.size(); ++i) {
    has_p |= pred.raw()[i] == label;
    has_g |= gt.raw()[i] == label;
    if (has_p && has_g) break;
  }
  if (!has_p || !has_g) return std::nullopt;
  Grid<double> edt_gt = detail::squared_edt(gt, label);
  Grid<double> edt_pred = detail::squared_edt(pred, label);
  double h2 = std::max(detail::directed_hausdorff_sq(pred, edt_gt, label),
                       detail::directed_hausdorff_sq(gt, edt_pred, label));
  return std::sqrt(h2) * spacing_mm;
}

// ---- aggregation ----

struct StructureScore {
  int frame = 0;          // 0=ED, 1=ES
  uint8_t label = 0;
  double dsc = 0.0;
  std::optional<double> hd_mm;
};

struct SubjectScore {
  std::string subject_id;
  std::string group;
  std::vector<StructureScore> structures;
  double overall_dsc = 0.0;
  std::optional<double> overall_hd;

  void finalize() {
    if (structures.empty()) throw EmptyGroup("subject has no structure scores");
    double dsum = 0.0, hsum = 0.0;
    int hn = 0;
    for (const auto& s : structures) {
      dsum += s.dsc;
      if (s.hd_mm) {
        hsum += *s.hd_mm;
        ++hn;
      }
    }
    overall_dsc = dsum / structures.size();
    overall_hd = hn > 0 ? std::optional<double>(hsum / hn) : std::nullopt;
  }
};

// Overall per-subject score: unweighted mean over the three structures and
// the evaluated frames. HDs undefined for empty structures are excluded.
inline SubjectScore score_subject(const std::string& subject_id, const std::string& group,
                                  const std::vector<const LabelMap*>& preds,
                                  const std::vector<const LabelMap*>& gts,
                                  double spacing_mm) {
  if (preds.size() != gts.size() || preds.empty())
    throw ShapeMismatch("pred/gt frame counts differ");
  SubjectScore s;
  s.subject_id = subject_id;
  s.group = group;
  for (size_t f = 0; f < preds.size(); ++f)
    for (uint8_t lab : {kLVBP, kLVM, kRVBP}) {
      StructureScore ss;
      ss.frame = static_cast<int>(f);
      ss.label = lab;
      ss.dsc = dice(*preds[f], *gts[f], lab);
      ss.hd_mm = hausdorff(*preds[f], *gts[f], lab, spacing_mm);
      s.structures.push_back(ss);
    }
  s.finalize();
  return s;
}

// Linear-interpolation quantile (h = (n-1)q) on a sorted copy.
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw EmptyGroup("quantile of empty sample");
  std::sort(v.begin(), v.end());
  double h = (v.size() - 1) * q;
  size_t lo = static_cast<size_t>(h);
  if (lo + 1 >= v.size()) return v.back();
  double frac = h - lo;
  return v[lo] * (1.0 - frac) + v[lo + 1] * frac;
}

inline double median(const std::vector<double>& v) { return quantile(v, 0.5); }
inline double iqr(const std::vector<double>& v) { return quantile(v, 0.75) - quantile(v, 0.25); }

struct GroupSummary {
  std::string group;
  int n = 0;
  double median_dsc = 0.0;
  double iqr_dsc = 0.0;
  std::optional<double> median_hd;
  std::optional<double> iqr_hd;
};

inline GroupSummary summarize_group(const std::vector<SubjectScore>& scores) {
  if (scores.empty()) throw EmptyGroup("no subject scores");
  GroupSummary g;
  g.group = scores.front().group;
  g.n = static_cast<int>(scores.size());
  std::vector<double> ds, hs;
  for (const auto& s : scores) {
    ds.push_back(s.overall_dsc);
    if (s.overall_hd) hs.push_back(*s.overall_hd);
  }
  g.median_dsc = median(ds);
  g.iqr_dsc = iqr(ds);
  if (!hs.empty()) {
    g.median_hd = median(hs);
    g.iqr_hd = iqr(hs);
  }
  return g;
}

// FG = D_majority - D_minority; SER = max_g(1-D_g) / min_g(1-D_g).
inline std::pair<double, double> fairness_metrics(const GroupSummary& majority,
                                                  const GroupSummary& minority) {
  double dm = majority.median_dsc, dn = minority.median_dsc;
  double fg = dm - dn;
  double em = 1.0 - dm, en = 1.0 - dn;
  if (em == 0.0 && en == 0.0) throw PerfectScores("SER undefined: both medians are 1");
  double ser = std::max(em, en) / std::min(em, en);
  return {fg, ser};
}

// ---- Mann-Whitney U ----

struct StatTestResult {
  double u = 0.0;
  double p_two_sided = 1.0;
  int n1 = 0, n2 = 0;
  std::string method;  // "exact" or "normal-approx"
};

namespace detail {

struct RankInfo {
  double u1 = 0.0, u2 = 0.0;
  double tie_term = 0.0;  // sum of (t^3 - t) over tie groups
  bool has_ties = false;
};

inline RankInfo rank_u(const std::vector<double>& a, const std::vector<double>& b) {
  struct Obs { double v; int which; };
  std::vector<Obs> all;
  for (double v : a) all.push_back({v, 0});
  for (double v : b) all.push_back({v, 1});
  std::sort(all.begin(), all.end(), [](const Obs& x, const Obs& y) { return x.v < y.v; });
  RankInfo info;
  double rank_sum_a = 0.0;
  size_t i = 0;
  while (i < all.size()) {
    size_t j = i;
    while (j < all.size() && all[j].v == all[i].v) ++j;
    double t = static_cast<double>(j - i);
    double avg_rank = (i + 1 + j) / 2.0;  // average of ranks i+1..j
    if (t > 1) {
      info.has_ties = true;
      info.tie_term += t * t * t - t;
    }
    for (size_t k = i; k < j; ++k)
      if (all[k].which == 0) rank_sum_a += avg_rank;
    i = j;
  }
  double n1 = static_cast<double>(a.size()), n2 = static_cast<double>(b.size());
  info.u1 = rank_sum_a - n1 * (n1 + 1) / 2.0;
  info.u2 = n1 * n2 - info.u1;
  return info;
}

// Null distribution of U over the C(n1+n2, n1) equally likely labelings:
// f(u; a, b) = f(u - b; a - 1, b) + f(u; a, b - 1).
inline std::vector<double> u_null_counts(int n1, int n2) {
  std::vector<std::vector<std::vector<double>>> dp(
      n1 + 1, std::vector<std::vector<double>>(n2 + 1));
  for (int a = 0; a <= n1; ++a)
    for (int b = 0; b <= n2; ++b) {
      auto& f = dp[a][b];
      f.assign(a * b + 1, 0.0);
      if (a == 0 || b == 0) {
        f[0] = 1.0;
        continue;
      }
      const auto& fa = dp[a - 1][b];
      const auto& fb = dp[a][b - 1];
      for (int u = 0; u <= a * b; ++u) {
        double v = 0.0;
        if (u - b >= 0 && u - b < static_cast<int>(fa.size())) v += fa[u - b];
        if (u < static_cast<int>(fb.size())) v += fb[u];
        f[u] = v;
      }
    }
  return dp[n1][n2];
}

}  // namespace detail

inline double mann_whitney_exact_p(int n1, int n2, double u_min) {
  auto counts = detail::u_null_counts(n1, n2);
  double total = 0.0, tail = 0.0;
  for (int u = 0; u < static_cast<int>(counts.size()); ++u) {
    total += counts[u];
    if (u <= u_min + 1e-9) tail += counts[u];
  }
  return std::min(1.0, 2.0 * tail / total);
}

inline double mann_whitney_normal_p(int n1, int n2, double u_min, double tie_term) {
  double n = n1 + n2;
  double mean = n1 * n2 / 2.0;
  double var = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (var <= 0.0) return 1.0;
  double z = (u_min - mean + 0.5) / std::sqrt(var);  // continuity correction
  double p = 2.0 * 0.5 * std::erfc(-z / std::sqrt(2.0));
  return std::clamp(p, std::numeric_limits<double>::min(), 1.0);
}

// Two-sided test; exact by the null U distribution when n1*n2 <= 64 and the
// pooled sample is tie-free, otherwise normal approximation.
inline StatTestResult mann_whitney_u(const std::vector<double>& sample_a,
                                     const std::vector<double>& sample_b) {
  if (sample_a.empty() || sample_b.empty()) throw EmptySample("empty sample");
  auto info = detail::rank_u(sample_a, sample_b);
  StatTestResult res;
  res.n1 = static_cast<int>(sample_a.size());
  res.n2 = static_cast<int>(sample_b.size());
  res.u = std::min(info.u1, info.u2);
  if (!info.has_ties && res.n1 * res.n2 <= 64) {
    res.method = "exact";
    res.p_two_sided = mann_whitney_exact_p(res.n1, res.n2, res.u);
  } else {
    res.method = "normal-approx";
    res.p_two_sided = mann_whitney_normal_p(res.n1, res.n2, res.u, info.tie_term);
  }
  return res;
}

struct FairnessReport {
  GroupSummary majority;
  GroupSummary minority;
  double fairness_gap = 0.0;
  double ser = 1.0;
  StatTestResult mann_whitney;
};

inline FairnessReport make_fairness_report(const std::vector<SubjectScore>& scores,
                                           const std::string& majority_group,
                                           const std::string& minority_group) {
  std::vector<SubjectScore> maj, min_;
  std::vector<double> dmaj, dmin;
  for (const auto& s : scores) {
    if (s.group == majority_group) {
      maj.push_back(s);
      dmaj.push_back(s.overall_dsc);
    } else if (s.group == minority_group) {
      min_.push_back(s);
      dmin.push_back(s.overall_dsc);
    }
  }
  FairnessReport rep;
  rep.majority = summarize_group(maj);
  rep.minority = summarize_group(min_);
  auto [fg, ser] = fairness_metrics(rep.majority, rep.minority);
  rep.fairness_gap = fg;
  rep.ser = ser;
  rep.mann_whitney = mann_whitney_u(dmaj, dmin);
  return rep;
}

}  // namespace fairseg
