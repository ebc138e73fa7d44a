#pragma once
// Independent brute-force reference implementations used only by tests.
// Deliberately naive: pixel counting, all-pairs distances, and full
// enumeration, sharing no code with the library's algorithms.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fairseg/common.hpp"

namespace oracle {

inline double brute_dice(const fairseg::LabelMap& a, const fairseg::LabelMap& b,
                         uint8_t label) {
  long tp = 0, fp = 0, fn = 0;
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c) {
      bool pa = a(r, c) == label, pb = b(r, c) == label;
      tp += pa && pb;
      fp += pa && !pb;
      fn += !pa && pb;
    }
  if (tp + fp + fn == 0) return 1.0;
  return 2.0 * tp / (2.0 * tp + fp + fn);
}

// All-pairs directed Hausdorff; returns nullopt when either set is empty.
inline std::optional<double> brute_hausdorff(const fairseg::LabelMap& a,
                                             const fairseg::LabelMap& b, uint8_t label,
                                             double spacing_mm) {
  std::vector<std::pair<int, int>> pa, pb;
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c) {
      if (a(r, c) == label) pa.push_back({r, c});
      if (b(r, c) == label) pb.push_back({r, c});
    }
  if (pa.empty() || pb.empty()) return std::nullopt;
  auto directed = [](const std::vector<std::pair<int, int>>& from,
                     const std::vector<std::pair<int, int>>& to) {
    double worst = 0.0;
    for (auto [r1, c1] : from) {
      double best = 1e300;
      for (auto [r2, c2] : to) {
        double d = std::hypot(static_cast<double>(r1 - r2), static_cast<double>(c1 - c2));
        best = std::min(best, d);
      }
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(pa, pb), directed(pb, pa)) * spacing_mm;
}

// Exact two-sided Mann-Whitney p by enumerating every C(n1+n2, n1) labeling
// of the pooled sample (tie-free inputs only).
inline std::pair<double, double> enum_mwu(const std::vector<double>& a,
                                          const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const int n = static_cast<int>(pooled.size());
  const int n1 = static_cast<int>(a.size());

  auto u_of = [&](const std::vector<int>& a_idx) {
    // U_a = number of (x in A, y in B) pairs with x > y
    std::vector<bool> in_a(n, false);
    for (int i : a_idx) in_a[i] = true;
    double u = 0.0;
    for (int i = 0; i < n; ++i)
      if (in_a[i])
        for (int j = 0; j < n; ++j)
          if (!in_a[j] && pooled[i] > pooled[j]) u += 1.0;
    return u;
  };

  std::vector<int> observed(n1);
  for (int i = 0; i < n1; ++i) observed[i] = i;
  double ua = u_of(observed);
  double ub = static_cast<double>(n1) * (n - n1) - ua;
  double u_min = std::min(ua, ub);

  // enumerate all subsets of size n1
  std::vector<int> idx(n1);
  for (int i = 0; i < n1; ++i) idx[i] = i;
  long total = 0, tail = 0;
  while (true) {
    double u1 = u_of(idx);
    double u = std::min(u1, static_cast<double>(n1) * (n - n1) - u1);
    ++total;
    if (u <= u_min + 1e-9) ++tail;
    // next combination
    int k = n1 - 1;
    while (k >= 0 && idx[k] == n - n1 + k) --k;
    if (k < 0) break;
    ++idx[k];
    for (int j = k + 1; j < n1; ++j) idx[j] = idx[j - 1] + 1;
  }
  // counting by min(U1, U2) already covers both tails of the U1 distribution
  double p = std::min(1.0, static_cast<double>(tail) / total);
  return {u_min, p};
}

inline double max_group_mean(const std::vector<double>& losses,
                             const std::vector<std::string>& groups) {
  std::map<std::string, std::pair<double, int>> acc;
  for (size_t i = 0; i < losses.size(); ++i) {
    acc[groups[i]].first += losses[i];
    acc[groups[i]].second += 1;
  }
  double best = -1e300;
  for (const auto& [g, v] : acc) best = std::max(best, v.first / v.second);
  return best;
}

}  // namespace oracle
