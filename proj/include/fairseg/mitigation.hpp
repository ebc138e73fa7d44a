#pragma once
// Bias-mitigation primitives: inverse-frequency group weights, group-balanced
// batch sampling with replacement, reweighted and worst-group (DRO) loss
// reductions, and the training-strategy descriptor that composes them.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fairseg/common.hpp"
#include "fairseg/losses.hpp"

namespace fairseg {

// w_g = n_G / (n_g + eps), normalized so the weights sum to 1.
struct GroupWeighting {
  std::vector<std::string> group_ids;
  std::vector<double> counts;
  double total = 0.0;
  double epsilon = 1e-6;
  std::vector<double> raw_weights;
  std::vector<double> normalized_weights;

  double normalized(const std::string& g) const {
    for (size_t i = 0; i < group_ids.size(); ++i)
      if (group_ids[i] == g) return normalized_weights[i];
    throw UnknownGroup(g);
  }
};

inline GroupWeighting compute_group_weights(const std::map<std::string, double>& counts,
                                            double epsilon = 1e-6) {
  if (counts.empty()) throw EmptyGrouping("no groups");
  if (epsilon <= 0.0) throw InvalidParams("epsilon must be positive");
  GroupWeighting w;
  w.epsilon = epsilon;
  for (const auto& [g, n] : counts) {
    if (n < 0.0) throw InvalidParams("negative count for group " + g);
    w.group_ids.push_back(g);
    w.counts.push_back(n);
    w.total += n;
  }
  if (w.total == 0.0) throw AllZeroCounts("all group counts are zero");
  double sum = 0.0;
  for (double n : w.counts) {
    double raw = w.total / (n + epsilon);
    w.raw_weights.push_back(raw);
    sum += raw;
  }
  for (double raw : w.raw_weights) w.normalized_weights.push_back(raw / sum);
  return w;
}

struct BatchPlan {
  std::vector<int> indices;
  std::vector<std::string> group_of;
};

// Draws group-balanced batches by uniform sampling with replacement within
// each group. `level` interpolates between the dataset's natural group
// proportions (0) and exact per-batch balance (1). Remainder slots rotate
// across groups over successive batches so long-run balance is exact.
class BalancedSampler {
 public:
  BalancedSampler(const std::map<std::string, std::vector<int>>& groups, double level = 1.0)
      : level_(level) {
    if (groups.empty()) throw EmptyGrouping("no groups");
    for (const auto& [g, idx] : groups) {
      if (idx.empty()) throw EmptyGroup(g);
      group_ids_.push_back(g);
      members_.push_back(idx);
      total_ += idx.size();
    }
  }

  BatchPlan next(int batch_size, std::mt19937_64& rng) {
    const int ng = static_cast<int>(group_ids_.size());
    if (batch_size < ng) throw InvalidParams("batch_size smaller than number of groups");
    // fractional quota per group, then floor + largest-remainder with a
    // rotating tie/start offset
    std::vector<double> quota(ng);
    std::vector<int> take(ng);
    int assigned = 0;
    for (int i = 0; i < ng; ++i) {
      double prop = static_cast<double>(members_[i].size()) / total_;
      quota[i] = batch_size * ((1.0 - level_) * prop + level_ / ng);
      take[i] = static_cast<int>(std::floor(quota[i]));
      assigned += take[i];
    }
    int extras = batch_size - assigned;
    std::vector<int> order(ng);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return quota[a] - take[a] > quota[b] - take[b];
    });
    for (int e = 0; e < extras; ++e)
      take[order[(rotation_ + e) % ng]] += 1;
    rotation_ = (rotation_ + extras) % std::max(1, ng);

    BatchPlan plan;
    plan.indices.reserve(batch_size);
    plan.group_of.reserve(batch_size);
    for (int i = 0; i < ng; ++i) {
      std::uniform_int_distribution<size_t> pick(0, members_[i].size() - 1);
      for (int k = 0; k < take[i]; ++k) {
        plan.indices.push_back(members_[i][pick(rng)]);
        plan.group_of.push_back(group_ids_[i]);
      }
    }
    return plan;
  }

 private:
  std::vector<std::string> group_ids_;
  std::vector<std::vector<int>> members_;
  double total_ = 0.0;
  double level_ = 1.0;
  int rotation_ = 0;
};

inline BatchPlan balanced_batch_indices(const std::map<std::string, std::vector<int>>& groups,
                                        int batch_size, std::mt19937_64& rng) {
  BalancedSampler sampler(groups);
  return sampler.next(batch_size, rng);
}

namespace detail {

struct GroupMeans {
  std::vector<std::string> ids;
  std::vector<double> means;
  std::vector<int> counts;
};

inline GroupMeans group_means(std::span<const double> losses,
                              std::span<const std::string> groups) {
  if (losses.empty() || losses.size() != groups.size())
    throw InvalidParams("losses/groups must be nonempty and the same length");
  GroupMeans gm;
  for (size_t i = 0; i < losses.size(); ++i) {
    size_t j = 0;
    for (; j < gm.ids.size(); ++j)
      if (gm.ids[j] == groups[i]) break;
    if (j == gm.ids.size()) {
      gm.ids.push_back(groups[i]);
      gm.means.push_back(0.0);
      gm.counts.push_back(0);
    }
    gm.means[j] += losses[i];
    gm.counts[j] += 1;
  }
  for (size_t j = 0; j < gm.ids.size(); ++j) gm.means[j] /= gm.counts[j];
  return gm;
}

}  // namespace detail

// Weighted sum of group-mean losses, with the weights renormalized over the
// groups actually present in the batch.
inline double reweighted_loss(std::span<const double> per_sample_losses,
                              std::span<const std::string> groups,
                              const GroupWeighting& weighting) {
  auto gm = detail::group_means(per_sample_losses, groups);
  double wsum = 0.0;
  std::vector<double> w(gm.ids.size());
  for (size_t j = 0; j < gm.ids.size(); ++j) {
    w[j] = weighting.normalized(gm.ids[j]);  // throws UnknownGroup
    wsum += w[j];
  }
  double out = 0.0;
  for (size_t j = 0; j < gm.ids.size(); ++j) out += (w[j] / wsum) * gm.means[j];
  return out;
}

// L_DRO: maximum over groups present in the batch of the group mean loss.
inline double group_dro_loss(std::span<const double> per_sample_losses,
                             std::span<const std::string> groups) {
  auto gm = detail::group_means(per_sample_losses, groups);
  return *std::max_element(gm.means.begin(), gm.means.end());
}

enum class SamplerKind { plain, oversample };

// One named strategy from the experiment matrix. Reweighing and Group DRO
// can combine: the worst group is then picked by weighted group-mean loss.
struct TrainingStrategy {
  SamplerKind sampler = SamplerKind::plain;
  bool reweigh = false;
  bool group_dro = false;
  BaseLoss base_loss = BaseLoss::ce_dice;
  std::string name = "baseline";

  void validate() const {
    if (group_dro && base_loss != BaseLoss::ce)
      throw ConfigConflict("group_dro requires the ce base loss");
  }
};

inline TrainingStrategy parse_strategy(const std::string& name) {
  TrainingStrategy s;
  s.name = name;
  if (name == "baseline") {
  } else if (name == "oversample") {
    s.sampler = SamplerKind::oversample;
  } else if (name == "reweigh") {
    s.reweigh = true;
  } else if (name == "group_dro") {
    s.group_dro = true;
    s.base_loss = BaseLoss::ce;
  } else if (name == "oversample+group_dro") {
    s.sampler = SamplerKind::oversample;
    s.group_dro = true;
    s.base_loss = BaseLoss::ce;
  } else if (name == "reweigh+group_dro") {
    s.reweigh = true;
    s.group_dro = true;
    s.base_loss = BaseLoss::ce;
  } else if (name == "oversample+reweigh") {
    s.sampler = SamplerKind::oversample;
    s.reweigh = true;
  } else {
    throw InvalidParams("unknown strategy: " + name);
  }
  s.validate();
  return s;
}

// Coefficients c_i with total batch loss = sum_i c_i * L_i. The wrapped
// losses above are linear in the per-sample losses at fixed group structure,
// so backprop only needs these coefficients.
inline std::vector<double> loss_coefficients(std::span<const double> per_sample_losses,
                                             std::span<const std::string> groups,
                                             const TrainingStrategy& strategy,
                                             const GroupWeighting* weighting) {
  const size_t n = per_sample_losses.size();
  auto gm = detail::group_means(per_sample_losses, groups);
  std::vector<double> gw(gm.ids.size(), 1.0);
  if (strategy.reweigh) {
    if (!weighting) throw InvalidParams("reweigh strategy requires group weighting");
    double wsum = 0.0;
    for (size_t j = 0; j < gm.ids.size(); ++j) {
      gw[j] = weighting->normalized(gm.ids[j]);
      wsum += gw[j];
    }
    for (auto& w : gw) w /= wsum;
  } else {
    // plain mean over samples
    for (size_t j = 0; j < gm.ids.size(); ++j)
      gw[j] = static_cast<double>(gm.counts[j]) / n;
  }

  std::vector<double> coeff(n, 0.0);
  if (strategy.group_dro) {
    size_t arg = 0;
    double best = -1.0;
    for (size_t j = 0; j < gm.ids.size(); ++j) {
      double v = strategy.reweigh ? gw[j] * gm.means[j] : gm.means[j];
      if (v > best) {
        best = v;
        arg = j;
      }
    }
    double scale = (strategy.reweigh ? gw[arg] : 1.0) / gm.counts[arg];
    for (size_t i = 0; i < n; ++i)
      if (groups[i] == gm.ids[arg]) coeff[i] = scale;
  } else {
    for (size_t i = 0; i < n; ++i) {
      size_t j = 0;
      while (gm.ids[j] != groups[i]) ++j;
      coeff[i] = gw[j] / gm.counts[j];
    }
  }
  return coeff;
}

}  // namespace fairseg
