#pragma once
// Per-sample segmentation losses on class-score maps: pixelwise cross
// entropy, smoothed soft Dice over foreground classes, and their unit-weight
// sum. Losses are always evaluated per sample (never pooled across a batch)
// so group-level loss wrappers compose correctly.

#include <cmath>
#include <string>
#include <vector>

#include "fairseg/common.hpp"
#include "fairseg/nn.hpp"

namespace fairseg {

enum class BaseLoss { ce, soft_dice, ce_dice };

inline BaseLoss parse_base_loss(const std::string& s) {
  if (s == "ce") return BaseLoss::ce;
  if (s == "soft_dice") return BaseLoss::soft_dice;
  if (s == "ce_dice") return BaseLoss::ce_dice;
  throw InvalidParams("unknown base loss: " + s);
}

inline const char* base_loss_name(BaseLoss b) {
  switch (b) {
    case BaseLoss::ce: return "ce";
    case BaseLoss::soft_dice: return "soft_dice";
    default: return "ce_dice";
  }
}

inline constexpr double kDiceSmooth = 1e-5;

namespace detail {

template <typename T>
inline nn::Tensor<T> softmax_channels(const nn::Tensor<T>& logits) {
  nn::Tensor<T> p(logits.ch, logits.rows, logits.cols);
  const size_t hw = logits.plane();
  for (size_t i = 0; i < hw; ++i) {
    T mx = logits.data[i];
    for (int c = 1; c < logits.ch; ++c) mx = std::max(mx, logits.data[c * hw + i]);
    T sum{};
    for (int c = 0; c < logits.ch; ++c) {
      T e = std::exp(logits.data[c * hw + i] - mx);
      p.data[c * hw + i] = e;
      sum += e;
    }
    for (int c = 0; c < logits.ch; ++c) p.data[c * hw + i] /= sum;
  }
  return p;
}

}  // namespace detail

// Value and gradient of the per-sample loss with respect to the logits.
template <typename T>
struct LossResult {
  T value{};
  nn::Tensor<T> dlogits;
};

template <typename T>
inline LossResult<T> segmentation_loss_grad(const nn::Tensor<T>& logits,
                                            const LabelMap& target, BaseLoss kind,
                                            T smooth = static_cast<T>(kDiceSmooth)) {
  if (logits.rows != target.rows() || logits.cols != target.cols())
    throw ShapeMismatch("logits and target dims differ");
  const int C = logits.ch;
  const size_t hw = logits.plane();
  nn::Tensor<T> p = detail::softmax_channels(logits);

  LossResult<T> res;
  res.dlogits = nn::Tensor<T>(C, logits.rows, logits.cols);
  // dL/dp accumulated here, then mapped through the softmax Jacobian.
  nn::Tensor<T> dp(C, logits.rows, logits.cols);

  const bool want_ce = (kind == BaseLoss::ce || kind == BaseLoss::ce_dice);
  const bool want_dice = (kind == BaseLoss::soft_dice || kind == BaseLoss::ce_dice);

  if (want_ce) {
    T ce{};
    const T invn = T(1) / static_cast<T>(hw);
    for (size_t i = 0; i < hw; ++i) {
      int t = target.raw()[i];
      T pt = std::max(p.data[t * hw + i], static_cast<T>(1e-12));
      ce -= std::log(pt);
      // CE gradient is cheaper routed directly through softmax: p - onehot.
      for (int c = 0; c < C; ++c)
        res.dlogits.data[c * hw + i] +=
            invn * (p.data[c * hw + i] - (c == t ? T(1) : T(0)));
    }
    res.value += ce * invn;
  }

  if (want_dice) {
    T dice_sum{};
    const int nfg = C - 1;
    for (int c = 1; c < C; ++c) {
      T inter{}, psum{}, tsum{};
      for (size_t i = 0; i < hw; ++i) {
        T ti = (target.raw()[i] == c) ? T(1) : T(0);
        inter += p.data[c * hw + i] * ti;
        psum += p.data[c * hw + i];
        tsum += ti;
      }
      T num = T(2) * inter + smooth;
      T den = psum + tsum + smooth;
      dice_sum += num / den;
      // d(loss)/dp_c(i) = -(2*t_i*den - num) / den^2 / nfg
      T invden2 = T(1) / (den * den);
      for (size_t i = 0; i < hw; ++i) {
        T ti = (target.raw()[i] == c) ? T(1) : T(0);
        dp.data[c * hw + i] += -(T(2) * ti * den - num) * invden2 / static_cast<T>(nfg);
      }
    }
    res.value += T(1) - dice_sum / static_cast<T>(nfg);

    // softmax Jacobian: dz_k = p_k * (dp_k - sum_c dp_c * p_c)
    for (size_t i = 0; i < hw; ++i) {
      T dot{};
      for (int c = 0; c < C; ++c) dot += dp.data[c * hw + i] * p.data[c * hw + i];
      for (int c = 0; c < C; ++c)
        res.dlogits.data[c * hw + i] += p.data[c * hw + i] * (dp.data[c * hw + i] - dot);
    }
  }
  return res;
}

// Value-only variant; this is the per-sample loss fed to the group wrappers.
template <typename T>
inline T segmentation_loss(const nn::Tensor<T>& logits, const LabelMap& target,
                           BaseLoss kind, T smooth = static_cast<T>(kDiceSmooth)) {
  if (logits.rows != target.rows() || logits.cols != target.cols())
    throw ShapeMismatch("logits and target dims differ");
  const int C = logits.ch;
  const size_t hw = logits.plane();
  nn::Tensor<T> p = detail::softmax_channels(logits);
  T value{};
  if (kind == BaseLoss::ce || kind == BaseLoss::ce_dice) {
    T ce{};
    for (size_t i = 0; i < hw; ++i) {
      T pt = std::max(p.data[target.raw()[i] * hw + i], static_cast<T>(1e-12));
      ce -= std::log(pt);
    }
    value += ce / static_cast<T>(hw);
  }
  if (kind == BaseLoss::soft_dice || kind == BaseLoss::ce_dice) {
    T dice_sum{};
    for (int c = 1; c < C; ++c) {
      T inter{}, psum{}, tsum{};
      for (size_t i = 0; i < hw; ++i) {
        T ti = (target.raw()[i] == c) ? T(1) : T(0);
        inter += p.data[c * hw + i] * ti;
        psum += p.data[c * hw + i];
        tsum += ti;
      }
      dice_sum += (T(2) * inter + smooth) / (psum + tsum + smooth);
    }
    value += T(1) - dice_sum / static_cast<T>(C - 1);
  }
  return value;
}

}  // namespace fairseg
