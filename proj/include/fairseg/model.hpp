#pragma once
// Compact 2D encoder-decoder segmentation model with skip connections.
// Each level is two conv3x3 -> instance-norm -> ReLU units; decoder levels
// use nearest upsampling and channel concatenation; a 1x1 head maps to class
// scores. Inputs are zero-padded internally to a multiple of 2^depth and the
// logits are cropped back, so arbitrary crop sizes are accepted.

#include <random>
#include <string>
#include <vector>

#include "fairseg/common.hpp"
#include "fairseg/nn.hpp"

namespace fairseg {

struct ModelConfig {
  int input_rows = 128;
  int input_cols = 128;
  int num_classes = kNumClasses;
  std::vector<int> widths = {8, 16, 32, 64};  // channels per depth level
  std::string normalization = "instance";
  uint64_t seed = 0;

  int depth() const { return static_cast<int>(widths.size()); }

  void validate() const {
    if (depth() < 2) throw InvalidParams("model depth must be >= 2");
    if (num_classes < 2) throw InvalidParams("num_classes must be >= 2");
    for (int w : widths)
      if (w < 1) throw InvalidParams("channel widths must be positive");
    int m = 1 << depth();
    if (input_rows % m != 0 || input_cols % m != 0)
      throw InvalidParams("input dims must be divisible by 2^depth");
    if (normalization != "instance")
      throw InvalidParams("unsupported normalization: " + normalization);
  }
};

template <typename T>
class UNet {
 public:
  UNet() = default;
  explicit UNet(const ModelConfig& cfg) : cfg_(cfg) {
    cfg.validate();
    const int D = cfg.depth();
    std::mt19937_64 rng(derive_seed(cfg.seed, 0x494e4954));
    // encoder: two convs per level
    for (int i = 0; i < D; ++i) {
      int cin = (i == 0) ? 1 : cfg.widths[i - 1];
      convs_.push_back(make_conv(cin, cfg.widths[i], 3, rng));
      convs_.push_back(make_conv(cfg.widths[i], cfg.widths[i], 3, rng));
    }
    // decoder: two convs per up level, deepest first
    for (int j = D - 2; j >= 0; --j) {
      convs_.push_back(make_conv(cfg.widths[j + 1] + cfg.widths[j], cfg.widths[j], 3, rng));
      convs_.push_back(make_conv(cfg.widths[j], cfg.widths[j], 3, rng));
    }
    convs_.push_back(make_conv(cfg.widths[0], cfg.num_classes, 1, rng));
  }

  const ModelConfig& config() const { return cfg_; }
  int num_convs() const { return static_cast<int>(convs_.size()); }

  size_t param_count() const {
    size_t n = 0;
    for (const auto& c : convs_) n += c.param_count();
    return n;
  }

  std::vector<T> flat_params() const {
    std::vector<T> out;
    out.reserve(param_count());
    for (const auto& c : convs_) {
      out.insert(out.end(), c.weight.begin(), c.weight.end());
      out.insert(out.end(), c.bias.begin(), c.bias.end());
    }
    return out;
  }

  void set_flat_params(const std::vector<T>& flat) {
    if (flat.size() != param_count())
      throw CorruptCheckpoint("parameter count mismatch");
    size_t k = 0;
    for (auto& c : convs_) {
      std::copy(flat.begin() + k, flat.begin() + k + c.weight.size(), c.weight.begin());
      k += c.weight.size();
      std::copy(flat.begin() + k, flat.begin() + k + c.bias.size(), c.bias.begin());
      k += c.bias.size();
    }
  }

  struct Cache {
    int orig_rows = 0, orig_cols = 0;           // pre-padding dims
    std::vector<nn::Tensor<T>> unit_in;         // conv input per unit
    std::vector<nn::Tensor<T>> unit_xhat;       // post-IN pre-ReLU per unit
    std::vector<nn::InstanceNormCache<T>> unit_norm;
    std::vector<std::vector<uint8_t>> pool_argmax;
    std::vector<int> pool_rows, pool_cols;      // input dims of each pool
    nn::Tensor<T> head_in;
    std::vector<T> scratch;
  };

  struct Grads {
    std::vector<nn::ConvGrad<T>> g;
    void reset(const UNet& m) {
      g.resize(m.convs_.size());
      for (size_t i = 0; i < m.convs_.size(); ++i) g[i].reset(m.convs_[i]);
    }
    void add(const Grads& o) {
      for (size_t i = 0; i < g.size(); ++i) g[i].add(o.g[i]);
    }
    std::vector<T> flat() const {
      std::vector<T> out;
      for (const auto& cg : g) {
        out.insert(out.end(), cg.dweight.begin(), cg.dweight.end());
        out.insert(out.end(), cg.dbias.begin(), cg.dbias.end());
      }
      return out;
    }
  };

  // Forward pass on a single-channel image; returns logits (num_classes,H,W)
  // at the original resolution.
  nn::Tensor<T> forward(const Grid<T>& image, Cache& c) const {
    const int D = cfg_.depth();
    const int m = 1 << D;
    const int H = image.rows(), W = image.cols();
    const int Hp = (H + m - 1) / m * m, Wp = (W + m - 1) / m * m;
    c.orig_rows = H;
    c.orig_cols = W;
    c.unit_in.clear();
    c.unit_xhat.clear();
    c.unit_norm.clear();
    c.pool_argmax.assign(D - 1, {});
    c.pool_rows.assign(D - 1, 0);
    c.pool_cols.assign(D - 1, 0);

    nn::Tensor<T> x(1, Hp, Wp);
    for (int r = 0; r < H; ++r)
      for (int w = 0; w < W; ++w) x.at(0, r, w) = image(r, w);

    std::vector<nn::Tensor<T>> skips(D);
    int ui = 0;
    for (int i = 0; i < D; ++i) {
      x = unit_forward(ui++, x, c);
      x = unit_forward(ui++, x, c);
      skips[i] = x;
      if (i < D - 1) {
        c.pool_rows[i] = x.rows;
        c.pool_cols[i] = x.cols;
        x = nn::maxpool2_forward(x, c.pool_argmax[i]);
      }
    }
    for (int j = D - 2; j >= 0; --j) {
      x = nn::upsample2_forward(x);
      x = nn::concat_channels(x, skips[j]);
      x = unit_forward(ui++, x, c);
      x = unit_forward(ui++, x, c);
    }
    c.head_in = x;
    nn::Tensor<T> logits = nn::conv_forward(convs_.back(), x, c.scratch);
    if (Hp == H && Wp == W) return logits;
    nn::Tensor<T> out(cfg_.num_classes, H, W);
    for (int ch = 0; ch < out.ch; ++ch)
      for (int r = 0; r < H; ++r)
        for (int w = 0; w < W; ++w) out.at(ch, r, w) = logits.at(ch, r, w);
    return out;
  }

  // Backward pass for the cache produced by the matching forward call.
  void backward(const nn::Tensor<T>& dlogits, Cache& c, Grads& grads) const {
    const int D = cfg_.depth();
    const int Hp = c.head_in.rows, Wp = c.head_in.cols;
    nn::Tensor<T> dl(cfg_.num_classes, Hp, Wp);
    for (int ch = 0; ch < dl.ch; ++ch)
      for (int r = 0; r < c.orig_rows; ++r)
        for (int w = 0; w < c.orig_cols; ++w) dl.at(ch, r, w) = dlogits.at(ch, r, w);

    int head = num_convs() - 1;
    nn::Tensor<T> dx =
        nn::conv_backward(convs_[head], c.head_in, dl, grads.g[head], c.scratch);

    std::vector<nn::Tensor<T>> dskips(D);
    int ui = head - 1;  // last decoder unit index
    for (int j = 0; j <= D - 2; ++j) {
      dx = unit_backward(ui--, dx, c, grads);
      dx = unit_backward(ui--, dx, c, grads);
      nn::Tensor<T> dup, dskip;
      nn::split_channels(dx, cfg_.widths[j + 1], dup, dskip);
      dskips[j] = std::move(dskip);
      dx = nn::upsample2_backward(dup);
    }
    // dx now matches the deepest encoder output
    for (int i = D - 1; i >= 0; --i) {
      if (i < D - 1) {
        dx = nn::maxpool2_backward(dx, c.pool_rows[i], c.pool_cols[i], c.pool_argmax[i]);
        for (size_t k = 0; k < dx.data.size(); ++k) dx.data[k] += dskips[i].data[k];
      }
      dx = unit_backward(2 * i + 1, dx, c, grads);
      dx = unit_backward(2 * i, dx, c, grads);
    }
  }

  const std::vector<nn::ConvParam<T>>& convs() const { return convs_; }
  std::vector<nn::ConvParam<T>>& convs() { return convs_; }

 private:
  static nn::ConvParam<T> make_conv(int cin, int cout, int k, std::mt19937_64& rng) {
    nn::ConvParam<T> p;
    p.cin = cin;
    p.cout = cout;
    p.ksize = k;
    p.weight.resize(static_cast<size_t>(cout) * cin * k * k);
    p.bias.assign(cout, T{});
    double std = std::sqrt(2.0 / (cin * k * k));
    std::normal_distribution<double> dist(0.0, std);
    for (auto& w : p.weight) w = static_cast<T>(dist(rng));
    return p;
  }

  // conv -> instance norm -> relu, caching what backward needs.
  nn::Tensor<T> unit_forward(int ui, const nn::Tensor<T>& x, Cache& c) const {
    if (static_cast<int>(c.unit_in.size()) <= ui) {
      c.unit_in.resize(ui + 1);
      c.unit_xhat.resize(ui + 1);
      c.unit_norm.resize(ui + 1);
    }
    c.unit_in[ui] = x;
    nn::Tensor<T> z = nn::conv_forward(convs_[ui], x, c.scratch);
    nn::Tensor<T> xhat = nn::instance_norm_forward(z, c.unit_norm[ui]);
    c.unit_xhat[ui] = xhat;
    return nn::relu(xhat);
  }

  nn::Tensor<T> unit_backward(int ui, const nn::Tensor<T>& dout, Cache& c,
                              Grads& grads) const {
    nn::Tensor<T> dxhat = nn::relu_backward(dout, c.unit_xhat[ui]);
    nn::Tensor<T> dz = nn::instance_norm_backward(dxhat, c.unit_xhat[ui], c.unit_norm[ui]);
    return nn::conv_backward(convs_[ui], c.unit_in[ui], dz, grads.g[ui], c.scratch);
  }

  ModelConfig cfg_;
  std::vector<nn::ConvParam<T>> convs_;
};

// Per-pixel argmax over class scores.
template <typename T>
inline LabelMap predict_labels(const nn::Tensor<T>& logits) {
  LabelMap out(logits.rows, logits.cols, 0);
  for (int r = 0; r < logits.rows; ++r)
    for (int w = 0; w < logits.cols; ++w) {
      int best = 0;
      T bv = logits.at(0, r, w);
      for (int c = 1; c < logits.ch; ++c)
        if (logits.at(c, r, w) > bv) {
          bv = logits.at(c, r, w);
          best = c;
        }
      out(r, w) = static_cast<uint8_t>(best);
    }
  return out;
}

template <typename T>
inline LabelMap predict(const UNet<T>& model, const Grid<T>& image) {
  typename UNet<T>::Cache cache;
  return predict_labels(model.forward(image, cache));
}

// float image convenience for double models (gradient checks)
inline Grid<double> to_double(const ImageF& img) {
  Grid<double> out(img.rows(), img.cols());
  for (size_t i = 0; i < img.size(); ++i) out.raw()[i] = img.raw()[i];
  return out;
}

}  // namespace fairseg
