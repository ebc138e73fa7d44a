#pragma once
// Minimal CPU neural-network core: CHW tensors, 3x3/1x1 convolutions via
// im2col + Eigen GEMM, instance norm, ReLU, 2x max-pool and nearest
// upsampling, with hand-written backward passes. Templated on the scalar so
// gradient checks can run in double while training runs in float.

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "fairseg/common.hpp"

namespace fairseg::nn {

template <typename T>
struct Tensor {
  int ch = 0, rows = 0, cols = 0;
  std::vector<T> data;

  Tensor() = default;
  Tensor(int c, int r, int w, T fill = T{})
      : ch(c), rows(r), cols(w), data(static_cast<size_t>(c) * r * w, fill) {}

  size_t plane() const { return static_cast<size_t>(rows) * cols; }
  size_t size() const { return data.size(); }
  T* channel(int c) { return data.data() + c * plane(); }
  const T* channel(int c) const { return data.data() + c * plane(); }
  T& at(int c, int r, int w) { return data[c * plane() + static_cast<size_t>(r) * cols + w]; }
  const T& at(int c, int r, int w) const {
    return data[c * plane() + static_cast<size_t>(r) * cols + w];
  }
};

template <typename T>
using MatRM = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapRM = Eigen::Map<MatRM<T>>;
template <typename T>
using CMapRM = Eigen::Map<const MatRM<T>>;

// ---- conv primitives ----

template <typename T>
struct ConvParam {
  int cin = 0, cout = 0, ksize = 3;
  std::vector<T> weight;  // [cout][cin*k*k] row-major
  std::vector<T> bias;    // [cout]

  size_t weight_count() const { return weight.size(); }
  size_t param_count() const { return weight.size() + bias.size(); }
};

template <typename T>
struct ConvGrad {
  std::vector<T> dweight, dbias;
  void reset(const ConvParam<T>& p) {
    dweight.assign(p.weight.size(), T{});
    dbias.assign(p.bias.size(), T{});
  }
  void add(const ConvGrad& o) {
    for (size_t i = 0; i < dweight.size(); ++i) dweight[i] += o.dweight[i];
    for (size_t i = 0; i < dbias.size(); ++i) dbias[i] += o.dbias[i];
  }
};

// 3x3 im2col with zero padding 1: output (cin*9) x (rows*cols).
template <typename T>
inline void im2col3(const Tensor<T>& in, std::vector<T>& cols) {
  const int H = in.rows, W = in.cols, C = in.ch;
  const size_t hw = in.plane();
  cols.assign(static_cast<size_t>(C) * 9 * hw, T{});
  for (int c = 0; c < C; ++c) {
    const T* src = in.channel(c);
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        T* dst = cols.data() + (static_cast<size_t>(c) * 9 + ky * 3 + kx) * hw;
        int dy = ky - 1, dx = kx - 1;
        for (int y = 0; y < H; ++y) {
          int sy = y + dy;
          if (sy < 0 || sy >= H) continue;
          int x0 = std::max(0, -dx), x1 = std::min(W, W - dx);
          const T* s = src + static_cast<size_t>(sy) * W + dx;
          T* d = dst + static_cast<size_t>(y) * W;
          for (int x = x0; x < x1; ++x) d[x] = s[x];
        }
      }
    }
  }
}

// Scatter-add of a (cin*9) x (rows*cols) column matrix back to an image.
template <typename T>
inline void col2im3(const std::vector<T>& cols, Tensor<T>& out) {
  const int H = out.rows, W = out.cols, C = out.ch;
  const size_t hw = out.plane();
  std::fill(out.data.begin(), out.data.end(), T{});
  for (int c = 0; c < C; ++c) {
    T* dst = out.channel(c);
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const T* src = cols.data() + (static_cast<size_t>(c) * 9 + ky * 3 + kx) * hw;
        int dy = ky - 1, dx = kx - 1;
        for (int y = 0; y < H; ++y) {
          int sy = y + dy;
          if (sy < 0 || sy >= H) continue;
          int x0 = std::max(0, -dx), x1 = std::min(W, W - dx);
          T* d = dst + static_cast<size_t>(sy) * W + dx;
          const T* s = src + static_cast<size_t>(y) * W;
          for (int x = x0; x < x1; ++x) d[x] += s[x];
        }
      }
    }
  }
}

template <typename T>
inline Tensor<T> conv_forward(const ConvParam<T>& p, const Tensor<T>& in,
                              std::vector<T>& scratch_cols) {
  const size_t hw = in.plane();
  Tensor<T> out(p.cout, in.rows, in.cols);
  if (p.ksize == 1) {
    CMapRM<T> W(p.weight.data(), p.cout, p.cin);
    CMapRM<T> X(in.data.data(), p.cin, hw);
    MapRM<T> Y(out.data.data(), p.cout, hw);
    Y.noalias() = W * X;
  } else {
    im2col3(in, scratch_cols);
    CMapRM<T> W(p.weight.data(), p.cout, p.cin * 9);
    CMapRM<T> X(scratch_cols.data(), p.cin * 9, hw);
    MapRM<T> Y(out.data.data(), p.cout, hw);
    Y.noalias() = W * X;
  }
  for (int c = 0; c < p.cout; ++c) {
    T* dst = out.channel(c);
    for (size_t i = 0; i < hw; ++i) dst[i] += p.bias[c];
  }
  return out;
}

template <typename T>
inline Tensor<T> conv_backward(const ConvParam<T>& p, const Tensor<T>& in,
                               const Tensor<T>& dout, ConvGrad<T>& grad,
                               std::vector<T>& scratch_cols) {
  const size_t hw = in.plane();
  Tensor<T> din(p.cin, in.rows, in.cols);
  CMapRM<T> dY(dout.data.data(), p.cout, hw);
  for (int c = 0; c < p.cout; ++c) {
    T s{};
    const T* d = dout.channel(c);
    for (size_t i = 0; i < hw; ++i) s += d[i];
    grad.dbias[c] += s;
  }
  if (p.ksize == 1) {
    CMapRM<T> W(p.weight.data(), p.cout, p.cin);
    CMapRM<T> X(in.data.data(), p.cin, hw);
    MapRM<T> dW(grad.dweight.data(), p.cout, p.cin);
    MapRM<T> dX(din.data.data(), p.cin, hw);
    dW.noalias() += dY * X.transpose();
    dX.noalias() = W.transpose() * dY;
  } else {
    im2col3(in, scratch_cols);
    CMapRM<T> W(p.weight.data(), p.cout, p.cin * 9);
    CMapRM<T> X(scratch_cols.data(), p.cin * 9, hw);
    MapRM<T> dW(grad.dweight.data(), p.cout, p.cin * 9);
    dW.noalias() += dY * X.transpose();
    std::vector<T> dcols(static_cast<size_t>(p.cin) * 9 * hw);
    MapRM<T> dX(dcols.data(), p.cin * 9, hw);
    dX.noalias() = W.transpose() * dY;
    col2im3(dcols, din);
  }
  return din;
}

// ---- instance norm (non-affine) ----

template <typename T>
struct InstanceNormCache {
  std::vector<T> invstd;  // per channel
};

template <typename T>
inline Tensor<T> instance_norm_forward(const Tensor<T>& in, InstanceNormCache<T>& cache,
                                       T eps = static_cast<T>(1e-5)) {
  Tensor<T> out(in.ch, in.rows, in.cols);
  cache.invstd.resize(in.ch);
  const size_t hw = in.plane();
  for (int c = 0; c < in.ch; ++c) {
    const T* src = in.channel(c);
    T mean{};
    for (size_t i = 0; i < hw; ++i) mean += src[i];
    mean /= static_cast<T>(hw);
    T var{};
    for (size_t i = 0; i < hw; ++i) {
      T d = src[i] - mean;
      var += d * d;
    }
    var /= static_cast<T>(hw);
    T inv = T(1) / std::sqrt(var + eps);
    cache.invstd[c] = inv;
    T* dst = out.channel(c);
    for (size_t i = 0; i < hw; ++i) dst[i] = (src[i] - mean) * inv;
  }
  return out;
}

// dx = invstd * (dy - mean(dy) - xhat * mean(dy * xhat))
template <typename T>
inline Tensor<T> instance_norm_backward(const Tensor<T>& dout, const Tensor<T>& xhat,
                                        const InstanceNormCache<T>& cache) {
  Tensor<T> din(dout.ch, dout.rows, dout.cols);
  const size_t hw = dout.plane();
  for (int c = 0; c < dout.ch; ++c) {
    const T* dy = dout.channel(c);
    const T* xh = xhat.channel(c);
    T m1{}, m2{};
    for (size_t i = 0; i < hw; ++i) {
      m1 += dy[i];
      m2 += dy[i] * xh[i];
    }
    m1 /= static_cast<T>(hw);
    m2 /= static_cast<T>(hw);
    T inv = cache.invstd[c];
    T* dx = din.channel(c);
    for (size_t i = 0; i < hw; ++i) dx[i] = inv * (dy[i] - m1 - xh[i] * m2);
  }
  return din;
}

// ---- relu / pool / upsample / concat ----

template <typename T>
inline Tensor<T> relu(const Tensor<T>& in) {
  Tensor<T> out = in;
  for (auto& v : out.data) v = std::max(v, T{});
  return out;
}

template <typename T>
inline Tensor<T> relu_backward(const Tensor<T>& dout, const Tensor<T>& pre) {
  Tensor<T> din = dout;
  for (size_t i = 0; i < din.data.size(); ++i)
    if (pre.data[i] <= T{}) din.data[i] = T{};
  return din;
}

template <typename T>
inline Tensor<T> maxpool2_forward(const Tensor<T>& in, std::vector<uint8_t>& argmax) {
  Tensor<T> out(in.ch, in.rows / 2, in.cols / 2);
  argmax.assign(out.size(), 0);
  size_t k = 0;
  for (int c = 0; c < in.ch; ++c)
    for (int r = 0; r < out.rows; ++r)
      for (int w = 0; w < out.cols; ++w, ++k) {
        T best = in.at(c, 2 * r, 2 * w);
        uint8_t bi = 0;
        const T cand[3] = {in.at(c, 2 * r, 2 * w + 1), in.at(c, 2 * r + 1, 2 * w),
                           in.at(c, 2 * r + 1, 2 * w + 1)};
        for (uint8_t i = 0; i < 3; ++i)
          if (cand[i] > best) {
            best = cand[i];
            bi = i + 1;
          }
        out.data[k] = best;
        argmax[k] = bi;
      }
  return out;
}

template <typename T>
inline Tensor<T> maxpool2_backward(const Tensor<T>& dout, int in_rows, int in_cols,
                                   const std::vector<uint8_t>& argmax) {
  Tensor<T> din(dout.ch, in_rows, in_cols);
  size_t k = 0;
  for (int c = 0; c < dout.ch; ++c)
    for (int r = 0; r < dout.rows; ++r)
      for (int w = 0; w < dout.cols; ++w, ++k) {
        uint8_t a = argmax[k];
        din.at(c, 2 * r + (a >> 1), 2 * w + (a & 1)) += dout.data[k];
      }
  return din;
}

template <typename T>
inline Tensor<T> upsample2_forward(const Tensor<T>& in) {
  Tensor<T> out(in.ch, in.rows * 2, in.cols * 2);
  for (int c = 0; c < in.ch; ++c)
    for (int r = 0; r < in.rows; ++r)
      for (int w = 0; w < in.cols; ++w) {
        T v = in.at(c, r, w);
        out.at(c, 2 * r, 2 * w) = v;
        out.at(c, 2 * r, 2 * w + 1) = v;
        out.at(c, 2 * r + 1, 2 * w) = v;
        out.at(c, 2 * r + 1, 2 * w + 1) = v;
      }
  return out;
}

template <typename T>
inline Tensor<T> upsample2_backward(const Tensor<T>& dout) {
  Tensor<T> din(dout.ch, dout.rows / 2, dout.cols / 2);
  for (int c = 0; c < dout.ch; ++c)
    for (int r = 0; r < din.rows; ++r)
      for (int w = 0; w < din.cols; ++w)
        din.at(c, r, w) = dout.at(c, 2 * r, 2 * w) + dout.at(c, 2 * r, 2 * w + 1) +
                          dout.at(c, 2 * r + 1, 2 * w) + dout.at(c, 2 * r + 1, 2 * w + 1);
  return din;
}

template <typename T>
inline Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b) {
  Tensor<T> out(a.ch + b.ch, a.rows, a.cols);
  std::copy(a.data.begin(), a.data.end(), out.data.begin());
  std::copy(b.data.begin(), b.data.end(), out.data.begin() + a.data.size());
  return out;
}

template <typename T>
inline void split_channels(const Tensor<T>& d, int ch_a, Tensor<T>& da, Tensor<T>& db) {
  da = Tensor<T>(ch_a, d.rows, d.cols);
  db = Tensor<T>(d.ch - ch_a, d.rows, d.cols);
  std::copy(d.data.begin(), d.data.begin() + da.data.size(), da.data.begin());
  std::copy(d.data.begin() + da.data.size(), d.data.end(), db.data.begin());
}

}  // namespace fairseg::nn
