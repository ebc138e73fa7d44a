#pragma once
// Small raster plotting helper for report figures: box plots of per-group
// score distributions, line plots for sweeps, and scatter plots. Output is
// 8-bit RGB PNG.

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "fairseg/common.hpp"
#include "fairseg/font8x13.hpp"
#include "fairseg/metrics.hpp"

namespace fairseg::plot {

struct Color {
  uint8_t r = 0, g = 0, b = 0;
};

inline constexpr Color kBlack{0, 0, 0};
inline constexpr Color kGray{150, 150, 150};
inline constexpr Color kWhite{255, 255, 255};
inline const std::vector<Color> kPalette = {
    {31, 119, 180}, {255, 127, 14}, {44, 160, 44}, {214, 39, 40},
    {148, 103, 189}, {140, 86, 75}};

class Canvas {
 public:
  Canvas(int width, int height, Color bg = kWhite)
      : w_(width), h_(height), px_(static_cast<size_t>(width) * height * 3) {
    for (size_t i = 0; i < px_.size(); i += 3) {
      px_[i] = bg.r;
      px_[i + 1] = bg.g;
      px_[i + 2] = bg.b;
    }
  }

  int width() const { return w_; }
  int height() const { return h_; }

  void set(int x, int y, Color c) {
    if (x < 0 || y < 0 || x >= w_ || y >= h_) return;
    size_t i = (static_cast<size_t>(y) * w_ + x) * 3;
    px_[i] = c.r;
    px_[i + 1] = c.g;
    px_[i + 2] = c.b;
  }

  void line(int x0, int y0, int x1, int y1, Color c) {
    int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
    int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    while (true) {
      set(x0, y0, c);
      if (x0 == x1 && y0 == y1) break;
      int e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x0 += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y0 += sy;
      }
    }
  }

  void rect(int x0, int y0, int x1, int y1, Color c) {
    line(x0, y0, x1, y0, c);
    line(x1, y0, x1, y1, c);
    line(x1, y1, x0, y1, c);
    line(x0, y1, x0, y0, c);
  }

  void fill_rect(int x0, int y0, int x1, int y1, Color c) {
    for (int y = std::min(y0, y1); y <= std::max(y0, y1); ++y)
      for (int x = std::min(x0, x1); x <= std::max(x0, x1); ++x) set(x, y, c);
  }

  void disc(int cx, int cy, int r, Color c) {
    for (int y = -r; y <= r; ++y)
      for (int x = -r; x <= r; ++x)
        if (x * x + y * y <= r * r) set(cx + x, cy + y, c);
  }

  void text(int x, int y, const std::string& s, Color c = kBlack) {
    int cx = x;
    for (char ch : s) {
      int idx = static_cast<unsigned char>(ch) - kFontFirstChar;
      if (idx >= 0 && idx < 95) {
        for (int gy = 0; gy < kFontHeight; ++gy) {
          uint8_t bits = kFont8x13[idx][gy];
          for (int gx = 0; gx < kFontWidth; ++gx)
            if (bits & (1 << gx)) set(cx + gx, y + gy, c);
        }
      }
      cx += kFontWidth - 1;
    }
  }

  void save_png(const std::string& path) const {
    FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError("cannot open " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (setjmp(png_jmpbuf(png))) {
      png_destroy_write_struct(&png, &info);
      std::fclose(f);
      throw IoError("libpng write failure: " + path);
    }
    png_init_io(png, f);
    png_set_IHDR(png, info, w_, h_, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_bytep> rows(h_);
    for (int y = 0; y < h_; ++y)
      rows[y] = const_cast<png_bytep>(px_.data() + static_cast<size_t>(y) * w_ * 3);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(f);
  }

 private:
  int w_, h_;
  std::vector<uint8_t> px_;
};

struct Axes {
  int x0, y0, x1, y1;  // plot area in pixels (y0 = top)
  double vx0, vx1, vy0, vy1;

  int px(double v) const { return x0 + static_cast<int>((v - vx0) / (vx1 - vx0) * (x1 - x0)); }
  int py(double v) const { return y1 - static_cast<int>((v - vy0) / (vy1 - vy0) * (y1 - y0)); }
};

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

inline void draw_axes(Canvas& cv, const Axes& ax, const std::string& xlabel,
                      const std::string& ylabel, const std::string& title) {
  cv.rect(ax.x0, ax.y0, ax.x1, ax.y1, kBlack);
  for (int i = 0; i <= 4; ++i) {
    double fy = ax.vy0 + (ax.vy1 - ax.vy0) * i / 4.0;
    int y = ax.py(fy);
    cv.line(ax.x0 - 4, y, ax.x0, y, kBlack);
    cv.text(4, y - kFontHeight / 2, fmt(fy));
    double fx = ax.vx0 + (ax.vx1 - ax.vx0) * i / 4.0;
    int x = ax.px(fx);
    cv.line(x, ax.y1, x, ax.y1 + 4, kBlack);
    cv.text(x - 10, ax.y1 + 8, fmt(fx));
  }
  cv.text((ax.x0 + ax.x1) / 2 - static_cast<int>(xlabel.size()) * 3, ax.y1 + 26, xlabel);
  cv.text(4, ax.y0 - 18, ylabel);
  cv.text((ax.x0 + ax.x1) / 2 - static_cast<int>(title.size()) * 3, 6, title);
}

struct BoxSeries {
  std::string label;
  std::vector<double> values;
};

// One box (median, IQR, whiskers to min/max) per series.
inline void box_plot(const std::vector<BoxSeries>& series, const std::string& title,
                     const std::string& ylabel, const std::string& path) {
  if (series.empty()) throw EmptyResults("no series to plot");
  Canvas cv(640, 480);
  double lo = 1e300, hi = -1e300;
  for (const auto& s : series)
    for (double v : s.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (hi <= lo) hi = lo + 1.0;
  double pad = (hi - lo) * 0.08;
  Axes ax{70, 40, 610, 420, 0.0, static_cast<double>(series.size()), lo - pad, hi + pad};
  draw_axes(cv, ax, "", ylabel, title);
  for (size_t i = 0; i < series.size(); ++i) {
    const auto& v = series[i].values;
    if (v.empty()) continue;
    double q1 = quantile(v, 0.25), q2 = quantile(v, 0.5), q3 = quantile(v, 0.75);
    double vmin = *std::min_element(v.begin(), v.end());
    double vmax = *std::max_element(v.begin(), v.end());
    Color c = kPalette[i % kPalette.size()];
    int xc = ax.px(i + 0.5), half = std::max(8, (ax.x1 - ax.x0) / (4 * (int)series.size()));
    cv.rect(xc - half, ax.py(q3), xc + half, ax.py(q1), c);
    cv.line(xc - half, ax.py(q2), xc + half, ax.py(q2), c);
    cv.line(xc, ax.py(q3), xc, ax.py(vmax), c);
    cv.line(xc, ax.py(q1), xc, ax.py(vmin), c);
    cv.line(xc - half / 2, ax.py(vmax), xc + half / 2, ax.py(vmax), c);
    cv.line(xc - half / 2, ax.py(vmin), xc + half / 2, ax.py(vmin), c);
    cv.text(xc - static_cast<int>(series[i].label.size()) * 3, ax.y1 + 8, series[i].label);
  }
  cv.save_png(path);
}

struct LineSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

inline void line_plot(const std::vector<LineSeries>& series, const std::string& title,
                      const std::string& xlabel, const std::string& ylabel,
                      const std::string& path, bool lines = true) {
  if (series.empty()) throw EmptyResults("no series to plot");
  double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
  for (const auto& s : series)
    for (auto [x, y] : s.points) {
      xlo = std::min(xlo, x);
      xhi = std::max(xhi, x);
      ylo = std::min(ylo, y);
      yhi = std::max(yhi, y);
    }
  if (xhi <= xlo) xhi = xlo + 1.0;
  if (yhi <= ylo) yhi = ylo + 1.0;
  double xp = (xhi - xlo) * 0.06, yp = (yhi - ylo) * 0.08;
  Canvas cv(640, 480);
  Axes ax{70, 40, 610, 420, xlo - xp, xhi + xp, ylo - yp, yhi + yp};
  draw_axes(cv, ax, xlabel, ylabel, title);
  for (size_t i = 0; i < series.size(); ++i) {
    Color c = kPalette[i % kPalette.size()];
    auto pts = series[i].points;
    std::sort(pts.begin(), pts.end());
    for (size_t k = 0; k < pts.size(); ++k) {
      cv.disc(ax.px(pts[k].first), ax.py(pts[k].second), 3, c);
      if (lines && k > 0)
        cv.line(ax.px(pts[k - 1].first), ax.py(pts[k - 1].second), ax.px(pts[k].first),
                ax.py(pts[k].second), c);
    }
    cv.text(620 - 8 * static_cast<int>(series[i].label.size()), 44 + 16 * static_cast<int>(i),
            series[i].label, c);
  }
  cv.save_png(path);
}

}  // namespace fairseg::plot
