#pragma once
// Bounding-box geometry, fixed-size crop/paste with exact round-trip, and
// the two-stage cascaded segmentation pipeline.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "fairseg/common.hpp"

namespace fairseg {

struct BoundingBox {
  int row_min = 0, row_max = 0, col_min = 0, col_max = 0;

  int height() const { return row_max - row_min + 1; }
  int width() const { return col_max - col_min + 1; }
  double center_row() const { return (row_min + row_max) / 2.0; }
  double center_col() const { return (col_min + col_max) / 2.0; }
};

struct CropConfig {
  int crop_height = 0;
  int crop_width = 0;
  int buffer_px = 5;
};

struct CropRecord {
  int source_rows = 0, source_cols = 0;
  int origin_row = 0, origin_col = 0;
  int crop_rows = 0, crop_cols = 0;
};

// Tightest axis-aligned box containing all foreground (label > 0) pixels.
inline BoundingBox mask_bounding_box(const LabelMap& mask) {
  BoundingBox b{mask.rows(), -1, mask.cols(), -1};
  for (int r = 0; r < mask.rows(); ++r)
    for (int c = 0; c < mask.cols(); ++c)
      if (mask(r, c) > 0) {
        b.row_min = std::min(b.row_min, r);
        b.row_max = std::max(b.row_max, r);
        b.col_min = std::min(b.col_min, c);
        b.col_max = std::max(b.col_max, c);
      }
  if (b.row_max < 0) throw EmptyMask("mask has no foreground pixels");
  return b;
}

inline bool mask_is_empty(const LabelMap& mask) {
  for (uint8_t v : mask.raw())
    if (v > 0) return false;
  return true;
}

// Fixed crop size: largest training bbox extent plus buffer_px on each side,
// clamped to the image dims.
inline CropConfig training_crop_size(const std::vector<const LabelMap*>& training_masks,
                                     int buffer_px) {
  if (training_masks.empty()) throw EmptyMask("no training masks");
  CropConfig cfg;
  cfg.buffer_px = buffer_px;
  int max_h = 0, max_w = 0, img_h = 0, img_w = 0;
  for (const LabelMap* m : training_masks) {
    BoundingBox b = mask_bounding_box(*m);
    max_h = std::max(max_h, b.height());
    max_w = std::max(max_w, b.width());
    img_h = m->rows();
    img_w = m->cols();
  }
  cfg.crop_height = std::min(max_h + 2 * buffer_px, img_h);
  cfg.crop_width = std::min(max_w + 2 * buffer_px, img_w);
  return cfg;
}

namespace detail {

inline CropRecord make_record(int rows, int cols, const BoundingBox& center_box,
                              const CropConfig& config) {
  if (config.crop_height > rows || config.crop_width > cols)
    throw ConfigTooLarge("crop dims exceed image dims");
  int r0 = static_cast<int>(std::lround(center_box.center_row())) - config.crop_height / 2;
  int c0 = static_cast<int>(std::lround(center_box.center_col())) - config.crop_width / 2;
  r0 = std::clamp(r0, 0, rows - config.crop_height);
  c0 = std::clamp(c0, 0, cols - config.crop_width);
  return {rows, cols, r0, c0, config.crop_height, config.crop_width};
}

}  // namespace detail

// Window of exactly config dims centered on the box center, translated to
// lie fully inside the image. The record enables exact inversion.
template <typename T>
inline std::pair<Grid<T>, CropRecord> crop_around(const Grid<T>& src,
                                                  const BoundingBox& center_box,
                                                  const CropConfig& config) {
  CropRecord rec = detail::make_record(src.rows(), src.cols(), center_box, config);
  Grid<T> out(rec.crop_rows, rec.crop_cols);
  for (int r = 0; r < rec.crop_rows; ++r)
    for (int c = 0; c < rec.crop_cols; ++c)
      out(r, c) = src(rec.origin_row + r, rec.origin_col + c);
  return {std::move(out), rec};
}

// Full-size map with the prediction in the recorded window and background
// everywhere else.
inline LabelMap paste_back(const LabelMap& cropped_prediction, const CropRecord& record) {
  if (cropped_prediction.rows() != record.crop_rows ||
      cropped_prediction.cols() != record.crop_cols)
    throw ShapeMismatch("cropped prediction dims do not match the crop record");
  LabelMap full(record.source_rows, record.source_cols, kBackground);
  for (int r = 0; r < record.crop_rows; ++r)
    for (int c = 0; c < record.crop_cols; ++c)
      full(record.origin_row + r, record.origin_col + c) = cropped_prediction(r, c);
  return full;
}

using SegmentFn = std::function<LabelMap(const ImageF&)>;

struct CascadeResult {
  LabelMap prediction;
  bool stage1_empty = false;      // fallback path taken
  BoundingBox stage1_box{};       // valid unless stage1_empty
  CropRecord record{};
};

// Two-stage pipeline: a full-image model localizes the heart, its mask
// defines a fixed-size crop, and a crop-trained model segments the window.
inline CascadeResult cascaded_segment(const SegmentFn& stage1, const SegmentFn& stage2,
                                      const ImageF& image, const CropConfig& config) {
  CascadeResult res;
  LabelMap initial = stage1(image);
  if (mask_is_empty(initial)) {
    res.stage1_empty = true;
    res.prediction = std::move(initial);
    return res;
  }
  res.stage1_box = mask_bounding_box(initial);
  auto [crop, rec] = crop_around(image, res.stage1_box, config);
  res.record = rec;
  res.prediction = paste_back(stage2(crop), rec);
  return res;
}

// Per-axis percent error of the predicted bbox extent vs the ground truth.
inline std::pair<double, double> bbox_size_error(const BoundingBox& gt_box,
                                                 const BoundingBox& pred_box) {
  if (gt_box.height() < 1 || gt_box.width() < 1)
    throw DegenerateBox("ground-truth box has zero extent");
  double ex = std::abs(pred_box.width() - gt_box.width()) /
              static_cast<double>(gt_box.width()) * 100.0;
  double ey = std::abs(pred_box.height() - gt_box.height()) /
              static_cast<double>(gt_box.height()) * 100.0;
  return {ex, ey};
}

}  // namespace fairseg
