#pragma once
// On-disk dataset layout:
//   <root>/data/<split>/<subject_id>/frame_ED.png  (16-bit grayscale)
//                                    frame_ES.png
//                                    mask_ED.png   (8-bit, pixel value = label)
//                                    mask_ES.png
//   <root>/manifest.csv with columns subject_id,group,split,spacing_mm,seed

#include <png.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fairseg/common.hpp"
#include "fairseg/phantom.hpp"

namespace fairseg {

namespace detail {

struct PngFile {
  FILE* f = nullptr;
  explicit PngFile(const std::string& path, const char* mode) {
    f = std::fopen(path.c_str(), mode);
    if (!f) throw IoError("cannot open " + path);
  }
  ~PngFile() {
    if (f) std::fclose(f);
  }
};

inline void write_png_gray(const std::string& path, int rows, int cols, int bit_depth,
                           const std::vector<uint8_t>& row_bytes) {
  PngFile file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng write failure: " + path);
  }
  png_init_io(png, file.f);
  png_set_IHDR(png, info, cols, rows, bit_depth, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  size_t stride = static_cast<size_t>(cols) * bit_depth / 8;
  std::vector<png_bytep> ptrs(rows);
  for (int r = 0; r < rows; ++r)
    ptrs[r] = const_cast<png_bytep>(row_bytes.data() + r * stride);
  png_write_image(png, ptrs.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

inline void read_png_gray(const std::string& path, int& rows, int& cols, int& bit_depth,
                          std::vector<uint8_t>& row_bytes) {
  PngFile file(path, "rb");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng read failure: " + path);
  }
  png_init_io(png, file.f);
  png_read_info(png, info);
  cols = png_get_image_width(png, info);
  rows = png_get_image_height(png, info);
  bit_depth = png_get_bit_depth(png, info);
  if (png_get_color_type(png, info) != PNG_COLOR_TYPE_GRAY) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("expected grayscale PNG: " + path);
  }
  size_t stride = static_cast<size_t>(cols) * bit_depth / 8;
  row_bytes.resize(stride * rows);
  std::vector<png_bytep> ptrs(rows);
  for (int r = 0; r < rows; ++r) ptrs[r] = row_bytes.data() + r * stride;
  png_read_image(png, ptrs.data());
  png_destroy_read_struct(&png, &info, nullptr);
}

}  // namespace detail

inline void write_image_png16(const std::string& path, const ImageF& img) {
  std::vector<uint8_t> bytes(img.size() * 2);
  for (size_t i = 0; i < img.size(); ++i) {
    double v = std::clamp(static_cast<double>(img.raw()[i]), 0.0, 1.0);
    uint16_t q = static_cast<uint16_t>(std::lround(v * 65535.0));
    bytes[2 * i] = static_cast<uint8_t>(q >> 8);  // PNG is big-endian
    bytes[2 * i + 1] = static_cast<uint8_t>(q & 0xff);
  }
  detail::write_png_gray(path, img.rows(), img.cols(), 16, bytes);
}

inline ImageF read_image_png16(const std::string& path) {
  int rows, cols, depth;
  std::vector<uint8_t> bytes;
  detail::read_png_gray(path, rows, cols, depth, bytes);
  if (depth != 16) throw IoError("expected 16-bit PNG: " + path);
  ImageF img(rows, cols);
  for (size_t i = 0; i < img.size(); ++i) {
    uint16_t q = static_cast<uint16_t>((bytes[2 * i] << 8) | bytes[2 * i + 1]);
    img.raw()[i] = static_cast<float>(q / 65535.0);
  }
  return img;
}

inline void write_mask_png8(const std::string& path, const LabelMap& mask) {
  std::vector<uint8_t> bytes(mask.raw().begin(), mask.raw().end());
  detail::write_png_gray(path, mask.rows(), mask.cols(), 8, bytes);
}

inline LabelMap read_mask_png8(const std::string& path) {
  int rows, cols, depth;
  std::vector<uint8_t> bytes;
  detail::read_png_gray(path, rows, cols, depth, bytes);
  if (depth != 8) throw IoError("expected 8-bit PNG: " + path);
  LabelMap m(rows, cols);
  std::copy(bytes.begin(), bytes.end(), m.raw().begin());
  return m;
}

inline void save_dataset(const GroupedDataset& ds, const std::string& root) {
  namespace fs = std::filesystem;
  fs::create_directories(root);
  std::ofstream manifest(root + "/manifest.csv");
  if (!manifest) throw IoError("cannot write manifest in " + root);
  manifest << "subject_id,group,split,spacing_mm,seed\n";
  const std::pair<const char*, const std::vector<LabeledSubject>*> splits[] = {
      {"train", &ds.train}, {"internal", &ds.internal_test}, {"external", &ds.external_test}};
  for (const auto& [name, subjects] : splits) {
    for (const auto& s : *subjects) {
      fs::path dir = fs::path(root) / "data" / name / s.subject_id;
      fs::create_directories(dir);
      for (int f = 0; f < 2; ++f) {
        write_image_png16((dir / (std::string("frame_") + frame_name(f) + ".png")).string(),
                          s.frames[f]);
        write_mask_png8((dir / (std::string("mask_") + frame_name(f) + ".png")).string(),
                        s.masks[f]);
      }
      manifest << s.subject_id << ',' << s.group << ',' << name << ',' << s.spacing_mm
               << ',' << s.seed << '\n';
    }
  }
}

inline GroupedDataset load_dataset(const std::string& root) {
  namespace fs = std::filesystem;
  std::ifstream manifest(root + "/manifest.csv");
  if (!manifest) throw MissingDataset("no manifest.csv under " + root);
  GroupedDataset ds;
  std::string line;
  std::getline(manifest, line);  // header
  while (std::getline(manifest, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string id, group, split, spacing, seed;
    std::getline(ss, id, ',');
    std::getline(ss, group, ',');
    std::getline(ss, split, ',');
    std::getline(ss, spacing, ',');
    std::getline(ss, seed, ',');
    LabeledSubject s;
    s.subject_id = id;
    s.group = group;
    s.spacing_mm = std::stod(spacing);
    s.seed = std::stoull(seed);
    fs::path dir = fs::path(root) / "data" / split / id;
    for (int f = 0; f < 2; ++f) {
      s.frames[f] =
          read_image_png16((dir / (std::string("frame_") + frame_name(f) + ".png")).string());
      s.masks[f] =
          read_mask_png8((dir / (std::string("mask_") + frame_name(f) + ".png")).string());
    }
    if (split == "train") ds.train.push_back(std::move(s));
    else if (split == "internal") ds.internal_test.push_back(std::move(s));
    else if (split == "external") ds.external_test.push_back(std::move(s));
    else throw MissingDataset("unknown split in manifest: " + split);
  }
  if (ds.train.empty() && ds.internal_test.empty() && ds.external_test.empty())
    throw MissingDataset("manifest lists no subjects: " + root);
  return ds;
}

}  // namespace fairseg
