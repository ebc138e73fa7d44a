#pragma once
// Core value types and error hierarchy shared across the library.

#include <cstdint>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fairseg {

// Dense row-major 2D array. Used for grayscale images (float, [0,1])
// and label maps (uint8_t).
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int rows, int cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  size_t size() const { return data_.size(); }

  T& operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
  const T& operator()(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::vector<T>& raw() { return data_; }
  const std::vector<T>& raw() const { return data_; }

  bool same_shape(const Grid& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
  friend bool operator==(const Grid& a, const Grid& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

using ImageF = Grid<float>;
using LabelMap = Grid<uint8_t>;

// Segmentation labels.
inline constexpr uint8_t kBackground = 0;
inline constexpr uint8_t kLVBP = 1;
inline constexpr uint8_t kLVM = 2;
inline constexpr uint8_t kRVBP = 3;
inline constexpr int kNumClasses = 4;

struct Error : std::runtime_error {
  Error(std::string kind, const std::string& msg)
      : std::runtime_error(kind + ": " + msg), kind(std::move(kind)) {}
  std::string kind;
};

#define FAIRSEG_ERROR(Name)                                              \
  struct Name : Error {                                                  \
    explicit Name(const std::string& msg = "") : Error(#Name, msg) {}    \
  }

FAIRSEG_ERROR(InvalidParams);
FAIRSEG_ERROR(InvalidSpec);
FAIRSEG_ERROR(EmptyGrouping);
FAIRSEG_ERROR(AllZeroCounts);
FAIRSEG_ERROR(EmptyGroup);
FAIRSEG_ERROR(UnknownGroup);
FAIRSEG_ERROR(ShapeMismatch);
FAIRSEG_ERROR(EmptyMask);
FAIRSEG_ERROR(ConfigTooLarge);
FAIRSEG_ERROR(DegenerateBox);
FAIRSEG_ERROR(EmptySample);
FAIRSEG_ERROR(PerfectScores);
FAIRSEG_ERROR(ConfigConflict);
FAIRSEG_ERROR(CorruptCheckpoint);
FAIRSEG_ERROR(MissingDataset);
FAIRSEG_ERROR(MissingCheckpoint);
FAIRSEG_ERROR(EmptyResults);
FAIRSEG_ERROR(IoError);

#undef FAIRSEG_ERROR

// splitmix64; used to derive independent child seeds from a master seed.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t base, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
  uint64_t s = splitmix64(base);
  s = splitmix64(s ^ (a * 0x9e3779b97f4a7c15ULL));
  s = splitmix64(s ^ (b * 0xc2b2ae3d27d4eb4fULL));
  s = splitmix64(s ^ (c * 0x165667b19e3779f9ULL));
  return s;
}

// FNV-1a over a string; digests are functions of content only.
inline uint64_t fnv1a(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(uint64_t v) {
  static const char* d = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = d[v & 0xf];
    v >>= 4;
  }
  return out;
}

}  // namespace fairseg
