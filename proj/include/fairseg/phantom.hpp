#pragma once
// Synthetic short-axis phantom generator.
//
// Each subject is two frames (ED/ES analogs) of a three-structure heart:
// LV blood pool disk, myocardial annulus, RV crescent. Segmentation
// difficulty inside the heart is group-independent; groups differ only in
// structure strictly outside the heart (bright rim thickness, background
// offset, background texture), so any performance gap between groups is
// attributable to out-of-heart statistics.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fairseg/common.hpp"

namespace fairseg {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  double sample(std::mt19937_64& rng) const {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  }
};

// Out-of-heart appearance knobs for one group.
struct GroupSignal {
  Range rim_thickness_px{2.0, 3.0};   // bright subcutaneous-rim thickness
  double background_offset = 0.0;     // additive background intensity shift
  double texture_amplitude = 0.05;    // amplitude of background texture/blobs
};

struct RvCrescentParams {
  Range radius_px{9.0, 13.0};
  double center_gap_frac = 0.55;  // RV center at lv_R + frac*rv_r from LV center
};

struct PhantomParams {
  int image_size = 128;
  double spacing_mm = 1.8;
  Range heart_radius_range{16.0, 24.0};       // epicardial outer radius
  Range myocardium_thickness_range{3.5, 6.0};
  RvCrescentParams rv;
  double ed_es_contraction = 0.25;  // fractional blood-radius shrink at ES
  double noise_sigma = 0.03;
  double rim_gap_px = 2.0;          // gap between epicardium and bright rim
  double rim_intensity = 0.85;
  double center_jitter_px = 5.0;
  std::map<std::string, GroupSignal> group_signals;

  void validate() const {
    if (image_size < 32) throw InvalidParams("image_size too small");
    if (!(ed_es_contraction > 0.0 && ed_es_contraction < 1.0))
      throw InvalidParams("ed_es_contraction must be in (0,1)");
    if (heart_radius_range.lo < 4.0 || heart_radius_range.hi < heart_radius_range.lo)
      throw InvalidParams("bad heart_radius_range");
    if (myocardium_thickness_range.lo < 2.0)
      throw InvalidParams("myocardium thickness must be >= 2 px");
    double max_rim = 0.0;
    for (const auto& [g, s] : group_signals)
      max_rim = std::max(max_rim, s.rim_thickness_px.hi);
    double extent = heart_radius_range.hi + rv.radius_px.hi + rim_gap_px + max_rim +
                    center_jitter_px + 4.0;
    if (extent > image_size / 2.0)
      throw InvalidParams("heart + rim does not fit in the image with margin >= 4 px");
  }
};

struct LabeledSubject {
  std::string subject_id;
  std::string group;
  ImageF frames[2];    // [0]=ED, [1]=ES
  LabelMap masks[2];
  double spacing_mm = 1.8;
  uint64_t seed = 0;
};

inline const char* frame_name(int f) { return f == 0 ? "ED" : "ES"; }

struct DomainShift {
  double gain = 1.0;
  double bias = 0.0;
  double extra_noise_sigma = 0.0;
  double spacing_scale = 1.0;
  uint64_t seed = 0;
  bool is_identity() const {
    return gain == 1.0 && bias == 0.0 && extra_noise_sigma == 0.0 && spacing_scale == 1.0;
  }
};

struct SplitCounts {
  std::map<std::string, int> per_group;  // group -> subject count
  int total() const {
    int n = 0;
    for (const auto& [g, c] : per_group) n += c;
    return n;
  }
};

struct DatasetSpec {
  PhantomParams phantom;
  SplitCounts train, internal_test, external_test;
  DomainShift external_shift;
  std::string majority_group = "A";
  std::string minority_group = "B";
  uint64_t master_seed = 0;

  void validate() const {
    phantom.validate();
    for (const SplitCounts* s : {&train, &internal_test, &external_test})
      for (const auto& [g, c] : s->per_group) {
        if (c < 0) throw InvalidSpec("negative count for group " + g);
        if (c > 0 && !phantom.group_signals.count(g))
          throw InvalidSpec("no group signal configured for group " + g);
      }
    if (train.total() < 1) throw InvalidSpec("train split is empty");
  }
};

struct GroupedDataset {
  std::vector<LabeledSubject> train, internal_test, external_test;

  const std::vector<LabeledSubject>& split(const std::string& name) const {
    if (name == "train") return train;
    if (name == "internal") return internal_test;
    if (name == "external") return external_test;
    throw InvalidSpec("unknown split: " + name);
  }
};

namespace detail {

/// Smooth low-frequency field: bilinear interpolation of a coarse random grid,
// plus a few elliptical bright blobs. Both scale with `amplitude`.
inline ImageF background_texture(int n, double amplitude, std::mt19937_64& rng) {
  const int g = 9;  // coarse grid
  std::vector<double> coarse(g * g);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& v : coarse) v = u(rng) * amplitude;

  ImageF out(n, n, 0.0f);
  for (int r = 0; r < n; ++r) {
    double gy = static_cast<double>(r) / (n - 1) * (g - 1);
    int y0 = std::min(static_cast<int>(gy), g - 2);
    double fy = gy - y0;
    for (int c = 0; c < n; ++c) {
      double gx = static_cast<double>(c) / (n - 1) * (g - 1);
      int x0 = std::min(static_cast<int>(gx), g - 2);
      double fx = gx - x0;
      double v = coarse[y0 * g + x0] * (1 - fy) * (1 - fx) +
                 coarse[y0 * g + x0 + 1] * (1 - fy) * fx +
                 coarse[(y0 + 1) * g + x0] * fy * (1 - fx) +
                 coarse[(y0 + 1) * g + x0 + 1] * fy * fx;
      out(r, c) = static_cast<float>(v);
    }
  }

  // Bright blobs near mid-radius; amplitude-scaled so a zero-amplitude group
  // has a featureless background.
  std::uniform_real_distribution<double> upos(0.15, 0.85);
  std::uniform_real_distribution<double> urad(3.0, 7.0);
  std::uniform_real_distribution<double> uamp(2.0, 4.0);
  int n_blobs = 6;
  for (int b = 0; b < n_blobs; ++b) {
    double cy = upos(rng) * n, cx = upos(rng) * n;
    double ry = urad(rng), rx = urad(rng);
    double amp = uamp(rng) * amplitude;
    int r0 = std::max(0, static_cast<int>(cy - 3 * ry)), r1 = std::min(n - 1, static_cast<int>(cy + 3 * ry));
    int c0 = std::max(0, static_cast<int>(cx - 3 * rx)), c1 = std::min(n - 1, static_cast<int>(cx + 3 * rx));
    for (int r = r0; r <= r1; ++r)
      for (int c = c0; c <= c1; ++c) {
        double dy = (r - cy) / ry, dx = (c - cx) / rx;
        out(r, c) += static_cast<float>(amp * std::exp(-0.5 * (dy * dy + dx * dx)));
      }
  }
  return out;
}

}  // namespace detail

// Deterministic subject generation. Geometry and in-heart intensities are
// drawn from a stream seeded by `seed` alone; everything outside the heart is
// drawn from a stream seeded by (seed, group). Same seed, different group
// therefore yields identical in-heart pixels.
inline LabeledSubject generate_subject(uint64_t seed, const std::string& group,
                                       const PhantomParams& params) {
  params.validate();
  auto it = params.group_signals.find(group);
  if (it == params.group_signals.end())
    throw InvalidParams("no group signal configured for group " + group);
  const GroupSignal& sig = it->second;
  const int n = params.image_size;

  std::mt19937_64 rng_heart(derive_seed(seed, 0x48454152));
  std::mt19937_64 rng_out(derive_seed(seed, 0x4f555420, fnv1a(group)));

  // --- geometry (group-independent stream) ---
  std::uniform_real_distribution<double> jitter(-params.center_jitter_px, params.center_jitter_px);
  double cy = n / 2.0 + jitter(rng_heart);
  double cx = n / 2.0 + jitter(rng_heart);
  double lv_outer = params.heart_radius_range.sample(rng_heart);
  double myo_t = params.myocardium_thickness_range.sample(rng_heart);
  myo_t = std::min(myo_t, lv_outer - 3.0);  // keep LVBP nonempty
  double rv_r = params.rv.radius_px.sample(rng_heart);
  double rv_angle = std::uniform_real_distribution<double>(0.0, 2.0 * M_PI)(rng_heart);
  double rv_dist = lv_outer + params.rv.center_gap_frac * rv_r;
  double rv_cy = cy + rv_dist * std::sin(rv_angle);
  double rv_cx = cx + rv_dist * std::cos(rv_angle);

  // In-heart intensity fields, full image so draw order is geometry-free.
  ImageF heart_noise(n, n, 0.0f);
  std::normal_distribution<double> nheart(0.0, params.noise_sigma);
  for (auto& v : heart_noise.raw()) v = static_cast<float>(nheart(rng_heart));

  // --- out-of-heart field (group-dependent stream) ---
  double rim_t = sig.rim_thickness_px.sample(rng_out);
  ImageF bg = detail::background_texture(n, sig.texture_amplitude, rng_out);
  std::normal_distribution<double> nbg(0.0, params.noise_sigma);
  const double bg_base = 0.18 + sig.background_offset;
  for (auto& v : bg.raw()) v += static_cast<float>(bg_base + nbg(rng_out));

  LabeledSubject subj;
  subj.group = group;
  subj.spacing_mm = params.spacing_mm;
  subj.seed = seed;

  const double rim_lo = lv_outer + params.rim_gap_px;
  const double rim_hi = rim_lo + rim_t;

  for (int f = 0; f < 2; ++f) {
    double contraction = (f == 0) ? 0.0 : params.ed_es_contraction;
    double bp_r = (lv_outer - myo_t) * (1.0 - contraction);
    double rv_rf = rv_r * (1.0 - contraction);
    LabelMap mask(n, n, kBackground);
    ImageF img(n, n, 0.0f);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        double dlv = std::hypot(r + 0.5 - cy, c + 0.5 - cx);
        double drv = std::hypot(r + 0.5 - rv_cy, c + 0.5 - rv_cx);
        uint8_t lab = kBackground;
        if (dlv < bp_r) lab = kLVBP;
        else if (dlv < lv_outer) lab = kLVM;
        else if (drv < rv_rf) lab = kRVBP;
        mask(r, c) = lab;
        double v;
        if (lab == kLVBP || lab == kRVBP) {
          v = 0.75 + heart_noise(r, c);
        } else if (lab == kLVM) {
          v = 0.35 + heart_noise(r, c);
        } else {
          v = bg(r, c);
          if (dlv >= rim_lo && dlv < rim_hi) v = params.rim_intensity + bg(r, c) - bg_base;
        }
        img(r, c) = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
    subj.frames[f] = std::move(img);
    subj.masks[f] = std::move(mask);
  }

  // RV crescent can rasterize empty only if rv_rf < ~0.7 px; params forbid that,
  // but verify the per-label nonemptiness invariant anyway.
  for (int f = 0; f < 2; ++f) {
    int cnt[4] = {0, 0, 0, 0};
    for (uint8_t v : subj.masks[f].raw()) cnt[v]++;
    if (cnt[kLVBP] == 0 || cnt[kLVM] == 0 || cnt[kRVBP] == 0)
      throw InvalidParams("degenerate geometry: empty structure in frame " +
                          std::string(frame_name(f)));
  }
  return subj;
}

// Applies a global intensity transform and optional extra noise; masks and
// geometry are untouched. Identity shift returns the input bit-for-bit.
inline LabeledSubject apply_domain_shift(const LabeledSubject& subject,
                                         const DomainShift& shift) {
  if (!(std::isfinite(shift.gain) && std::isfinite(shift.bias) &&
        std::isfinite(shift.extra_noise_sigma) && std::isfinite(shift.spacing_scale)))
    throw InvalidParams("non-finite shift params");
  if (shift.is_identity()) return subject;
  LabeledSubject out = subject;
  out.spacing_mm = subject.spacing_mm * shift.spacing_scale;
  std::mt19937_64 rng(derive_seed(shift.seed, fnv1a(subject.subject_id), 0x53484946));
  std::normal_distribution<double> noise(0.0, shift.extra_noise_sigma);
  for (int f = 0; f < 2; ++f) {
    for (auto& p : out.frames[f].raw()) {
      double v = shift.gain * p + shift.bias;
      if (shift.extra_noise_sigma > 0.0) v += noise(rng);
      p = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  }
  return out;
}

inline GroupedDataset generate_dataset(const DatasetSpec& spec) {
  spec.validate();
  GroupedDataset ds;
  struct SplitDef { const char* name; const SplitCounts* counts; std::vector<LabeledSubject>* out; };
  const SplitDef splits[] = {
      {"train", &spec.train, &ds.train},
      {"internal", &spec.internal_test, &ds.internal_test},
      {"external", &spec.external_test, &ds.external_test},
  };
  for (size_t si = 0; si < 3; ++si) {
    const auto& sd = splits[si];
    for (const auto& [group, count] : sd.counts->per_group) {
      for (int i = 0; i < count; ++i) {
        uint64_t seed = derive_seed(spec.master_seed, si + 1, fnv1a(group), i + 1);
        LabeledSubject s = generate_subject(seed, group, spec.phantom);
        char idbuf[96];
        std::snprintf(idbuf, sizeof(idbuf), "%s_%s_%04d", sd.name, group.c_str(), i);
        s.subject_id = idbuf;
        if (si == 2) {
          DomainShift sh = spec.external_shift;
          sh.seed = derive_seed(spec.master_seed, 0x45585453);
          s = apply_domain_shift(s, sh);
        }
        sd.out->push_back(std::move(s));
      }
    }
  }
  return ds;
}

// Group label -> indices into a subject list.
inline std::map<std::string, std::vector<int>> group_indices(
    const std::vector<LabeledSubject>& subjects) {
  std::map<std::string, std::vector<int>> out;
  for (size_t i = 0; i < subjects.size(); ++i)
    out[subjects[i].group].push_back(static_cast<int>(i));
  return out;
}

}  // namespace fairseg
