#pragma once

// Boundary Recall, Boundary Precision and Undersegmentation Error.
//
// Boundaries are pixel sets (pixels with a differing 4-neighbor). Distances to
// a boundary set come from the exact squared distance transform, so the
// tolerance test d <= tol matches a brute-force nearest-pixel search exactly.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "dsr/distance.hpp"
#include "dsr/error.hpp"
#include "dsr/image.hpp"

namespace dsr {

struct SegmentationMetrics {
  double boundaryRecall = 0.0;
  double undersegError = 0.0;
  double boundaryPrecision = 0.0;
  int numSuperpixels = 0;
  double runtimeSeconds = 0.0;
};

inline std::vector<Pixel> boundary_pixels(const LabelMap& labels) {
  const auto mask = boundary_mask(labels);
  std::vector<Pixel> out;
  for (int y = 0; y < labels.height(); ++y)
    for (int x = 0; x < labels.width(); ++x)
      if (mask[std::size_t(y) * labels.width() + x]) out.push_back({x, y});
  return out;
}

// Fraction of `from` pixels within Euclidean distance `tol` of some `to`
// pixel. Returns 1 when `from` is empty.
inline double boundary_hit_rate(std::span<const char> from, std::span<const char> to, int w, int h,
                                double tol) {
  if (from.size() != to.size() || from.size() != std::size_t(w) * std::size_t(h))
    throw InvalidArgument("boundary_hit_rate: mask sizes differ");
  const auto dt = squared_distance_transform(to, w, h);
  const double tol2 = tol * tol;
  std::size_t total = 0, hit = 0;
  for (std::size_t i = 0; i < from.size(); ++i)
    if (from[i]) {
      ++total;
      if (dt[i] <= tol2) ++hit;
    }
  return total == 0 ? 1.0 : double(hit) / double(total);
}

inline void check_same_size(const GroundTruth& gt, const LabelMap& labels, const char* op) {
  if (gt.width() != labels.width() || gt.height() != labels.height())
    throw InvalidArgument(std::string(op) + ": dimension mismatch (" + std::to_string(gt.width()) +
                          "x" + std::to_string(gt.height()) + " vs " +
                          std::to_string(labels.width()) + "x" + std::to_string(labels.height()) +
                          ")");
}

inline double boundary_recall(const GroundTruth& gt, const LabelMap& labels, double tol = 2.0) {
  check_same_size(gt, labels, "boundary_recall");
  return boundary_hit_rate(boundary_mask(gt.regions), boundary_mask(labels), labels.width(),
                           labels.height(), tol);
}

inline double boundary_precision(const GroundTruth& gt, const LabelMap& labels, double tol = 2.0) {
  check_same_size(gt, labels, "boundary_precision");
  return boundary_hit_rate(boundary_mask(labels), boundary_mask(gt.regions), labels.width(),
                           labels.height(), tol);
}

// Which set the overlap threshold B is a fraction of.
//   region:     B_i = fraction * |g_i|  (the default)
//   superpixel: B_j = fraction * |s_j|; never negative
enum class UeThreshold { region, superpixel };

inline const char* to_string(UeThreshold t) { return t == UeThreshold::region ? "region" : "superpixel"; }

inline UeThreshold parse_ue_threshold(const std::string& s) {
  if (s == "region") return UeThreshold::region;
  if (s == "superpixel") return UeThreshold::superpixel;
  throw InvalidArgument("unknown UE threshold basis '" + s + "' (expected region or superpixel)");
}

// U = (sum_i sum_{j : |s_j & g_i| >= B} |s_j| - N) / N.
//
// With the region basis a ground-truth region much larger than the
// superpixels may have no superpixel reaching B_i, so U can drop below 0.
inline double underseg_error(const GroundTruth& gt, const LabelMap& labels, double fraction = 0.05,
                             UeThreshold basis = UeThreshold::region) {
  check_same_size(gt, labels, "underseg_error");
  if (!(fraction > 0.0 && fraction < 1.0))
    throw InvalidArgument("underseg_error: fraction must lie in (0, 1)");
  const auto g = gt.regions.labels();
  const auto s = labels.labels();
  const std::size_t n = s.size();
  std::vector<long> regionSize(std::size_t(gt.num_regions()), 0);
  std::vector<long> spSize(std::size_t(labels.num_labels()), 0);
  std::unordered_map<std::uint64_t, long> overlap;
  for (std::size_t i = 0; i < n; ++i) {
    ++regionSize[std::size_t(g[i])];
    ++spSize[std::size_t(s[i])];
    ++overlap[(std::uint64_t(std::uint32_t(g[i])) << 32) | std::uint32_t(s[i])];
  }
  long covered = 0;
  for (const auto& [key, count] : overlap) {
    const auto region = std::size_t(key >> 32);
    const auto sp = std::size_t(key & 0xffffffffu);
    const double base = double(basis == UeThreshold::region ? regionSize[region] : spSize[sp]);
    if (double(count) >= fraction * base) covered += spSize[sp];
  }
  return double(covered - long(n)) / double(n);
}

// Mean relative reduction (baseline - ours) / baseline over a shared k grid,
// in percent.
inline double improvement_rate(std::span<const double> ours, std::span<const double> baseline) {
  if (ours.size() != baseline.size() || ours.empty())
    throw InvalidArgument("improvement_rate: series must be non-empty and of equal length");
  double sum = 0.0;
  for (std::size_t i = 0; i < ours.size(); ++i) {
    if (baseline[i] == 0.0)
      throw InvalidArgument("improvement_rate: baseline is zero at index " + std::to_string(i) +
                            ", rate undefined");
    sum += (baseline[i] - ours[i]) / baseline[i];
  }
  return 100.0 * sum / double(ours.size());
}

inline SegmentationMetrics evaluate(const GroundTruth& gt, const LabelMap& labels,
                                    double tol = 2.0, double fraction = 0.05,
                                    UeThreshold basis = UeThreshold::region) {
  SegmentationMetrics m;
  m.boundaryRecall = boundary_recall(gt, labels, tol);
  m.boundaryPrecision = boundary_precision(gt, labels, tol);
  m.undersegError = underseg_error(gt, labels, fraction, basis);
  m.numSuperpixels = labels.num_labels();
  return m;
}

}  // namespace dsr
