#pragma once

// Raster containers shared by every stage of the pipeline, plus the color
// conversion and gradient helpers used for seeding and clustering.
//
// Coordinates: x = column, y = row, origin top-left, row-major storage.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dsr/error.hpp"

namespace dsr {

enum class ColorSpace { sRGB8, LabF64 };

struct Pixel {
  int x = 0;
  int y = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
};

// W x H grid of three-channel pixels. sRGB8 channels hold integral values in
// [0, 255]; LabF64 holds L in [0, 100] and a, b roughly in [-128, 127].
class RasterImage {
 public:
  RasterImage() = default;

  RasterImage(int width, int height, ColorSpace cs)
      : RasterImage(width, height, cs,
                    std::vector<double>(checked_size(width, height) * 3, 0.0)) {}

  RasterImage(int width, int height, ColorSpace cs, std::vector<double> data)
      : width_(width), height_(height), cs_(cs), data_(std::move(data)) {
    if (data_.size() != checked_size(width, height) * 3)
      throw InvalidArgument("RasterImage: data length " + std::to_string(data_.size()) +
                            " does not match " + std::to_string(width) + "x" +
                            std::to_string(height) + "x3");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return std::size_t(width_) * std::size_t(height_); }
  ColorSpace colorspace() const { return cs_; }

  double& at(int x, int y, int c) { return data_[(std::size_t(y) * width_ + x) * 3 + c]; }
  double at(int x, int y, int c) const { return data_[(std::size_t(y) * width_ + x) * 3 + c]; }

  std::array<double, 3> pixel(int x, int y) const {
    const double* p = &data_[(std::size_t(y) * width_ + x) * 3];
    return {p[0], p[1], p[2]};
  }
  void set_pixel(int x, int y, const std::array<double, 3>& v) {
    double* p = &data_[(std::size_t(y) * width_ + x) * 3];
    p[0] = v[0];
    p[1] = v[1];
    p[2] = v[2];
  }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  static std::size_t checked_size(int width, int height) {
    if (width < 2 || height < 2)
      throw InvalidArgument("RasterImage: both dimensions must be >= 2, got " +
                            std::to_string(width) + "x" + std::to_string(height));
    return std::size_t(width) * std::size_t(height);
  }

  int width_ = 0;
  int height_ = 0;
  ColorSpace cs_ = ColorSpace::sRGB8;
  std::vector<double> data_;
};

// Single-channel W x H field of doubles. Used for luminance, spectra,
// saliency and density maps. Unlike RasterImage, 1 x 1 fields are allowed.
struct ScalarField {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  ScalarField() = default;
  ScalarField(int w, int h, double fill = 0.0)
      : width(w), height(h), values(checked(w, h), fill) {}
  ScalarField(int w, int h, std::vector<double> v) : width(w), height(h), values(std::move(v)) {
    if (values.size() != checked(w, h))
      throw InvalidArgument("ScalarField: data length does not match dimensions");
  }

  std::size_t size() const { return values.size(); }
  double& at(int x, int y) { return values[std::size_t(y) * width + x]; }
  double at(int x, int y) const { return values[std::size_t(y) * width + x]; }

  friend bool operator==(const ScalarField&, const ScalarField&) = default;

 private:
  static std::size_t checked(int w, int h) {
    if (w < 1 || h < 1) throw InvalidArgument("ScalarField: zero-sized field");
    return std::size_t(w) * std::size_t(h);
  }
};

// Per-pixel superpixel index. Every value lies in [0, numLabels) and every
// index in that range is used at least once.
class LabelMap {
 public:
  LabelMap() = default;

  LabelMap(int width, int height, std::vector<std::int32_t> labels, int numLabels)
      : width_(width), height_(height), num_labels_(numLabels), labels_(std::move(labels)) {
    if (width < 1 || height < 1) throw InvalidArgument("LabelMap: zero-sized map");
    if (labels_.size() != std::size_t(width) * std::size_t(height))
      throw InvalidArgument("LabelMap: label count does not match dimensions");
    std::vector<char> seen(std::size_t(std::max(numLabels, 0)), 0);
    for (auto l : labels_) {
      if (l < 0 || l >= numLabels)
        throw InvalidArgument("LabelMap: label " + std::to_string(l) + " outside [0, " +
                              std::to_string(numLabels) + ")");
      seen[std::size_t(l)] = 1;
    }
    for (int l = 0; l < numLabels; ++l)
      if (!seen[std::size_t(l)])
        throw InvalidArgument("LabelMap: label " + std::to_string(l) + " is unused");
  }

  // Builds a valid map from arbitrary non-negative ids, renumbering them to
  // 0..k-1 while preserving their relative order.
  static LabelMap compacted(int width, int height, std::vector<std::int32_t> raw) {
    std::int32_t top = -1;
    for (auto v : raw) {
      if (v < 0) throw InvalidArgument("LabelMap: negative label " + std::to_string(v));
      top = std::max(top, v);
    }
    std::int32_t next = 0;
    if (std::size_t(top) <= 4 * raw.size() + 1024) {
      std::vector<std::int32_t> remap(std::size_t(top) + 1, -1);
      for (auto v : raw) remap[std::size_t(v)] = 0;
      for (auto& r : remap)
        if (r == 0) r = next++;
      for (auto& v : raw) v = remap[std::size_t(v)];
    } else {
      std::map<std::int32_t, std::int32_t> remap;
      for (auto v : raw) remap.emplace(v, 0);
      for (auto& [from, to] : remap) to = next++;
      for (auto& v : raw) v = remap[v];
    }
    return LabelMap(width, height, std::move(raw), next);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return labels_.size(); }
  int num_labels() const { return num_labels_; }

  std::int32_t at(int x, int y) const { return labels_[std::size_t(y) * width_ + x]; }
  std::span<const std::int32_t> labels() const { return labels_; }

  friend bool operator==(const LabelMap&, const LabelMap&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int num_labels_ = 0;
  std::vector<std::int32_t> labels_;
};

// Reference partition used for evaluation; M = regions.num_labels() >= 1.
struct GroundTruth {
  LabelMap regions;

  int width() const { return regions.width(); }
  int height() const { return regions.height(); }
  int num_regions() const { return regions.num_labels(); }
};

// ---------------------------------------------------------------------------
// Color conversion (sRGB, D65, CIELAB)

namespace color {

// IEC 61966-2-1 linear sRGB -> XYZ matrix.
inline constexpr double kRgbToXyz[3][3] = {
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
};

// D65 reference white, taken as the image of linear (1, 1, 1) so that sRGB
// white maps to L = 100, a = b = 0 exactly.
inline constexpr double kWhite[3] = {
    kRgbToXyz[0][0] + kRgbToXyz[0][1] + kRgbToXyz[0][2],
    kRgbToXyz[1][0] + kRgbToXyz[1][1] + kRgbToXyz[1][2],
    kRgbToXyz[2][0] + kRgbToXyz[2][1] + kRgbToXyz[2][2],
};

inline double srgb_to_linear(double v) {
  return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

inline double lab_f(double t) {
  constexpr double delta = 6.0 / 29.0;
  return t > delta * delta * delta ? std::cbrt(t) : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

// One pixel, channels in [0, 255].
inline std::array<double, 3> srgb_to_lab(const std::array<double, 3>& rgb) {
  const double lin[3] = {srgb_to_linear(rgb[0] / 255.0), srgb_to_linear(rgb[1] / 255.0),
                         srgb_to_linear(rgb[2] / 255.0)};
  double f[3];
  for (int i = 0; i < 3; ++i) {
    const double xyz =
        kRgbToXyz[i][0] * lin[0] + kRgbToXyz[i][1] * lin[1] + kRgbToXyz[i][2] * lin[2];
    f[i] = lab_f(xyz / kWhite[i]);
  }
  return {116.0 * f[1] - 16.0, 500.0 * (f[0] - f[1]), 200.0 * (f[1] - f[2])};
}

}  // namespace color

inline RasterImage srgb_to_lab(const RasterImage& img) {
  if (img.colorspace() != ColorSpace::sRGB8)
    throw InvalidArgument("srgb_to_lab: input is not sRGB8");
  RasterImage out(img.width(), img.height(), ColorSpace::LabF64);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) out.set_pixel(x, y, color::srgb_to_lab(img.pixel(x, y)));
  return out;
}

// L channel for Lab images, Rec.601 luma for sRGB images.
inline ScalarField luminance(const RasterImage& img) {
  ScalarField out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      const auto p = img.pixel(x, y);
      out.at(x, y) = img.colorspace() == ColorSpace::LabF64
                         ? p[0]
                         : 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
    }
  return out;
}

// Squared central-difference gradient over the Lab channels. Defined on
// interior pixels only.
inline double gradient_magnitude(const RasterImage& img, int x, int y) {
  if (x < 1 || y < 1 || x > img.width() - 2 || y > img.height() - 2)
    throw BoundsError("gradient_magnitude: (" + std::to_string(x) + ", " + std::to_string(y) +
                      ") is not an interior pixel of a " + std::to_string(img.width()) + "x" +
                      std::to_string(img.height()) + " image");
  double g = 0.0;
  for (int c = 0; c < 3; ++c) {
    const double dx = img.at(x + 1, y, c) - img.at(x - 1, y, c);
    const double dy = img.at(x, y + 1, c) - img.at(x, y - 1, c);
    g += dx * dx + dy * dy;
  }
  return g;
}

// A pixel lies on a boundary iff one of its 4-neighbors carries another label.
inline std::vector<char> boundary_mask(const LabelMap& labels) {
  const int w = labels.width();
  const int h = labels.height();
  std::vector<char> mask(labels.size(), 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const auto l = labels.at(x, y);
      if ((x > 0 && labels.at(x - 1, y) != l) || (x + 1 < w && labels.at(x + 1, y) != l) ||
          (y > 0 && labels.at(x, y - 1) != l) || (y + 1 < h && labels.at(x, y + 1) != l))
        mask[std::size_t(y) * w + x] = 1;
    }
  return mask;
}

}  // namespace dsr
