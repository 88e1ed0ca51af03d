#pragma once

// File I/O: PNG (via libpng) and PPM/PGM input, 16-bit label maps, BSDS300
// `.seg` ground truth, boundary overlays and debug heat maps.

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "dsr/error.hpp"
#include "dsr/image.hpp"

namespace dsr {

namespace io_detail {

inline std::vector<unsigned char> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline bool is_png(const std::vector<unsigned char>& bytes) {
  static constexpr unsigned char sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  return bytes.size() >= 8 && std::memcmp(bytes.data(), sig, 8) == 0;
}

// RAII wrapper over the libpng simplified-API control structure.
class PngImage {
 public:
  PngImage() {
    std::memset(&image_, 0, sizeof image_);
    image_.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image_); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;

  png_image* operator->() { return &image_; }
  png_image* get() { return &image_; }

 private:
  png_image image_;
};

struct DecodedPng {
  int width = 0;
  int height = 0;
  int channels = 0;                   // 1 or 3
  bool sixteenBit = false;
  std::vector<std::uint16_t> samples;  // row-major, interleaved
};

// `labelMap` selects the grayscale path (8 or 16 bit) used for label maps;
// otherwise the file is decoded as 8-bit RGB.
inline DecodedPng decode_png(const std::vector<unsigned char>& bytes, const std::string& name,
                             bool labelMap) {
  PngImage img;
  if (!png_image_begin_read_from_memory(img.get(), bytes.data(), bytes.size()))
    throw FormatError("'" + name + "': " + img->message);
  DecodedPng out;
  out.width = int(img->width);
  out.height = int(img->height);
  const bool linear = (img->format & PNG_FORMAT_FLAG_LINEAR) != 0;
  const bool colour = (img->format & PNG_FORMAT_FLAG_COLOR) != 0;
  if (labelMap) {
    if (colour) throw FormatError("'" + name + "': label map must be a grayscale PNG");
    out.channels = 1;
    out.sixteenBit = linear;
    if (linear) {
      img->format = PNG_FORMAT_LINEAR_Y;
      std::vector<std::uint16_t> buf(PNG_IMAGE_SIZE(*img.get()) / 2);
      if (!png_image_finish_read(img.get(), nullptr, buf.data(), 0, nullptr))
        throw FormatError("'" + name + "': " + img->message);
      out.samples = std::move(buf);
      return out;
    }
    img->format = PNG_FORMAT_GRAY;
  } else {
    if (linear) throw FormatError("'" + name + "': unsupported bit depth 16 (expected 8-bit)");
    img->format = PNG_FORMAT_RGB;
    out.channels = 3;
  }
  std::vector<unsigned char> buf(PNG_IMAGE_SIZE(*img.get()));
  if (!png_image_finish_read(img.get(), nullptr, buf.data(), 0, nullptr))
    throw FormatError("'" + name + "': " + img->message);
  out.samples.assign(buf.begin(), buf.end());
  return out;
}

inline void write_png(const std::filesystem::path& path, int width, int height,
                      std::uint32_t format, const void* data) {
  PngImage img;
  img->width = png_uint_32(width);
  img->height = png_uint_32(height);
  img->format = format;
  if (!png_image_write_to_file(img.get(), path.string().c_str(), 0, data, 0, nullptr))
    throw IoError("cannot write '" + path.string() + "': " + img->message);
}

// Netpbm header tokenizer; '#' starts a comment running to end of line.
class PnmReader {
 public:
  PnmReader(const std::vector<unsigned char>& bytes, std::string name)
      : bytes_(bytes), name_(std::move(name)) {}

  long next_int() {
    skip_space();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_]))
      throw FormatError("'" + name_ + "': truncated or malformed PNM data");
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > 1L << 30) throw FormatError("'" + name_ + "': PNM value out of range");
    }
    return v;
  }

  // Raster data of binary variants starts after exactly one whitespace byte.
  std::size_t binary_start() const { return pos_ + 1; }

 private:
  void skip_space() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<unsigned char>& bytes_;
  std::string name_;
  std::size_t pos_ = 2;
};

inline RasterImage decode_pnm(const std::vector<unsigned char>& bytes, const std::string& name) {
  const char kind = char(bytes[1]);
  const bool ascii = kind == '2' || kind == '3';
  const int channels = (kind == '3' || kind == '6') ? 3 : 1;
  PnmReader reader(bytes, name);
  const long w = reader.next_int();
  const long h = reader.next_int();
  const long maxval = reader.next_int();
  if (maxval != 255)
    throw FormatError("'" + name + "': unsupported bit depth (maxval " + std::to_string(maxval) +
                      ", expected 255)");
  if (w < 2 || h < 2)
    throw FormatError("'" + name + "': image must be at least 2x2, got " + std::to_string(w) +
                      "x" + std::to_string(h));
  const std::size_t count = std::size_t(w) * std::size_t(h) * std::size_t(channels);
  std::vector<double> samples(count);
  if (ascii) {
    for (auto& s : samples) {
      const long v = reader.next_int();
      if (v > maxval) throw FormatError("'" + name + "': sample exceeds maxval");
      s = double(v);
    }
  } else {
    const std::size_t start = reader.binary_start();
    if (start + count > bytes.size()) throw FormatError("'" + name + "': truncated PNM data");
    for (std::size_t i = 0; i < count; ++i) samples[i] = bytes[start + i];
  }
  RasterImage img(int(w), int(h), ColorSpace::sRGB8);
  auto data = img.data();
  for (std::size_t p = 0; p < std::size_t(w) * std::size_t(h); ++p)
    for (int c = 0; c < 3; ++c)
      data[p * 3 + c] = samples[p * std::size_t(channels) + (channels == 3 ? c : 0)];
  return img;
}

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace io_detail

// Decodes an 8-bit RGB or grayscale PNG, or a PPM/PGM (P2, P3, P5, P6) with
// maxval 255. Grayscale is replicated across the three channels; PNG alpha
// is flattened by libpng.
inline RasterImage load_image(const std::filesystem::path& path) {
  const auto bytes = io_detail::read_bytes(path);
  const std::string name = path.string();
  if (io_detail::is_png(bytes)) {
    auto png = io_detail::decode_png(bytes, name, false);
    if (png.width < 2 || png.height < 2)
      throw FormatError("'" + name + "': image must be at least 2x2");
    std::vector<double> data(png.samples.begin(), png.samples.end());
    return RasterImage(png.width, png.height, ColorSpace::sRGB8, std::move(data));
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' &&
      (bytes[1] == '2' || bytes[1] == '3' || bytes[1] == '5' || bytes[1] == '6'))
    return io_detail::decode_pnm(bytes, name);
  throw FormatError("'" + name + "': unsupported image format (expected PNG or PPM/PGM)");
}

// Writes an sRGB8 image as 8-bit RGB PNG; channel values are rounded and
// clamped to [0, 255].
inline void save_png(const RasterImage& img, const std::filesystem::path& path) {
  if (img.colorspace() != ColorSpace::sRGB8) throw InvalidArgument("save_png: image is not sRGB8");
  std::vector<unsigned char> buf(img.data().size());
  std::transform(img.data().begin(), img.data().end(), buf.begin(), [](double v) {
    return static_cast<unsigned char>(std::clamp(std::lround(v), 0L, 255L));
  });
  io_detail::write_png(path, img.width(), img.height(), PNG_FORMAT_RGB, buf.data());
}

// Min-max normalized 8-bit grayscale rendering of a scalar field (visual
// debugging only).
inline void save_heatmap_png(const ScalarField& field, const std::filesystem::path& path) {
  const auto [lo, hi] = std::minmax_element(field.values.begin(), field.values.end());
  const double span = *hi - *lo;
  std::vector<unsigned char> buf(field.size());
  for (std::size_t i = 0; i < buf.size(); ++i)
    buf[i] = span > 0 ? static_cast<unsigned char>(std::lround(255.0 * (field.values[i] - *lo) / span))
                      : 0;
  io_detail::write_png(path, field.width, field.height, PNG_FORMAT_GRAY, buf.data());
}

// 16-bit grayscale PNG holding the raw label values.
inline void write_label_map(const LabelMap& labels, const std::filesystem::path& path) {
  if (labels.num_labels() > 65536)
    throw InvalidArgument("write_label_map: " + std::to_string(labels.num_labels()) +
                          " labels do not fit in 16 bits");
  std::vector<std::uint16_t> buf(labels.labels().begin(), labels.labels().end());
  io_detail::write_png(path, labels.width(), labels.height(), PNG_FORMAT_LINEAR_Y, buf.data());
}

// Reads a grayscale PNG label map (8 or 16 bit). Values are compacted to
// 0..M-1 preserving order.
inline LabelMap read_label_png(const std::filesystem::path& path) {
  const auto bytes = io_detail::read_bytes(path);
  if (!io_detail::is_png(bytes)) throw FormatError("'" + path.string() + "': not a PNG file");
  auto png = io_detail::decode_png(bytes, path.string(), true);
  std::vector<std::int32_t> raw(png.samples.begin(), png.samples.end());
  return LabelMap::compacted(png.width, png.height, std::move(raw));
}

// BSDS300 `.seg` text format:
//
//   format ascii cr
//   ...                  (free "key value" header lines)
//   width <W>
//   height <H>
//   segments <M>         (optional; when present, ids must be < M)
//   data
//   <segment> <row> <colStart> <colEnd>     (inclusive column range)
//
// Every pixel must be covered by exactly one run.
inline GroundTruth read_seg(std::istream& in, const std::string& name) {
  auto fail = [&](int line, const std::string& what) -> FormatError {
    return FormatError("'" + name + "' line " + std::to_string(line) + ": " + what);
  };
  std::string line;
  int lineNo = 0;
  long width = -1, height = -1, segments = -1;
  bool sawData = false;
  while (std::getline(in, line)) {
    ++lineNo;
    const auto t = io_detail::trim(line);
    if (t.empty()) continue;
    if (t == "data") {
      sawData = true;
      break;
    }
    std::istringstream ss(t);
    std::string key;
    ss >> key;
    if (key == "width" || key == "height" || key == "segments" || key == "flipflop") {
      long v;
      if (!(ss >> v)) throw fail(lineNo, "expected integer value for '" + key + "'");
      if (key == "width") width = v;
      if (key == "height") height = v;
      if (key == "segments") segments = v;
      if (key == "flipflop" && v != 0) throw fail(lineNo, "flipflop images are not supported");
    } else if (key == "format") {
      std::string fmt;
      ss >> fmt;
      if (fmt != "ascii") throw fail(lineNo, "unsupported format '" + fmt + "'");
    }
  }
  if (!sawData) throw fail(lineNo, "missing 'data' line");
  if (width < 1 || height < 1) throw fail(lineNo, "header must define positive width and height");

  std::vector<std::int32_t> raw(std::size_t(width) * std::size_t(height), -1);
  while (std::getline(in, line)) {
    ++lineNo;
    const auto t = io_detail::trim(line);
    if (t.empty()) continue;
    std::istringstream ss(t);
    long seg, row, c0, c1;
    std::string extra;
    if (!(ss >> seg >> row >> c0 >> c1) || (ss >> extra))
      throw fail(lineNo, "expected '<segment> <row> <colStart> <colEnd>'");
    if (seg < 0 || (segments >= 0 && seg >= segments))
      throw fail(lineNo, "segment id " + std::to_string(seg) + " out of range");
    if (row < 0 || row >= height) throw fail(lineNo, "row " + std::to_string(row) + " out of range");
    if (c0 < 0 || c1 >= width || c0 > c1) throw fail(lineNo, "invalid column range");
    for (long c = c0; c <= c1; ++c) {
      auto& slot = raw[std::size_t(row) * std::size_t(width) + std::size_t(c)];
      if (slot != -1)
        throw fail(lineNo, "pixel (" + std::to_string(c) + ", " + std::to_string(row) +
                               ") covered twice");
      slot = std::int32_t(seg);
    }
  }
  const auto hole = std::find(raw.begin(), raw.end(), -1);
  if (hole != raw.end()) {
    const auto idx = std::size_t(hole - raw.begin());
    throw fail(lineNo, "pixel (" + std::to_string(idx % std::size_t(width)) + ", " +
                           std::to_string(idx / std::size_t(width)) + ") not covered");
  }
  return GroundTruth{LabelMap::compacted(int(width), int(height), std::move(raw))};
}

inline void write_seg(const GroundTruth& gt, std::ostream& out) {
  const auto& m = gt.regions;
  out << "format ascii cr\nwidth " << m.width() << "\nheight " << m.height() << "\nsegments "
      << m.num_labels() << "\ngray 0\ninvert 0\nflipflop 0\ndata\n";
  for (int y = 0; y < m.height(); ++y) {
    int start = 0;
    for (int x = 1; x <= m.width(); ++x) {
      if (x == m.width() || m.at(x, y) != m.at(start, y)) {
        out << m.at(start, y) << ' ' << y << ' ' << start << ' ' << x - 1 << '\n';
        start = x;
      }
    }
  }
}

// Dispatches on content: PNG signature -> label map, otherwise `.seg` text.
inline GroundTruth read_ground_truth(const std::filesystem::path& path) {
  const auto bytes = io_detail::read_bytes(path);
  if (io_detail::is_png(bytes)) return GroundTruth{read_label_png(path)};
  std::istringstream in(std::string(bytes.begin(), bytes.end()));
  return read_seg(in, path.string());
}

using Rgb8 = std::array<std::uint8_t, 3>;

// Copy of `img` with every boundary pixel of `labels` recolored.
inline RasterImage overlay_boundaries(const RasterImage& img, const LabelMap& labels,
                                      Rgb8 color = {255, 255, 0}) {
  if (img.width() != labels.width() || img.height() != labels.height())
    throw InvalidArgument("overlay_boundaries: image and label map differ in size");
  if (img.colorspace() != ColorSpace::sRGB8)
    throw InvalidArgument("overlay_boundaries: image is not sRGB8");
  RasterImage out = img;
  const auto mask = boundary_mask(labels);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      if (mask[std::size_t(y) * img.width() + x])
        out.set_pixel(x, y, {double(color[0]), double(color[1]), double(color[2])});
  return out;
}

inline void render_overlay(const RasterImage& img, const LabelMap& labels,
                           const std::filesystem::path& path, Rgb8 color = {255, 255, 0}) {
  save_png(overlay_boundaries(img, labels, color), path);
}

}  // namespace dsr
