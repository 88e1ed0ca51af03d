#pragma once

// Spectral-residual saliency and the density map derived from it.
//
//   lum --dft2--> log-amplitude L, phase P
//   residual R = L - box_n(L)
//   SR = gauss_sigma * |idft2(exp(R) * exp(iP))|^2
//   G  = exp(+-(SR - mean SR)), clamped to [exp(-c), exp(c)]

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <vector>

#include "dsr/error.hpp"
#include "dsr/fft.hpp"
#include "dsr/image.hpp"

namespace dsr {

struct SpectralDecomposition {
  ScalarField logAmplitude;
  ScalarField phase;  // radians
  ScalarField localAverage;
  ScalarField residual;
};

struct SaliencyMap {
  ScalarField values;  // non-negative
  double sigma = 0.0;
};

// literal: G = exp(SR - mean). inverted: G = exp(mean - SR), so salient
// pixels get small G (dense seeds, tight search windows).
enum class SignConvention { literal, inverted };

struct DensityMap {
  ScalarField values;  // strictly positive
  SignConvention convention = SignConvention::inverted;

  int width() const { return values.width; }
  int height() const { return values.height; }
  double at(int x, int y) const { return values.at(x, y); }
};

inline constexpr double kDefaultDensityClamp = 3.0;

struct SpectralParams {
  double sigma = 20.0;
  int boxSize = 3;
  double eps = 1e-8;
  SignConvention convention = SignConvention::inverted;
  int downsampleFactor = 1;
  // Rescale SR to [0, 1] before exponentiation. Without it the magnitude of
  // SR depends on image size and G is ~1 everywhere on natural images.
  bool normalizeSaliency = true;
  double clampExponent = kDefaultDensityClamp;
};

// ---------------------------------------------------------------------------
// Filters (replicate boundary)

// Mean over an n x n window, n odd.
inline ScalarField box_filter(const ScalarField& in, int n) {
  if (n < 1 || n % 2 == 0) throw InvalidArgument("box_filter: window size must be odd and >= 1");
  const int r = n / 2;
  const int w = in.width;
  const int h = in.height;
  ScalarField rows(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int d = -r; d <= r; ++d) s += in.at(std::clamp(x + d, 0, w - 1), y);
      rows.at(x, y) = s;
    }
  ScalarField out(w, h);
  const double norm = 1.0 / (double(n) * double(n));
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int d = -r; d <= r; ++d) s += rows.at(x, std::clamp(y + d, 0, h - 1));
      out.at(x, y) = s * norm;
    }
  return out;
}

// Normalized 1D Gaussian taps on [-ceil(3 sigma), ceil(3 sigma)].
inline std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) throw InvalidArgument("gaussian_kernel: sigma must be positive");
  const int radius = int(std::ceil(3.0 * sigma));
  std::vector<double> k(std::size_t(2 * radius + 1));
  for (int i = -radius; i <= radius; ++i)
    k[std::size_t(i + radius)] = std::exp(-double(i) * double(i) / (2.0 * sigma * sigma));
  const double sum = std::accumulate(k.begin(), k.end(), 0.0);
  for (auto& v : k) v /= sum;
  return k;
}

inline ScalarField gaussian_blur(const ScalarField& in, double sigma) {
  const auto k = gaussian_kernel(sigma);
  const int radius = int(k.size() / 2);
  const int w = in.width;
  const int h = in.height;
  // Horizontal pass over a replicate-padded copy of each row.
  ScalarField tmp(w, h);
  std::vector<double> row(std::size_t(w + 2 * radius));
  for (int y = 0; y < h; ++y) {
    for (int i = 0; i < w + 2 * radius; ++i) row[std::size_t(i)] = in.at(std::clamp(i - radius, 0, w - 1), y);
    double* t = &tmp.at(0, y);
    for (std::size_t d = 0; d < k.size(); ++d) {
      const double kd = k[d];
      const double* r = row.data() + d;
      for (int x = 0; x < w; ++x) t[x] += kd * r[x];
    }
  }
  // Vertical pass, row by row so the inner loop runs along x.
  ScalarField out(w, h);
  for (int y = 0; y < h; ++y) {
    double* o = &out.at(0, y);
    for (int d = -radius; d <= radius; ++d) {
      const double kd = k[std::size_t(d + radius)];
      const double* t = &tmp.at(0, std::clamp(y + d, 0, h - 1));
      for (int x = 0; x < w; ++x) o[x] += kd * t[x];
    }
  }
  return out;
}

// Bilinear resampling with pixel-center alignment; samples outside the source
// are clamped to the border.
inline ScalarField resample_bilinear(const ScalarField& in, int newWidth, int newHeight) {
  ScalarField out(newWidth, newHeight);
  const double sx = double(in.width) / newWidth;
  const double sy = double(in.height) / newHeight;
  for (int y = 0; y < newHeight; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, double(in.height - 1));
    const int y0 = int(fy);
    const int y1 = std::min(y0 + 1, in.height - 1);
    const double ty = fy - y0;
    for (int x = 0; x < newWidth; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, double(in.width - 1));
      const int x0 = int(fx);
      const int x1 = std::min(x0 + 1, in.width - 1);
      const double tx = fx - x0;
      const double top = in.at(x0, y0) * (1 - tx) + in.at(x1, y0) * tx;
      const double bottom = in.at(x0, y1) * (1 - tx) + in.at(x1, y1) * tx;
      out.at(x, y) = top * (1 - ty) + bottom * ty;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Saliency pipeline

inline SpectralDecomposition decompose(const ScalarField& lum, int n, double eps) {
  if (n < 1 || n % 2 == 0) throw InvalidArgument("decompose: n must be odd and >= 1");
  if (!(eps > 0.0)) throw InvalidArgument("decompose: eps must be positive");
  const auto spectrum = dft2(lum, Direction::forward);
  SpectralDecomposition dec;
  dec.logAmplitude = ScalarField(lum.width, lum.height);
  dec.phase = ScalarField(lum.width, lum.height);
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    dec.logAmplitude.values[i] = std::log(std::abs(spectrum.values[i]) + eps);
    dec.phase.values[i] = std::arg(spectrum.values[i]);
  }
  dec.localAverage = box_filter(dec.logAmplitude, n);
  dec.residual = ScalarField(lum.width, lum.height);
  for (std::size_t i = 0; i < spectrum.size(); ++i)
    dec.residual.values[i] = dec.logAmplitude.values[i] - dec.localAverage.values[i];
  return dec;
}

// Squared modulus of the phase-recombined residual spectrum, before smoothing.
inline ScalarField residual_reconstruction(const SpectralDecomposition& dec) {
  const int w = dec.residual.width;
  const int h = dec.residual.height;
  ComplexField spec(w, h);
  for (std::size_t i = 0; i < spec.size(); ++i)
    spec.values[i] = std::polar(std::exp(dec.residual.values[i]), dec.phase.values[i]);
  const auto back = dft2(std::move(spec), Direction::inverse);
  ScalarField sq(w, h);
  for (std::size_t i = 0; i < sq.size(); ++i) sq.values[i] = std::norm(back.values[i]);
  return sq;
}

inline SaliencyMap saliency(const SpectralDecomposition& dec, double sigma) {
  if (!(sigma > 0.0)) throw InvalidArgument("saliency: sigma must be positive");
  return SaliencyMap{gaussian_blur(residual_reconstruction(dec), sigma), sigma};
}

// Pass `clampExponent = infinity` to disable clamping.
inline DensityMap density_map(const SaliencyMap& sal, SignConvention convention,
                              double clampExponent = kDefaultDensityClamp) {
  const auto& v = sal.values.values;
  for (double s : v)
    if (!std::isfinite(s)) throw InvalidArgument("density_map: saliency is not finite");
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
  DensityMap g{ScalarField(sal.values.width, sal.values.height), convention};
  for (std::size_t i = 0; i < v.size(); ++i) {
    double e = convention == SignConvention::literal ? v[i] - mean : mean - v[i];
    e = std::clamp(e, -clampExponent, clampExponent);
    g.values.values[i] = std::exp(e);
  }
  return g;
}

// Maps SR to [0, 1]. A field whose spread is below rounding level relative to
// its magnitude is treated as featureless and mapped to zeros.
inline SaliencyMap normalize_saliency(SaliencyMap sal) {
  auto& v = sal.values.values;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double low = *lo;
  const double span = *hi - low;
  const double scale = std::max(std::abs(*hi), std::abs(low));
  if (!(span > 1e-9 * scale)) {
    std::fill(v.begin(), v.end(), 0.0);
    return sal;
  }
  for (auto& s : v) s = (s - low) / span;
  return sal;
}

// Full-resolution saliency of an image, optionally computed on a downsampled
// luminance and upsampled back. Sigma is expressed in full-resolution pixels.
inline SaliencyMap compute_saliency(const RasterImage& img, const SpectralParams& p = {}) {
  const int f = p.downsampleFactor;
  if (f != 1 && f != 2 && f != 4)
    throw InvalidArgument("compute_saliency: downsample factor must be 1, 2 or 4");
  auto lum = luminance(img);
  const int w = lum.width;
  const int h = lum.height;
  // A constant image has no salient structure. The transform itself would
  // still return an impulse at the origin riding on the DC term.
  const auto [lo, hi] = std::minmax_element(lum.values.begin(), lum.values.end());
  if (*lo == *hi) return SaliencyMap{ScalarField(w, h, 0.0), p.sigma};
  if (f > 1) lum = resample_bilinear(lum, std::max(1, w / f), std::max(1, h / f));
  const double sigma = p.sigma * double(lum.width) / double(w);
  auto sal = saliency(decompose(lum, p.boxSize, p.eps), sigma);
  if (f > 1) sal.values = resample_bilinear(sal.values, w, h);
  sal.sigma = p.sigma;
  if (p.normalizeSaliency) sal = normalize_saliency(std::move(sal));
  return sal;
}

inline DensityMap compute_density(const RasterImage& img, const SpectralParams& p = {}) {
  return density_map(compute_saliency(img, p), p.convention, p.clampExponent);
}

}  // namespace dsr
