#pragma once

#include <chrono>
#include <optional>

#include "dsr/clustering.hpp"
#include "dsr/image.hpp"
#include "dsr/spectral.hpp"

namespace dsr {

inline constexpr const char* kVersion = "0.1.0";

struct SuperpixelResult {
  SegmentResult segmentation;
  std::optional<SaliencyMap> saliency;  // dsr only
  std::optional<DensityMap> density;    // dsr only
  double runtimeSeconds = 0.0;          // whole algorithm, density included
};

// Runs one method end to end on an sRGB or Lab image. For dsr the density map
// is computed here, so the measured runtime covers the whole algorithm.
inline SuperpixelResult run_superpixels(const RasterImage& img, const ClusteringParams& params,
                                        const SpectralParams& spectral = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  SuperpixelResult r;
  if (params.method == Method::dsr) {
    r.saliency = compute_saliency(img, spectral);
    r.density = density_map(*r.saliency, spectral.convention, spectral.clampExponent);
  }
  r.segmentation = segment(img, params, r.density ? &*r.density : nullptr);
  r.runtimeSeconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace dsr
