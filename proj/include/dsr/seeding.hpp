#pragma once

// Initial cluster-center placement.
//
// grid_seeds:    SLIC regular grid, each seed nudged to the lowest-gradient
//                pixel of its 3x3 neighborhood.
// density_seeds: greedy argmin over the density map with exclusion of the 8
//                neighbors, a multiplicative penalty on a disk of radius
//                sqrt(N/k) and local Gaussian smoothing of that disk.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <vector>

#include "dsr/distance.hpp"
#include "dsr/error.hpp"
#include "dsr/image.hpp"
#include "dsr/spectral.hpp"

namespace dsr {

inline constexpr double kDefaultTau = 13.0 / 2.0;

struct SeedSet {
  std::vector<Pixel> seeds;
  double gridStep = 0.0;  // S = sqrt(N / k)
};

inline double grid_step(std::size_t numPixels, int k) { return std::sqrt(double(numPixels) / k); }

inline void check_superpixel_count(std::size_t numPixels, int k) {
  if (k < 4 || std::size_t(k) * 4 > numPixels)
    throw InvalidArgument("superpixel count " + std::to_string(k) + " outside [4, " +
                          std::to_string(numPixels / 4) + "]");
}

inline int chebyshev(Pixel a, Pixel b) { return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y)); }

namespace seeding_detail {

// Nearest integer, halves rounded down.
inline int round_half_down(double v) { return int(std::ceil(v - 0.5)); }

inline std::vector<int> axis_positions(int extent, double step) {
  std::vector<int> pos;
  const int count = int(std::ceil(extent / step));
  for (int i = 0; i < count; ++i) {
    const int p = round_half_down(step * (i + 0.5));
    if (p < extent) pos.push_back(p);
  }
  return pos;
}

// Adds the pixel farthest from every existing seed until `k` seeds exist.
// Pixels adjacent to a seed are only used once nothing else is left, which
// can happen when k is close to N / 4.
inline void pad_farthest(std::vector<Pixel>& seeds, int w, int h, std::size_t k) {
  if (seeds.size() >= k) return;
  std::vector<char> mask(std::size_t(w) * h, 0);
  for (auto s : seeds) mask[std::size_t(s.y) * w + s.x] = 1;
  auto nearest = squared_distance_transform(mask, w, h);
  std::vector<char> blocked(mask.size(), 0);
  auto block = [&](Pixel s) {
    for (int y = std::max(s.y - 1, 0); y <= std::min(s.y + 1, h - 1); ++y)
      for (int x = std::max(s.x - 1, 0); x <= std::min(s.x + 1, w - 1); ++x)
        blocked[std::size_t(y) * w + x] = 1;
  };
  for (auto s : seeds) block(s);
  while (seeds.size() < k) {
    std::size_t best = nearest.size();
    for (std::size_t i = 0; i < nearest.size(); ++i)
      if (!blocked[i] && (best == nearest.size() || nearest[i] > nearest[best])) best = i;
    if (best == nearest.size())
      best = std::size_t(std::max_element(nearest.begin(), nearest.end()) - nearest.begin());
    const Pixel s{int(best % std::size_t(w)), int(best / std::size_t(w))};
    seeds.push_back(s);
    block(s);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const double dx = x - s.x, dy = y - s.y;
        auto& n = nearest[std::size_t(y) * w + x];
        n = std::min(n, dx * dx + dy * dy);
      }
  }
}

inline bool keeps_spacing(const std::vector<Pixel>& seeds, std::size_t self, Pixel candidate) {
  for (std::size_t j = 0; j < seeds.size(); ++j)
    if (j != self && chebyshev(seeds[j], candidate) < 2) return false;
  return true;
}

}  // namespace seeding_detail

// Regular-grid seeding on a Lab image. Exactly k seeds are returned: excess
// grid points are dropped from the end in row-major order and missing ones are
// added at the pixel farthest from all existing seeds. Each seed then moves to
// the lowest gradient_magnitude of its 3x3 neighborhood (restricted to the
// interior), only if strictly lower than at its own position (its nearest
// interior pixel for border seeds); ties go to the smallest row-major index.
// A move never brings two seeds within Chebyshev distance 2.
inline SeedSet grid_seeds(const RasterImage& lab, int k) {
  const int w = lab.width();
  const int h = lab.height();
  check_superpixel_count(lab.size(), k);
  const double step = grid_step(lab.size(), k);
  SeedSet out{{}, step};
  const auto xs = seeding_detail::axis_positions(w, step);
  const auto ys = seeding_detail::axis_positions(h, step);
  for (int y : ys)
    for (int x : xs) out.seeds.push_back({x, y});
  if (out.seeds.size() > std::size_t(k)) out.seeds.resize(std::size_t(k));
  seeding_detail::pad_farthest(out.seeds, w, h, std::size_t(k));

  if (w < 3 || h < 3) return out;
  for (std::size_t i = 0; i < out.seeds.size(); ++i) {
    const Pixel s = out.seeds[i];
    const Pixel home{std::clamp(s.x, 1, w - 2), std::clamp(s.y, 1, h - 2)};
    double best = gradient_magnitude(lab, home.x, home.y);
    Pixel bestAt = s;
    for (int y = std::max(s.y - 1, 1); y <= std::min(s.y + 1, h - 2); ++y)
      for (int x = std::max(s.x - 1, 1); x <= std::min(s.x + 1, w - 2); ++x) {
        const double g = gradient_magnitude(lab, x, y);
        if (g < best && seeding_detail::keeps_spacing(out.seeds, i, {x, y})) {
          best = g;
          bestAt = {x, y};
        }
      }
    out.seeds[i] = bestAt;
  }
  return out;
}

// Density-guided seeding. Works on a private copy D of the density:
//   r = max(D) / min(D), range = sqrt(N / k)
//   repeat k times:
//     seed  = argmin D over finite pixels (smallest row-major index on ties)
//     D     = +inf on the seed and its 8 neighbors
//     D    *= sqrt(r) on finite pixels strictly within `range` of the seed
//     D     = Gaussian(tau) smoothing of that disk, normalized over its
//             finite pixels (kernel truncated at 3 tau per axis)
// Seeds are returned in selection order.
inline SeedSet density_seeds(const DensityMap& density, int k, double tau = kDefaultTau) {
  const int w = density.width();
  const int h = density.height();
  const std::size_t n = density.values.size();
  check_superpixel_count(n, k);
  if (!(tau > 0.0)) throw InvalidArgument("density_seeds: tau must be positive");
  constexpr double inf = std::numeric_limits<double>::infinity();

  std::vector<double> d = density.values.values;
  for (double v : d)
    if (!(v > 0.0) || !std::isfinite(v))
      throw InvalidArgument("density_seeds: density must be finite and strictly positive");
  const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
  const double penalty = std::sqrt(*hi / *lo);
  const double range = grid_step(n, k);
  const double range2 = range * range;
  const int reach = int(std::ceil(range));
  const auto kernel = gaussian_kernel(tau);
  const int kr = int(kernel.size() / 2);

  SeedSet out{{}, range};
  out.seeds.reserve(std::size_t(k));
  std::vector<char> inDisk;
  std::vector<double> num, den, numT, denT;

  // Per-row argmin cache; only rows touched by a seed are rescanned. The first
  // row holding the global minimum also holds its smallest row-major index.
  std::vector<std::size_t> rowBest(static_cast<std::size_t>(h));
  auto rescan = [&](int y) {
    const std::size_t start = std::size_t(y) * w;
    std::size_t best = n;
    for (std::size_t i = start; i < start + std::size_t(w); ++i)
      if (d[i] != inf && (best == n || d[i] < d[best])) best = i;
    rowBest[std::size_t(y)] = best;
  };
  for (int y = 0; y < h; ++y) rescan(y);

  for (int s = 0; s < k; ++s) {
    std::size_t best = n;
    for (int y = 0; y < h; ++y) {
      const auto r = rowBest[std::size_t(y)];
      if (r != n && (best == n || d[r] < d[best])) best = r;
    }
    if (best == n)
      throw InvalidArgument("density_seeds: no selectable pixel left after " + std::to_string(s) +
                            " seeds");
    const Pixel seed{int(best % std::size_t(w)), int(best / std::size_t(w))};
    out.seeds.push_back(seed);

    for (int y = std::max(seed.y - 1, 0); y <= std::min(seed.y + 1, h - 1); ++y)
      for (int x = std::max(seed.x - 1, 0); x <= std::min(seed.x + 1, w - 1); ++x)
        d[std::size_t(y) * w + x] = inf;

    // Bounding box of the open disk.
    const int x0 = std::max(seed.x - reach, 0), x1 = std::min(seed.x + reach, w - 1);
    const int y0 = std::max(seed.y - reach, 0), y1 = std::min(seed.y + reach, h - 1);
    const int bw = x1 - x0 + 1, bh = y1 - y0 + 1;
    const std::size_t bn = std::size_t(bw) * bh;
    inDisk.assign(bn, 0);
    num.assign(bn, 0.0);
    den.assign(bn, 0.0);
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        auto& v = d[std::size_t(y) * w + x];
        const double dx = x - seed.x, dy = y - seed.y;
        if (v == inf || dx * dx + dy * dy >= range2) continue;
        v *= penalty;
        const std::size_t b = std::size_t(y - y0) * bw + (x - x0);
        inDisk[b] = 1;
        num[b] = v;
        den[b] = 1.0;
      }

    // Separable normalized convolution: smooth(D*M) / smooth(M). Both passes
    // accumulate taps in ascending offset order and skip zero inputs, which
    // leaves every sum bit-identical to the direct per-pixel loop.
    numT.assign(bn, 0.0);
    denT.assign(bn, 0.0);
    for (int by = 0; by < bh; ++by) {
      const std::size_t rb = std::size_t(by) * bw;
      for (int j = 0; j < bw; ++j) {
        if (!inDisk[rb + j]) continue;
        const double nv = num[rb + j];
        const int lo = std::max(j - kr, 0), hi = std::min(j + kr, bw - 1);
        for (int bx = lo; bx <= hi; ++bx) {
          const double kv = kernel[std::size_t(j - bx + kr)];
          numT[rb + bx] += kv * nv;
          denT[rb + bx] += kv;
        }
      }
    }
    for (int by = 0; by < bh; ++by) {
      int first = bw, last = -1;
      for (int bx = 0; bx < bw; ++bx)
        if (inDisk[std::size_t(by) * bw + bx]) {
          first = std::min(first, bx);
          last = bx;
        }
      if (last < 0) continue;
      num.assign(std::size_t(last - first + 1), 0.0);
      den.assign(std::size_t(last - first + 1), 0.0);
      for (int t = std::max(-kr, -by); t <= std::min(kr, bh - 1 - by); ++t) {
        const double kv = kernel[std::size_t(t + kr)];
        const std::size_t rb = std::size_t(by + t) * bw;
        for (int bx = first; bx <= last; ++bx) {
          num[std::size_t(bx - first)] += kv * numT[rb + bx];
          den[std::size_t(bx - first)] += kv * denT[rb + bx];
        }
      }
      for (int bx = first; bx <= last; ++bx)
        if (inDisk[std::size_t(by) * bw + bx])
          d[std::size_t(by + y0) * w + (bx + x0)] = num[std::size_t(bx - first)] / den[std::size_t(bx - first)];
    }
    for (int y = y0; y <= y1; ++y) rescan(y);
  }
  return out;
}

}  // namespace dsr
