#pragma once

// Exact squared Euclidean distance transform (Felzenszwalb-Huttenlocher).
// Squared distances between pixels are integers, so results are exact.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace dsr {

namespace distance_detail {

inline constexpr double kFar = std::numeric_limits<double>::infinity();

// Felzenszwalb-Huttenlocher lower envelope of parabolas, 1D.
inline void edt_1d(const double* f, double* d, int n, int* v, double* z) {
  int k = 0;
  v[0] = 0;
  z[0] = -kFar;
  z[1] = kFar;
  int first = -1;
  for (int q = 0; q < n; ++q)
    if (f[q] < kFar) {
      first = q;
      break;
    }
  if (first < 0) {
    std::fill(d, d + n, kFar);
    return;
  }
  v[0] = first;
  for (int q = first + 1; q < n; ++q) {
    if (f[q] == kFar) continue;
    double s;
    while (true) {
      const int p = v[k];
      s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
      if (s <= z[k] && k > 0) {
        --k;
        continue;
      }
      break;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kFar;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = double(q - v[k]);
    d[q] = dq * dq + f[v[k]];
  }
}

}  // namespace distance_detail

// Squared Euclidean distance from every pixel to the nearest set pixel of
// `mask` (+inf everywhere when the mask is empty).
inline std::vector<double> squared_distance_transform(std::span<const char> mask, int w, int h) {
  using distance_detail::kFar;
  std::vector<double> g(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) g[i] = mask[i] ? 0.0 : kFar;
  const int n = std::max(w, h);
  const auto len = std::size_t(n);
  std::vector<double> f(len), d(len), z(len + 1);
  std::vector<int> v(len);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) f[std::size_t(y)] = g[std::size_t(y) * w + x];
    distance_detail::edt_1d(f.data(), d.data(), h, v.data(), z.data());
    for (int y = 0; y < h; ++y) g[std::size_t(y) * w + x] = d[std::size_t(y)];
  }
  for (int y = 0; y < h; ++y) {
    std::copy_n(g.begin() + std::ptrdiff_t(y) * w, w, f.begin());
    distance_detail::edt_1d(f.data(), d.data(), w, v.data(), z.data());
    std::copy_n(d.begin(), w, g.begin() + std::ptrdiff_t(y) * w);
  }
  return g;
}

}  // namespace dsr
