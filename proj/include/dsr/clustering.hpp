#pragma once

// Restricted-search Lloyd iteration over (x, y, l, a, b) features.
//
// Each center only competes for pixels inside an axis-aligned square of
// half-width R_i around it: R_i = 2S for SLIC, 2S * G(center) for the
// density-driven variant. Pixels reached by no window stay unassigned until
// resolve_orphans; enforce_connectivity then turns every label into a single
// 4-connected region.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "dsr/error.hpp"
#include "dsr/image.hpp"
#include "dsr/seeding.hpp"
#include "dsr/spectral.hpp"

namespace dsr {

enum class Method { slic, dsr };

inline const char* to_string(Method m) { return m == Method::slic ? "slic" : "dsr"; }

inline Method parse_method(const std::string& s) {
  if (s == "slic") return Method::slic;
  if (s == "dsr") return Method::dsr;
  throw InvalidArgument("unknown method '" + s + "' (expected slic or dsr)");
}

struct ClusteringParams {
  int k = 400;
  double m = 10.0;
  int maxIters = 10;
  double convergenceTol = 0.25;  // mean center displacement, pixels
  Method method = Method::slic;
  double tau = kDefaultTau;  // density seeding smoothing, dsr only

  void validate() const {
    if (k < 4) throw InvalidArgument("ClusteringParams: k must be >= 4");
    if (!(m > 0.0)) throw InvalidArgument("ClusteringParams: m must be positive");
    if (maxIters < 1) throw InvalidArgument("ClusteringParams: maxIters must be >= 1");
  }
};

struct PixelFeature {
  double x, y, l, a, b;
};

struct ClusterCenter {
  double x = 0, y = 0;
  double l = 0, a = 0, b = 0;
  int id = 0;
};

inline constexpr std::int32_t kUnassigned = -1;

struct ClusteringState {
  int width = 0;
  int height = 0;
  std::vector<ClusterCenter> centers;
  std::vector<std::int32_t> labels;  // kUnassigned where no window reached
  std::vector<double> distances;     // +inf where unassigned
  double residualError = std::numeric_limits<double>::infinity();
  int iteration = 0;
};

// sqrt(d_c^2 + (d_s / S)^2 m^2)
inline double distance(const PixelFeature& p, const ClusterCenter& c, double S, double m) {
  const double dl = p.l - c.l, da = p.a - c.a, db = p.b - c.b;
  const double dx = p.x - c.x, dy = p.y - c.y;
  const double dc2 = dl * dl + da * da + db * db;
  const double ds2 = dx * dx + dy * dy;
  return std::sqrt(dc2 + ds2 / (S * S) * m * m);
}

inline ClusteringState init_state(const RasterImage& lab, const SeedSet& seeds) {
  ClusteringState st;
  st.width = lab.width();
  st.height = lab.height();
  for (std::size_t i = 0; i < seeds.seeds.size(); ++i) {
    const auto s = seeds.seeds[i];
    const auto c = lab.pixel(s.x, s.y);
    st.centers.push_back({double(s.x), double(s.y), c[0], c[1], c[2], int(i)});
  }
  st.labels.assign(lab.size(), kUnassigned);
  st.distances.assign(lab.size(), std::numeric_limits<double>::infinity());
  return st;
}

// Half-width of the square search window of a center.
inline double search_radius(const ClusterCenter& c, const DensityMap* density, double S,
                            Method method, int width, int height) {
  if (method == Method::slic) return 2.0 * S;
  if (!density) throw InvalidArgument("search_radius: dsr requires a density map");
  const int gx = std::clamp(int(std::lround(c.x)), 0, width - 1);
  const int gy = std::clamp(int(std::lround(c.y)), 0, height - 1);
  return 2.0 * S * density->at(gx, gy);
}

// One assignment pass. Each pixel takes the candidate center minimizing
// (distance, id); centers are visited in id order with a strict comparison.
inline void assign(ClusteringState& st, const RasterImage& lab, const DensityMap* density, double S,
                   double m, Method method) {
  if (method == Method::dsr &&
      (!density || density->width() != lab.width() || density->height() != lab.height()))
    throw InvalidArgument("assign: dsr requires a density map matching the image");
  const int w = lab.width();
  const int h = lab.height();
  std::fill(st.labels.begin(), st.labels.end(), kUnassigned);
  std::fill(st.distances.begin(), st.distances.end(), std::numeric_limits<double>::infinity());
  const auto data = lab.data();
  for (const auto& c : st.centers) {
    const double r = search_radius(c, density, S, method, w, h);
    const int x0 = std::max(0, int(std::ceil(c.x - r)));
    const int x1 = std::min(w - 1, int(std::floor(c.x + r)));
    const int y0 = std::max(0, int(std::ceil(c.y - r)));
    const int y1 = std::min(h - 1, int(std::floor(c.y + r)));
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        const std::size_t i = std::size_t(y) * w + x;
        const PixelFeature f{double(x), double(y), data[3 * i], data[3 * i + 1], data[3 * i + 2]};
        const double d = distance(f, c, S, m);
        if (d < st.distances[i]) {
          st.distances[i] = d;
          st.labels[i] = c.id;
        }
      }
  }
}

// Moves every center to the mean feature of its pixels; centers without
// pixels stay put. Returns (and stores) the mean spatial displacement.
inline double update_centers(ClusteringState& st, const RasterImage& lab) {
  struct Acc {
    double x = 0, y = 0, l = 0, a = 0, b = 0;
    std::size_t n = 0;
  };
  std::vector<Acc> acc(st.centers.size());
  const auto data = lab.data();
  for (int y = 0; y < st.height; ++y)
    for (int x = 0; x < st.width; ++x) {
      const std::size_t i = std::size_t(y) * st.width + x;
      const auto l = st.labels[i];
      if (l == kUnassigned) continue;
      auto& s = acc[std::size_t(l)];
      s.x += x;
      s.y += y;
      s.l += data[3 * i];
      s.a += data[3 * i + 1];
      s.b += data[3 * i + 2];
      ++s.n;
    }
  double moved = 0.0;
  for (std::size_t c = 0; c < st.centers.size(); ++c) {
    const auto& s = acc[c];
    if (s.n == 0) continue;
    auto& ctr = st.centers[c];
    const double n = double(s.n);
    const double nx = s.x / n, ny = s.y / n;
    moved += std::hypot(nx - ctr.x, ny - ctr.y);
    ctr.x = nx;
    ctr.y = ny;
    ctr.l = s.l / n;
    ctr.a = s.a / n;
    ctr.b = s.b / n;
  }
  st.residualError = st.centers.empty() ? 0.0 : moved / double(st.centers.size());
  return st.residualError;
}

// Gives each unassigned pixel the label of its nearest assigned pixel in
// 4-connected path distance (multi-source BFS); ties go to the smallest label.
inline std::vector<std::int32_t> resolve_orphans(const ClusteringState& st) {
  const int w = st.width;
  const int h = st.height;
  std::vector<std::int32_t> out = st.labels;
  std::vector<std::size_t> frontier;
  bool anyUnassigned = false;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] != kUnassigned)
      frontier.push_back(i);
    else
      anyUnassigned = true;
  }
  if (!anyUnassigned) return out;
  if (frontier.empty()) throw InvalidArgument("resolve_orphans: no pixel is assigned");

  std::vector<std::int32_t> pending(out.size(), std::numeric_limits<std::int32_t>::max());
  std::vector<std::size_t> next;
  while (!frontier.empty()) {
    next.clear();
    for (auto i : frontier) {
      const int x = int(i % std::size_t(w)), y = int(i / std::size_t(w));
      auto visit = [&](std::size_t j) {
        if (out[j] != kUnassigned) return;
        if (pending[j] == std::numeric_limits<std::int32_t>::max()) next.push_back(j);
        pending[j] = std::min(pending[j], out[i]);
      };
      if (x > 0) visit(i - 1);
      if (x + 1 < w) visit(i + 1);
      if (y > 0) visit(i - std::size_t(w));
      if (y + 1 < h) visit(i + std::size_t(w));
    }
    for (auto j : next) out[j] = pending[j];
    frontier.swap(next);
  }
  return out;
}

namespace clustering_detail {

struct Components {
  std::vector<std::int32_t> comp;  // per pixel
  std::vector<std::int32_t> label;
  std::vector<long> size;
};

// 4-connected components numbered in raster order of their first pixel.
inline Components label_components(const LabelMap& labels) {
  const int w = labels.width();
  const int h = labels.height();
  Components c;
  c.comp.assign(labels.size(), -1);
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < labels.size(); ++start) {
    if (c.comp[start] != -1) continue;
    const auto id = std::int32_t(c.label.size());
    const auto lab = labels.labels()[start];
    c.label.push_back(lab);
    c.size.push_back(0);
    c.comp[start] = id;
    stack.assign(1, start);
    while (!stack.empty()) {
      const auto i = stack.back();
      stack.pop_back();
      ++c.size.back();
      const int x = int(i % std::size_t(w)), y = int(i / std::size_t(w));
      auto push = [&](std::size_t j) {
        if (c.comp[j] == -1 && labels.labels()[j] == lab) {
          c.comp[j] = id;
          stack.push_back(j);
        }
      };
      if (x > 0) push(i - 1);
      if (x + 1 < w) push(i + 1);
      if (y > 0) push(i - std::size_t(w));
      if (y + 1 < h) push(i + std::size_t(w));
    }
  }
  return c;
}

}  // namespace clustering_detail

inline int count_components(const LabelMap& labels) {
  return int(clustering_detail::label_components(labels).label.size());
}

// Every 4-connected component smaller than `minSize`, and every component
// that is not the largest of its label, is merged into the adjacent component
// sharing the longest boundary (ties: smallest label, then earliest
// component). Components are processed smallest first. The result is
// compacted to 0..k'-1 preserving label order.
inline LabelMap enforce_connectivity(const LabelMap& labels, long minSize) {
  using clustering_detail::label_components;
  const int w = labels.width();
  const int h = labels.height();
  auto comps = label_components(labels);
  const std::size_t nc = comps.label.size();

  std::vector<std::map<std::int32_t, long>> adj(nc);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const auto a = comps.comp[std::size_t(y) * w + x];
      if (x + 1 < w) {
        const auto b = comps.comp[std::size_t(y) * w + x + 1];
        if (a != b) ++adj[std::size_t(a)][b], ++adj[std::size_t(b)][a];
      }
      if (y + 1 < h) {
        const auto b = comps.comp[std::size_t(y + 1) * w + x];
        if (a != b) ++adj[std::size_t(a)][b], ++adj[std::size_t(b)][a];
      }
    }

  std::vector<std::int32_t> largest(std::size_t(labels.num_labels()), -1);
  for (std::size_t c = 0; c < nc; ++c) {
    auto& best = largest[std::size_t(comps.label[c])];
    if (best == -1 || comps.size[c] > comps.size[std::size_t(best)]) best = std::int32_t(c);
  }
  std::vector<char> kept(nc, 0);
  for (auto c : largest)
    if (c != -1 && comps.size[std::size_t(c)] >= minSize) kept[std::size_t(c)] = 1;

  std::vector<std::int32_t> parent(nc);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::int32_t c) {
    while (parent[std::size_t(c)] != c) c = parent[std::size_t(c)] = parent[std::size_t(parent[std::size_t(c)])];
    return c;
  };

  std::vector<std::int32_t> order;
  for (std::size_t c = 0; c < nc; ++c)
    if (!kept[c]) order.push_back(std::int32_t(c));
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return comps.size[std::size_t(a)] < comps.size[std::size_t(b)];
  });

  for (auto c : order) {
    if (find(c) != c) continue;  // already absorbed
    auto& nbrs = adj[std::size_t(c)];
    if (nbrs.empty()) continue;  // the whole image
    std::int32_t target = -1;
    for (const auto& [n, len] : nbrs) {
      if (target == -1) {
        target = n;
        continue;
      }
      const long bestLen = nbrs.at(target);
      const auto nl = comps.label[std::size_t(n)], tl = comps.label[std::size_t(target)];
      if (len > bestLen || (len == bestLen && (nl < tl || (nl == tl && n < target)))) target = n;
    }
    // Merge c into target; target keeps its label.
    auto& tAdj = adj[std::size_t(target)];
    for (const auto& [n, len] : nbrs) {
      if (n == target) continue;
      tAdj[n] += len;
      auto& nAdj = adj[std::size_t(n)];
      nAdj.erase(c);
      nAdj[target] += len;
    }
    tAdj.erase(c);
    nbrs.clear();
    parent[std::size_t(c)] = target;
    comps.size[std::size_t(target)] += comps.size[std::size_t(c)];
  }

  std::vector<std::int32_t> out(labels.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = comps.label[std::size_t(find(comps.comp[i]))];
  return LabelMap::compacted(w, h, std::move(out));
}

inline long default_min_size(std::size_t numPixels, int k) { return long(numPixels / (4 * std::size_t(k))); }

struct SegmentResult {
  LabelMap labels;
  SeedSet seeds;
  int iterations = 0;
  double residualError = 0.0;
};

// Lloyd loop from given seeds on a Lab image, then orphan resolution and
// connectivity enforcement.
inline SegmentResult segment_from_seeds(const RasterImage& lab, const ClusteringParams& p,
                                        const DensityMap* density, const SeedSet& seeds) {
  p.validate();
  if (lab.colorspace() != ColorSpace::LabF64)
    throw InvalidArgument("segment_from_seeds: image must be Lab");
  if (p.method == Method::dsr && !density)
    throw InvalidArgument("segment: method dsr requires a density map");
  const double S = grid_step(lab.size(), p.k);
  auto st = init_state(lab, seeds);
  do {
    assign(st, lab, density, S, p.m, p.method);
    update_centers(st, lab);
    ++st.iteration;
  } while (st.residualError >= p.convergenceTol && st.iteration < p.maxIters);

  auto total = LabelMap::compacted(lab.width(), lab.height(), resolve_orphans(st));
  SegmentResult r;
  r.labels = enforce_connectivity(total, default_min_size(lab.size(), p.k));
  r.seeds = seeds;
  r.iterations = st.iteration;
  r.residualError = st.residualError;
  return r;
}

// Full pipeline: Lab conversion (if needed), seeding by method, clustering.
inline SegmentResult segment(const RasterImage& img, const ClusteringParams& p,
                             const DensityMap* density = nullptr) {
  p.validate();
  const RasterImage lab = img.colorspace() == ColorSpace::LabF64 ? img : srgb_to_lab(img);
  check_superpixel_count(lab.size(), p.k);
  if (p.method == Method::dsr) {
    if (!density) throw InvalidArgument("segment: method dsr requires a density map");
    if (density->width() != lab.width() || density->height() != lab.height())
      throw InvalidArgument("segment: density map size differs from the image");
    return segment_from_seeds(lab, p, density, density_seeds(*density, p.k, p.tau));
  }
  return segment_from_seeds(lab, p, density, grid_seeds(lab, p.k));
}

}  // namespace dsr
