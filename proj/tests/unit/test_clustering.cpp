#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "dsr/dsr.hpp"
#include "oracles.hpp"
#include "scenes.hpp"

using namespace dsr;
namespace dt = dsr::testing;

namespace {

DensityMap random_clamped_density(dt::Rng& rng, int w, int h) {
  DensityMap g{ScalarField(w, h)};
  for (auto& v : g.values.values) v = std::exp(std::clamp(rng.normal() * 1.5, -3.0, 3.0));
  return g;
}

// Centers at grid seeds, then moved once so they sit at sub-pixel positions.
ClusteringState prepared_state(const RasterImage& lab, int k) {
  auto st = init_state(lab, grid_seeds(lab, k));
  assign(st, lab, nullptr, grid_step(lab.size(), k), 10.0, Method::slic);
  update_centers(st, lab);
  return st;
}

LabelMap from_raw(int w, int h, std::vector<std::int32_t> raw) {
  int n = 0;
  for (auto v : raw) n = std::max(n, v + 1);
  return LabelMap(w, h, std::move(raw), n);
}

void expect_partition(const LabelMap& labels, int k) {
  EXPECT_LE(labels.num_labels(), k);
  for (int c : oracle::components_per_label(labels)) EXPECT_EQ(c, 1);
}

}  // namespace

TEST(Distance, HandExample) {
  const PixelFeature p{5, 0, 20, 0, 0};
  const ClusterCenter c{0, 0, 0, 0, 0, 0};
  EXPECT_NEAR(distance(p, c, 10.0, 10.0), std::sqrt(425.0), 1e-12);
  EXPECT_NEAR(std::sqrt(425.0), 20.6155, 1e-4);
}

TEST(Distance, ZeroAtCenterAndColorOnlyAsMVanishes) {
  const ClusterCenter c{3.5, 2.0, 50, 10, -20, 0};
  EXPECT_EQ(distance({3.5, 2.0, 50, 10, -20}, c, 7.0, 10.0), 0.0);
  const PixelFeature p{9, 9, 53, 14, -20};
  EXPECT_NEAR(distance(p, c, 7.0, 1e-9), 5.0, 1e-9);
}

TEST(Assign, MatchesExhaustiveSearch) {
  dt::Rng rng(1);
  for (int t = 0; t < 6; ++t) {
    const auto lab = dt::random_lab(rng, 32, 32);
    const auto g = random_clamped_density(rng, 32, 32);
    for (int k : {4, 8}) {
      const double S = grid_step(lab.size(), k);
      for (auto method : {Method::slic, Method::dsr}) {
        auto st = prepared_state(lab, k);
        const auto centers = st.centers;
        assign(st, lab, &g, S, 10.0, method);
        EXPECT_EQ(st.labels, oracle::brute_assign(lab, centers, &g, S, 10.0, method));
        for (std::size_t i = 0; i < st.labels.size(); ++i) {
          if (st.labels[i] == kUnassigned) continue;
          const int x = int(i % 32), y = int(i / 32);
          const auto px = lab.pixel(x, y);
          EXPECT_EQ(st.distances[i], distance({double(x), double(y), px[0], px[1], px[2]},
                                              centers[std::size_t(st.labels[i])], S, 10.0));
        }
      }
    }
  }
}

TEST(Assign, SixteenByFourCentersUnitDensity) {
  dt::Rng rng(2);
  const auto lab = dt::random_lab(rng, 16, 16);
  const DensityMap g{ScalarField(16, 16, 1.0)};
  auto st = init_state(lab, grid_seeds(lab, 4));
  const auto centers = st.centers;
  assign(st, lab, &g, 8.0, 10.0, Method::dsr);
  EXPECT_EQ(st.labels, oracle::brute_assign(lab, centers, &g, 8.0, 10.0, Method::slic));
}

TEST(Assign, UnitDensityReducesToSlic) {
  dt::Rng rng(3);
  const auto lab = dt::random_lab(rng, 40, 28);
  const DensityMap g{ScalarField(40, 28, 1.0)};
  auto a = prepared_state(lab, 12);
  auto b = a;
  assign(a, lab, nullptr, grid_step(lab.size(), 12), 10.0, Method::slic);
  assign(b, lab, &g, grid_step(lab.size(), 12), 10.0, Method::dsr);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.distances, b.distances);
}

TEST(Assign, SingleCenterCoversOnlyItsWindow) {
  dt::Rng rng(4);
  const auto lab = dt::random_lab(rng, 20, 20);
  ClusteringState st = init_state(lab, SeedSet{{{5, 5}}, 2.0});
  assign(st, lab, nullptr, 2.0, 10.0, Method::slic);
  for (int y = 0; y < 20; ++y)
    for (int x = 0; x < 20; ++x) {
      const bool inside = std::abs(x - 5) <= 4 && std::abs(y - 5) <= 4;
      EXPECT_EQ(st.labels[std::size_t(y) * 20 + x], inside ? 0 : kUnassigned) << x << "," << y;
    }
}

TEST(Assign, SmallDensityShrinksWindow) {
  dt::Rng rng(5);
  const auto lab = dt::random_lab(rng, 20, 20);
  DensityMap g{ScalarField(20, 20, 1.0)};
  g.values.at(10, 10) = 0.25;
  ClusteringState st = init_state(lab, SeedSet{{{10, 10}}, 4.0});
  assign(st, lab, &g, 4.0, 10.0, Method::dsr);
  for (int y = 0; y < 20; ++y)
    for (int x = 0; x < 20; ++x) {
      const bool inside = std::abs(x - 10) <= 2 && std::abs(y - 10) <= 2;
      EXPECT_EQ(st.labels[std::size_t(y) * 20 + x] == 0, inside);
    }
}

TEST(Assign, DsrRequiresDensity) {
  const RasterImage lab(8, 8, ColorSpace::LabF64);
  auto st = init_state(lab, SeedSet{{{2, 2}}, 4.0});
  EXPECT_THROW(assign(st, lab, nullptr, 4.0, 10.0, Method::dsr), InvalidArgument);
  const DensityMap wrong{ScalarField(4, 8, 1.0)};
  EXPECT_THROW(assign(st, lab, &wrong, 4.0, 10.0, Method::dsr), InvalidArgument);
}

TEST(UpdateCenters, TwoPointMean) {
  RasterImage lab(3, 2, ColorSpace::LabF64);
  lab.set_pixel(0, 0, {10, 2, 4});
  lab.set_pixel(2, 0, {30, 4, 8});
  ClusteringState st = init_state(lab, SeedSet{{{0, 0}}, 1.0});
  st.labels = {0, kUnassigned, 0, kUnassigned, kUnassigned, kUnassigned};
  update_centers(st, lab);
  EXPECT_EQ(st.centers[0].x, 1.0);
  EXPECT_EQ(st.centers[0].y, 0.0);
  EXPECT_EQ(st.centers[0].l, 20.0);
  EXPECT_EQ(st.centers[0].a, 3.0);
  EXPECT_EQ(st.centers[0].b, 6.0);
  EXPECT_EQ(st.residualError, 1.0);
}

TEST(UpdateCenters, FixedPointHasZeroResidual) {
  dt::Rng rng(6);
  const auto lab = dt::random_lab(rng, 24, 24);
  auto st = prepared_state(lab, 9);
  update_centers(st, lab);
  EXPECT_EQ(st.residualError, 0.0);
}

TEST(UpdateCenters, EmptyClusterKeepsCenter) {
  const RasterImage lab(4, 4, ColorSpace::LabF64);
  ClusteringState st = init_state(lab, SeedSet{{{0, 0}, {3, 3}}, 2.0});
  std::fill(st.labels.begin(), st.labels.end(), 0);
  update_centers(st, lab);
  EXPECT_EQ(st.centers[1].x, 3.0);
  EXPECT_EQ(st.centers[1].y, 3.0);
  EXPECT_DOUBLE_EQ(st.residualError, std::hypot(1.5, 1.5) / 2.0);
}

TEST(UpdateCenters, ConvergesToBlobCentroids) {
  const auto scene = dt::make_four_blocks(24);
  const auto lab = srgb_to_lab(scene.image);
  auto st = init_state(lab, SeedSet{{{3, 4}, {15, 2}, {2, 20}, {20, 17}}, 12.0});
  for (int i = 0; i < 10; ++i) {
    assign(st, lab, nullptr, 12.0, 10.0, Method::slic);
    update_centers(st, lab);
  }
  EXPECT_EQ(st.residualError, 0.0);
  const double cx[4] = {5.5, 17.5, 5.5, 17.5}, cy[4] = {5.5, 5.5, 17.5, 17.5};
  for (int c = 0; c < 4; ++c) {
    EXPECT_NEAR(st.centers[std::size_t(c)].x, cx[c], 1e-9);
    EXPECT_NEAR(st.centers[std::size_t(c)].y, cy[c], 1e-9);
  }
}

TEST(ResolveOrphans, NoOrphansIsIdentity) {
  ClusteringState st;
  st.width = 3;
  st.height = 2;
  st.labels = {0, 1, 1, 2, 2, 0};
  EXPECT_EQ(resolve_orphans(st), st.labels);
}

TEST(ResolveOrphans, SurroundedPixelTakesNeighborLabel) {
  ClusteringState st;
  st.width = st.height = 3;
  st.labels = {3, 3, 3, 3, kUnassigned, 3, 3, 3, 3};
  EXPECT_EQ(resolve_orphans(st)[4], 3);
}

TEST(ResolveOrphans, TieGoesToSmallestLabel) {
  ClusteringState st;
  st.width = 5;
  st.height = 1;
  st.labels = {5, 5, kUnassigned, 2, 2};
  EXPECT_EQ(resolve_orphans(st)[2], 2);
  st.labels = {5, kUnassigned, kUnassigned, kUnassigned, 2};
  EXPECT_EQ(resolve_orphans(st), (std::vector<std::int32_t>{5, 5, 2, 2, 2}));
}

TEST(ResolveOrphans, NearestByPathDistance) {
  ClusteringState st;
  st.width = 6;
  st.height = 1;
  st.labels = {1, kUnassigned, kUnassigned, kUnassigned, kUnassigned, 4};
  EXPECT_EQ(resolve_orphans(st), (std::vector<std::int32_t>{1, 1, 1, 4, 4, 4}));
}

TEST(EnforceConnectivity, ConnectedMapUnchanged) {
  const auto gt = dt::make_four_blocks(16).truth.regions;
  EXPECT_EQ(enforce_connectivity(gt, 10), gt);
}

TEST(EnforceConnectivity, SmallStrayComponentJoinsItsOnlyNeighbor) {
  // Label 1 fills the right half (50 pixels); three stray label-1 pixels sit
  // inside label 0 on the left.
  std::vector<std::int32_t> raw(100, 0);
  for (int y = 0; y < 10; ++y)
    for (int x = 5; x < 10; ++x) raw[std::size_t(y) * 10 + x] = 1;
  raw[2 * 10 + 1] = raw[2 * 10 + 2] = raw[3 * 10 + 1] = 1;
  const auto out = enforce_connectivity(from_raw(10, 10, raw), 100 / (4 * 2));
  EXPECT_EQ(out.at(1, 2), 0);
  EXPECT_EQ(out.at(2, 2), 0);
  EXPECT_EQ(out.at(1, 3), 0);
  EXPECT_EQ(out.at(7, 7), 1);
  EXPECT_EQ(out.num_labels(), 2);
}

TEST(EnforceConnectivity, CheckerboardCollapses) {
  std::vector<std::int32_t> raw(16);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) raw[std::size_t(y) * 4 + x] = (x + y) % 2;
  const auto out = enforce_connectivity(from_raw(4, 4, raw), 1);
  expect_partition(out, 2);
}

TEST(EnforceConnectivity, LongestBoundaryWins) {
  // A 1x2 fragment of label 2 touches label 0 on three sides and label 1 on one.
  const std::vector<std::int32_t> raw{
      0, 0, 0, 0, 1,  //
      0, 2, 2, 1, 1,  //
      0, 0, 0, 0, 1,  //
      0, 0, 0, 0, 1};
  const auto out = enforce_connectivity(from_raw(5, 4, raw), 3);
  EXPECT_EQ(out.at(1, 1), 0);
  EXPECT_EQ(out.at(2, 1), 0);
  EXPECT_EQ(out.num_labels(), 2);
}

TEST(Segment, FourBlocksRecoveredByBothMethods) {
  const auto scene = dt::make_four_blocks(32);
  ClusteringParams p;
  p.k = 4;
  for (auto method : {Method::slic, Method::dsr}) {
    p.method = method;
    const auto r = run_superpixels(scene.image, p);
    EXPECT_LE(r.segmentation.iterations, 10);
    EXPECT_EQ(underseg_error(scene.truth, r.segmentation.labels), 0.0) << to_string(method);
    EXPECT_EQ(boundary_recall(scene.truth, r.segmentation.labels), 1.0) << to_string(method);
  }
}

TEST(Segment, UnitDensitySameSeedsMatchesSlic) {
  dt::Rng rng(7);
  const auto img = dt::random_srgb(rng, 48, 36);
  const auto lab = srgb_to_lab(img);
  const DensityMap g{ScalarField(48, 36, 1.0)};
  const auto seeds = grid_seeds(lab, 20);
  ClusteringParams p;
  p.k = 20;
  const auto a = segment_from_seeds(lab, p, nullptr, seeds);
  p.method = Method::dsr;
  const auto b = segment_from_seeds(lab, p, &g, seeds);
  EXPECT_EQ(a.labels, b.labels);
}

TEST(Segment, PartitionContractOnScenes) {
  const auto scene = dt::make_scene(3, 160, 120);
  ClusteringParams p;
  for (auto method : {Method::slic, Method::dsr})
    for (int k : {16, 100, 300}) {
      p.method = method;
      p.k = k;
      const auto r = run_superpixels(scene.image, p);
      EXPECT_LE(r.segmentation.iterations, p.maxIters);
      expect_partition(r.segmentation.labels, k);
    }
}

TEST(Segment, ConstantImagePartition) {
  const RasterImage img(30, 20, ColorSpace::sRGB8, std::vector<double>(30 * 20 * 3, 90.0));
  ClusteringParams p;
  for (int k : {4, 10, 150}) {
    p.k = k;
    for (auto method : {Method::slic, Method::dsr}) {
      p.method = method;
      expect_partition(run_superpixels(img, p).segmentation.labels, k);
    }
  }
}

TEST(Segment, ValidatesParameters) {
  const RasterImage img(16, 16, ColorSpace::sRGB8);
  ClusteringParams p;
  p.k = 4;
  p.method = Method::dsr;
  EXPECT_THROW(segment(img, p), InvalidArgument);
  p.method = Method::slic;
  p.m = 0.0;
  EXPECT_THROW(segment(img, p), InvalidArgument);
  p.m = 10.0;
  p.maxIters = 0;
  EXPECT_THROW(segment(img, p), InvalidArgument);
  p.maxIters = 10;
  p.k = 65;
  EXPECT_THROW(segment(img, p), InvalidArgument);
}

TEST(Method, ParseAndPrint) {
  EXPECT_EQ(parse_method("slic"), Method::slic);
  EXPECT_EQ(parse_method("dsr"), Method::dsr);
  EXPECT_STREQ(to_string(Method::dsr), "dsr");
  EXPECT_THROW(parse_method("SLIC"), InvalidArgument);
}
