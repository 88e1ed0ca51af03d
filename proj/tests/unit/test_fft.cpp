#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dsr/fft.hpp"
#include "scenes.hpp"

namespace {

using dsr::Complex;
using dsr::ComplexField;
using dsr::Direction;

ComplexField naive_dft2(const ComplexField& in, Direction dir) {
  const int w = in.width, h = in.height;
  const double sign = dir == Direction::forward ? -1.0 : 1.0;
  ComplexField out(w, h);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      Complex acc;
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          const double a = sign * 2.0 * std::numbers::pi * (double(u * x) / w + double(v * y) / h);
          acc += in.at(x, y) * Complex(std::cos(a), std::sin(a));
        }
      out.at(u, v) = dir == Direction::inverse ? acc / double(w * h) : acc;
    }
  return out;
}

ComplexField random_complex(dsr::testing::Rng& rng, int w, int h) {
  ComplexField f(w, h);
  for (auto& v : f.values) v = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
  return f;
}

class FftSizes : public ::testing::TestWithParam<std::pair<int, int>> {};

TEST_P(FftSizes, MatchesNaiveDftBothDirections) {
  const auto [w, h] = GetParam();
  dsr::testing::Rng rng(std::uint64_t(w * 1000 + h));
  const auto x = random_complex(rng, w, h);
  for (auto dir : {Direction::forward, Direction::inverse}) {
    const auto fast = dsr::dft2(x, dir);
    const auto slow = naive_dft2(x, dir);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(std::abs(fast.values[i] - slow.values[i]), 0.0, 1e-9);
  }
}

INSTANTIATE_TEST_SUITE_P(Shapes, FftSizes,
                         ::testing::Values(std::pair{1, 1}, std::pair{2, 2}, std::pair{8, 8},
                                           std::pair{7, 5}, std::pair{12, 9}, std::pair{67, 3},
                                           std::pair{3, 97}));

TEST(Fft, RoundTripAndParseval) {
  dsr::testing::Rng rng(5);
  const auto x = random_complex(rng, 481, 321);
  const auto spec = dsr::dft2(x, Direction::forward);
  const auto back = dsr::dft2(spec, Direction::inverse);
  double ex = 0, es = 0, err = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    ex += std::norm(x.values[i]);
    es += std::norm(spec.values[i]);
    err = std::max(err, std::abs(back.values[i] - x.values[i]));
  }
  EXPECT_LT(err, 1e-12);
  EXPECT_NEAR(es / double(x.size()), ex, 1e-9 * ex);
}

TEST(Fft, RejectsInconsistentField) {
  ComplexField f;
  EXPECT_THROW(dsr::dft2(f, Direction::forward), dsr::InvalidArgument);
}

}  // namespace
