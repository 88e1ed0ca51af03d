#pragma once

// 2D discrete Fourier transforms: row-column decomposition over FFTW's 1D
// transforms, which handle arbitrary lengths exactly.

#include <complex>
#include <cstddef>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "dsr/error.hpp"
#include "dsr/image.hpp"

namespace dsr {

using Complex = std::complex<double>;

enum class Direction { forward, inverse };

// Row-major W x H grid of complex values, e.g. the spectrum of an image.
struct ComplexField {
  int width = 0;
  int height = 0;
  std::vector<Complex> values;

  ComplexField() = default;
  ComplexField(int w, int h) : width(w), height(h), values(checked(w, h)) {}

  std::size_t size() const { return values.size(); }
  Complex& at(int x, int y) { return values[std::size_t(y) * width + x]; }
  const Complex& at(int x, int y) const { return values[std::size_t(y) * width + x]; }

 private:
  static std::size_t checked(int w, int h) {
    if (w < 1 || h < 1) throw InvalidArgument("ComplexField: zero-sized field");
    return std::size_t(w) * std::size_t(h);
  }
};

namespace fft_detail {

// The FFTW planner is not thread-safe; execution is.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace fft_detail

// Forward is unnormalized; inverse carries 1/(W*H) so inverse(forward(x)) == x.
inline ComplexField dft2(ComplexField field, Direction dir) {
  int w = field.width;
  int h = field.height;
  if (w < 1 || h < 1 || field.size() != std::size_t(w) * std::size_t(h))
    throw InvalidArgument("dft2: zero-sized or inconsistent field");
  auto* data = reinterpret_cast<fftw_complex*>(field.values.data());
  const int sign = dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD;
  fftw_plan rows, cols;
  {
    std::lock_guard lock(fft_detail::planner_mutex());
    // h transforms of length w, contiguous; then w transforms of length h, strided.
    rows = fftw_plan_many_dft(1, &w, h, data, nullptr, 1, w, data, nullptr, 1, w, sign, FFTW_ESTIMATE);
    cols = fftw_plan_many_dft(1, &h, w, data, nullptr, w, 1, data, nullptr, w, 1, sign, FFTW_ESTIMATE);
  }
  if (!rows || !cols) throw Error("dft2: FFTW could not create a plan");
  fftw_execute(rows);
  fftw_execute(cols);
  {
    std::lock_guard lock(fft_detail::planner_mutex());
    fftw_destroy_plan(rows);
    fftw_destroy_plan(cols);
  }
  if (dir == Direction::inverse) {
    const double scale = 1.0 / (double(w) * double(h));
    for (auto& v : field.values) v *= scale;
  }
  return field;
}

inline ComplexField dft2(const ScalarField& field, Direction dir) {
  ComplexField c(field.width, field.height);
  for (std::size_t i = 0; i < field.size(); ++i) c.values[i] = field.values[i];
  return dft2(std::move(c), dir);
}

}  // namespace dsr
