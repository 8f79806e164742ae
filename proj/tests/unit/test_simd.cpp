#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "skyris/rng.hpp"
#include "skyris/simd/kernels.hpp"

using namespace skyris;
using simd::cplx;

namespace {

std::vector<double> randv(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = standard_normal(rng);
  return v;
}

std::vector<cplx> randc(Rng& rng, std::size_t n) {
  std::vector<cplx> v(n);
  for (auto& x : v) x = cscg(rng, 1.0);
  return v;
}

void close(double a, double b, double scale) { CHECK(std::abs(a - b) <= 1e-13 * std::max(1.0, scale)); }

}  // namespace

TEST_SUITE("simd") {

TEST_CASE("scalar table is always available") {
  CHECK(simd::isa_supported(simd::Isa::scalar));
  CHECK(simd::table(simd::Isa::scalar).dot != nullptr);
}

TEST_CASE("vector kernels agree with the scalar reference") {
  if (!simd::isa_supported(simd::Isa::avx2)) {
    MESSAGE("AVX2 not available on this CPU; nothing to compare");
    return;
  }
  const auto& ref = simd::table(simd::Isa::scalar);
  const auto& vec = simd::table(simd::Isa::avx2);
  Rng rng(123);
  for (std::size_t n = 0; n <= 67; ++n) {
    CAPTURE(n);
    const auto a = randv(rng, n), b = randv(rng, n);
    close(ref.dot(a.data(), b.data(), n), vec.dot(a.data(), b.data(), n), static_cast<double>(n));

    auto y1 = randv(rng, n);
    auto y2 = y1;
    ref.axpy(0.7, a.data(), y1.data(), n);
    vec.axpy(0.7, a.data(), y2.data(), n);
    for (std::size_t k = 0; k < n; ++k) close(y1[k], y2[k], 1.0);

    const auto ca = randc(rng, n), cb = randc(rng, n);
    const cplx u1 = ref.cdotu(ca.data(), cb.data(), n), u2 = vec.cdotu(ca.data(), cb.data(), n);
    const cplx c1 = ref.cdotc(ca.data(), cb.data(), n), c2 = vec.cdotc(ca.data(), cb.data(), n);
    close(u1.real(), u2.real(), n);
    close(u1.imag(), u2.imag(), n);
    close(c1.real(), c2.real(), n);
    close(c1.imag(), c2.imag(), n);
    close(ref.cnorm2(ca.data(), n), vec.cnorm2(ca.data(), n), n);
  }
  for (std::size_t rows : {1u, 3u, 8u, 13u})
    for (std::size_t cols : {1u, 4u, 7u, 16u, 33u}) {
      CAPTURE(rows);
      CAPTURE(cols);
      const auto w = randv(rng, rows * cols), x = randv(rng, cols), g = randv(rng, rows);
      std::vector<double> y1(rows), y2(rows);
      ref.gemv(w.data(), rows, cols, x.data(), y1.data());
      vec.gemv(w.data(), rows, cols, x.data(), y2.data());
      for (std::size_t k = 0; k < rows; ++k) close(y1[k], y2[k], cols);

      auto dx1 = randv(rng, cols);
      auto dx2 = dx1;
      ref.gemv_t_acc(w.data(), rows, cols, g.data(), dx1.data());
      vec.gemv_t_acc(w.data(), rows, cols, g.data(), dx2.data());
      for (std::size_t k = 0; k < cols; ++k) close(dx1[k], dx2[k], rows);

      auto dw1 = randv(rng, rows * cols);
      auto dw2 = dw1;
      ref.ger_acc(dw1.data(), rows, cols, g.data(), x.data());
      vec.ger_acc(dw2.data(), rows, cols, g.data(), x.data());
      for (std::size_t k = 0; k < rows * cols; ++k) close(dw1[k], dw2[k], 1.0);
    }
}

TEST_CASE("scalar kernels match hand values") {
  const auto& k = simd::table(simd::Isa::scalar);
  const double a[] = {1, 2, 3}, b[] = {4, 5, 6};
  CHECK(k.dot(a, b, 3) == 32.0);
  const double w[] = {1, 2, 3, 4, 5, 6};  // 2 x 3
  double y[2];
  k.gemv(w, 2, 3, a, y);
  CHECK(y[0] == 14.0);
  CHECK(y[1] == 32.0);
  const cplx ca[] = {{1, 1}, {0, 2}}, cb[] = {{2, 0}, {1, -1}};
  CHECK(k.cdotu(ca, cb, 2) == cplx(2 + 2, 2 + 2));
  CHECK(k.cdotc(ca, cb, 2) == cplx(2 - 2, -2 - 2));
  CHECK(k.cnorm2(ca, 2) == 6.0);
}

TEST_CASE("forcing the scalar path switches the active table") {
  const simd::Isa before = simd::active_isa();
  simd::set_active_isa(simd::Isa::scalar);
  CHECK(simd::active_isa() == simd::Isa::scalar);
  CHECK(&simd::active() == &simd::table(simd::Isa::scalar));
  simd::set_active_isa(before);
}

}
