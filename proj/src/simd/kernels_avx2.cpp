// Compiled with -mavx2 -mfma; only reachable after a runtime CPU check.
#include <immintrin.h>

#include "skyris/simd/kernels.hpp"

namespace skyris::simd::detail {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k + 4), _mm256_loadu_pd(b + k + 4), acc1);
  }
  for (; k + 4 <= n; k += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) s += a[k] * b[k];
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4)
    _mm256_storeu_pd(y + k, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k)));
  for (; k < n; ++k) y[k] += alpha * x[k];
}

void gemv_avx2(const double* w, std::size_t rows, std::size_t cols, const double* x, double* y) {
  std::size_t r = 0;
  // Four rows share each load of x.
  for (; r + 4 <= rows; r += 4) {
    const double* w0 = w + r * cols;
    const double* w1 = w0 + cols;
    const double* w2 = w1 + cols;
    const double* w3 = w2 + cols;
    __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
    __m256d a2 = _mm256_setzero_pd(), a3 = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= cols; k += 4) {
      const __m256d vx = _mm256_loadu_pd(x + k);
      a0 = _mm256_fmadd_pd(_mm256_loadu_pd(w0 + k), vx, a0);
      a1 = _mm256_fmadd_pd(_mm256_loadu_pd(w1 + k), vx, a1);
      a2 = _mm256_fmadd_pd(_mm256_loadu_pd(w2 + k), vx, a2);
      a3 = _mm256_fmadd_pd(_mm256_loadu_pd(w3 + k), vx, a3);
    }
    double s0 = hsum(a0), s1 = hsum(a1), s2 = hsum(a2), s3 = hsum(a3);
    for (; k < cols; ++k) {
      s0 += w0[k] * x[k];
      s1 += w1[k] * x[k];
      s2 += w2[k] * x[k];
      s3 += w3[k] * x[k];
    }
    y[r] = s0;
    y[r + 1] = s1;
    y[r + 2] = s2;
    y[r + 3] = s3;
  }
  for (; r < rows; ++r) y[r] = dot_avx2(w + r * cols, x, cols);
}

void gemv_t_acc_avx2(const double* w, std::size_t rows, std::size_t cols, const double* g,
                     double* dx) {
  for (std::size_t r = 0; r < rows; ++r) axpy_avx2(g[r], w + r * cols, dx, cols);
}

void ger_acc_avx2(double* dw, std::size_t rows, std::size_t cols, const double* g,
                  const double* x) {
  for (std::size_t r = 0; r < rows; ++r) axpy_avx2(g[r], x, dw + r * cols, cols);
}

// Two complex numbers per register, interleaved [re0 im0 re1 im1].
cplx cdot_avx2(const cplx* a, const cplx* b, std::size_t n, bool conj_a) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  __m256d prod = _mm256_setzero_pd();   // [ar*br, ai*bi, ...]
  __m256d cross = _mm256_setzero_pd();  // [ar*bi, ai*br, ...]
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const __m256d va = _mm256_loadu_pd(pa + 2 * k);
    const __m256d vb = _mm256_loadu_pd(pb + 2 * k);
    prod = _mm256_fmadd_pd(va, vb, prod);
    cross = _mm256_fmadd_pd(va, _mm256_permute_pd(vb, 0b0101), cross);
  }
  alignas(32) double p[4], c[4];
  _mm256_store_pd(p, prod);
  _mm256_store_pd(c, cross);
  double re, im;
  if (conj_a) {
    re = (p[0] + p[2]) + (p[1] + p[3]);
    im = (c[0] + c[2]) - (c[1] + c[3]);
  } else {
    re = (p[0] + p[2]) - (p[1] + p[3]);
    im = (c[0] + c[2]) + (c[1] + c[3]);
  }
  for (; k < n; ++k) {
    const double ar = a[k].real(), ai = conj_a ? -a[k].imag() : a[k].imag();
    re += ar * b[k].real() - ai * b[k].imag();
    im += ar * b[k].imag() + ai * b[k].real();
  }
  return {re, im};
}

cplx cdotu_avx2(const cplx* a, const cplx* b, std::size_t n) { return cdot_avx2(a, b, n, false); }
cplx cdotc_avx2(const cplx* a, const cplx* b, std::size_t n) { return cdot_avx2(a, b, n, true); }

double cnorm2_avx2(const cplx* a, std::size_t n) {
  return dot_avx2(reinterpret_cast<const double*>(a), reinterpret_cast<const double*>(a), 2 * n);
}

}  // namespace

const KernelTable avx2_table{dot_avx2,     axpy_avx2,  gemv_avx2,  gemv_t_acc_avx2,
                             ger_acc_avx2, cdotu_avx2, cdotc_avx2, cnorm2_avx2};

}  // namespace skyris::simd::detail
