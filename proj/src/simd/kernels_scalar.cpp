#include "skyris/simd/kernels.hpp"

namespace skyris::simd::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += a[k] * b[k];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) y[k] += alpha * x[k];
}

void gemv_scalar(const double* w, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot_scalar(w + r * cols, x, cols);
}

void gemv_t_acc_scalar(const double* w, std::size_t rows, std::size_t cols, const double* g,
                       double* dx) {
  for (std::size_t r = 0; r < rows; ++r) axpy_scalar(g[r], w + r * cols, dx, cols);
}

void ger_acc_scalar(double* dw, std::size_t rows, std::size_t cols, const double* g,
                    const double* x) {
  for (std::size_t r = 0; r < rows; ++r) axpy_scalar(g[r], x, dw + r * cols, cols);
}

cplx cdotu_scalar(const cplx* a, const cplx* b, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    re += a[k].real() * b[k].real() - a[k].imag() * b[k].imag();
    im += a[k].real() * b[k].imag() + a[k].imag() * b[k].real();
  }
  return {re, im};
}

cplx cdotc_scalar(const cplx* a, const cplx* b, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    re += a[k].real() * b[k].real() + a[k].imag() * b[k].imag();
    im += a[k].real() * b[k].imag() - a[k].imag() * b[k].real();
  }
  return {re, im};
}

double cnorm2_scalar(const cplx* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += a[k].real() * a[k].real() + a[k].imag() * a[k].imag();
  return s;
}

}  // namespace

const KernelTable scalar_table{dot_scalar,   axpy_scalar,  gemv_scalar,  gemv_t_acc_scalar,
                               ger_acc_scalar, cdotu_scalar, cdotc_scalar, cnorm2_scalar};

}  // namespace skyris::simd::detail
