#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace skyris::simd {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

// Function table for the data-parallel inner loops. Every entry has a scalar
// reference implementation; vector variants must agree with it to rounding.
struct KernelTable {
  // sum_k a[k] * b[k]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y[k] += alpha * x[k]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y = W x, W row-major rows x cols
  void (*gemv)(const double* w, std::size_t rows, std::size_t cols, const double* x, double* y);
  // dx += W^T g
  void (*gemv_t_acc)(const double* w, std::size_t rows, std::size_t cols, const double* g, double* dx);
  // dW += g x^T
  void (*ger_acc)(double* dw, std::size_t rows, std::size_t cols, const double* g, const double* x);
  // sum_k a[k] * b[k] (no conjugation)
  cplx (*cdotu)(const cplx* a, const cplx* b, std::size_t n);
  // sum_k conj(a[k]) * b[k]
  cplx (*cdotc)(const cplx* a, const cplx* b, std::size_t n);
  // sum_k |a[k]|^2
  double (*cnorm2)(const cplx* a, std::size_t n);
};

bool isa_supported(Isa isa);

// Table for a specific instruction set. Throws std::invalid_argument when the
// ISA was not compiled in or the CPU lacks it.
const KernelTable& table(Isa isa);

// Active table. Selected once from the CPU features; the environment variable
// SKYRIS_ISA=scalar forces the reference path.
const KernelTable& active();
Isa active_isa();
void set_active_isa(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

inline cplx cdotu(std::span<const cplx> a, std::span<const cplx> b) {
  return active().cdotu(a.data(), b.data(), a.size());
}

inline cplx cdotc(std::span<const cplx> a, std::span<const cplx> b) {
  return active().cdotc(a.data(), b.data(), a.size());
}

inline double cnorm2(std::span<const cplx> a) { return active().cnorm2(a.data(), a.size()); }

namespace detail {
extern const KernelTable scalar_table;
#if defined(SKYRIS_HAVE_AVX2)
extern const KernelTable avx2_table;
#endif
}  // namespace detail

}  // namespace skyris::simd
