#pragma once

namespace skyris::bessel {

// Bessel functions of the first kind, integer order n >= 0. Ascending power
// series for |x| <= 12, Hankel asymptotic expansion beyond; absolute error
// below 1e-10 on the real line.
double jn(int n, double x);

// J_n(x) / x^n, evaluated without cancellation near x = 0 (limit is
// 1 / (2^n n!)).
double jn_over_xn(int n, double x);

}  // namespace skyris::bessel
