#include "skyris/bessel.hpp"

#include <cmath>

#include "skyris/errors.hpp"
#include "skyris/units.hpp"

namespace skyris::bessel {
namespace {

constexpr double kSeriesLimit = 12.0;

// sum_k (-1)^k (x/2)^(2k) / (k! (k+n)!), i.e. J_n(x) / (x/2)^n.
double reduced_series(int n, double x) {
  const double q = 0.25 * x * x;
  double nfact = 1.0;
  for (int i = 2; i <= n; ++i) nfact *= i;
  double term = 1.0 / nfact;
  double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= -q / (static_cast<double>(k) * static_cast<double>(k + n));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum) && std::abs(term) < 1e-300 + 1e-18) break;
  }
  return sum;
}

// Hankel expansion: J_n(x) ~ sqrt(2/(pi x)) (P cos chi - Q sin chi).
double asymptotic(int n, double x) {
  const double mu = 4.0 * n * n;
  double p = 1.0, q = 0.0;
  double term = 1.0;  // a_k(n) / x^k
  double prev = 1e300;
  for (int k = 1; k < 60; ++k) {
    const double f = 2.0 * k - 1.0;
    term *= (mu - f * f) / (k * 8.0 * x);
    if (std::abs(term) > prev) break;  // series started to diverge
    prev = std::abs(term);
    switch (k % 4) {
      case 1: q += term; break;
      case 2: p -= term; break;
      case 3: q -= term; break;
      case 0: p += term; break;
    }
    if (std::abs(term) < 1e-17) break;
  }
  const double chi = x - (0.5 * n + 0.25) * units::pi;
  return std::sqrt(2.0 / (units::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

double jn(int n, double x) {
  if (n < 0) throw DomainError("bessel::jn: negative order");
  if (!std::isfinite(x)) throw DomainError("bessel::jn: non-finite argument");
  const double sign = (x < 0.0 && (n % 2 == 1)) ? -1.0 : 1.0;
  const double ax = std::abs(x);
  if (ax <= kSeriesLimit) return sign * std::pow(0.5 * ax, n) * reduced_series(n, ax);
  return sign * asymptotic(n, ax);
}

double jn_over_xn(int n, double x) {
  if (n < 0) throw DomainError("bessel::jn_over_xn: negative order");
  if (!std::isfinite(x)) throw DomainError("bessel::jn_over_xn: non-finite argument");
  const double ax = std::abs(x);
  if (ax <= kSeriesLimit) return std::pow(0.5, n) * reduced_series(n, ax);
  return jn(n, ax) / std::pow(ax, n);
}

}  // namespace skyris::bessel
