#include "skyris/harness/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace skyris::harness {

double mean(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("mean of an empty sample");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double quantile(std::span<const double> v, double q) {
  if (v.empty()) throw std::invalid_argument("quantile of an empty sample");
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  const double pos = q * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

double median(std::span<const double> v) { return quantile(v, 0.5); }

Spread spread(std::span<const double> v) { return {quantile(v, 0.5), quantile(v, 0.25), quantile(v, 0.75)}; }

double kendall_tau(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("kendall_tau needs two paired samples");
  double concordant = 0.0, discordant = 0.0, ties_x = 0.0, ties_y = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0.0 && dy == 0.0) continue;
      if (dx == 0.0) {
        ties_x += 1.0;
      } else if (dy == 0.0) {
        ties_y += 1.0;
      } else if ((dx > 0.0) == (dy > 0.0)) {
        concordant += 1.0;
      } else {
        discordant += 1.0;
      }
    }
  const double denom = std::sqrt((concordant + discordant + ties_x) * (concordant + discordant + ties_y));
  return denom > 0.0 ? (concordant - discordant) / denom : 0.0;
}

namespace {
std::size_t share(std::size_t n, double frac) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(frac * static_cast<double>(n))));
}
}  // namespace

double head_mean(std::span<const double> v, double frac) { return mean(v.first(share(v.size(), frac))); }
double tail_mean(std::span<const double> v, double frac) { return mean(v.last(share(v.size(), frac))); }

}  // namespace skyris::harness
