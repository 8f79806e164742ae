#pragma once

#include <span>
#include <vector>

namespace skyris::harness {

double mean(std::span<const double> v);
// Linear interpolation between order statistics (type 7).
double quantile(std::span<const double> v, double q);
double median(std::span<const double> v);

struct Spread {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr() const { return q3 - q1; }
};
Spread spread(std::span<const double> v);

// Kendall tau-b between paired samples.
double kendall_tau(std::span<const double> x, std::span<const double> y);

// Mean of the first and last `frac` share of a series (at least one element each).
double head_mean(std::span<const double> v, double frac);
double tail_mean(std::span<const double> v, double frac);

}  // namespace skyris::harness
