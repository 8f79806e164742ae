#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace skyris::nn {

// Bias-corrected adaptive-moment descent on a flat parameter vector.
struct Adam {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t t = 0;

  Adam() = default;
  Adam(std::size_t n, double lr) : lr(lr), m(n, 0.0), v(n, 0.0) {}

  // params -= lr * m_hat / (sqrt(v_hat) + eps)
  void step(std::span<double> params, std::span<const double> grads);
};

}  // namespace skyris::nn
