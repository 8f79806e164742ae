#include "skyris/nn/adam.hpp"

#include <cmath>

#include "skyris/errors.hpp"

namespace skyris::nn {

void Adam::step(std::span<double> params, std::span<const double> grads) {
  if (params.size() != grads.size()) throw StructuralError("Adam::step: gradient length mismatch");
  if (m.empty()) {
    m.assign(params.size(), 0.0);
    v.assign(params.size(), 0.0);
  }
  if (m.size() != params.size()) throw StructuralError("Adam::step: state length mismatch");
  ++t;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * grads[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * grads[i] * grads[i];
    const double mh = m[i] / c1;
    const double vh = v[i] / c2;
    params[i] -= lr * mh / (std::sqrt(vh) + eps);
  }
}

}  // namespace skyris::nn
