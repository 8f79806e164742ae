#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "skyris/rng.hpp"

namespace skyris::nn {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Output { identity = 0, tanh = 1 };

// Dense network with tanh hidden layers. Parameters live in one flat vector:
// for each layer, W (out x in, row-major) followed by b (out).
class Mlp {
 public:
  // Per-layer post-activation values of a batched forward pass; acts[0] is the
  // input batch.
  struct Cache {
    std::vector<Mat> acts;
  };

  Mlp() = default;
  // Zero parameters.
  Mlp(std::vector<int> widths, Output out);
  // Orthogonal init with unit gain, zero biases; last layer scaled by final_scale.
  Mlp(std::vector<int> widths, Output out, Rng& rng, double final_scale = 1.0);

  int in() const { return widths_.front(); }
  int out() const { return widths_.back(); }
  int layers() const { return static_cast<int>(widths_.size()) - 1; }
  const std::vector<int>& widths() const { return widths_; }
  Output output() const { return output_; }
  std::size_t param_count() const { return params_.size(); }

  std::span<const double> params() const { return params_; }
  std::span<double> params() { return params_; }
  std::vector<double> get_flat() const { return params_; }
  void set_flat(std::span<const double> p);

  std::vector<double> forward(std::span<const double> x) const;
  Mat forward(const Mat& x, Cache* cache = nullptr) const;

  // Accumulates d(sum dy . y)/dtheta into grads; writes dL/dx when dx is set.
  void backward(const Cache& cache, const Mat& dy, std::span<double> grads, Mat* dx = nullptr) const;

  // Directional derivative of the outputs along parameter direction v.
  Mat jvp(const Cache& cache, std::span<const double> v) const;

  static std::size_t count_params(const std::vector<int>& widths);

 private:
  std::size_t w_offset(int layer) const { return offsets_[layer]; }
  std::size_t b_offset(int layer) const {
    return offsets_[layer] + static_cast<std::size_t>(widths_[layer]) * widths_[layer + 1];
  }
  bool squashed(int layer) const { return layer + 1 < layers() || output_ == Output::tanh; }

  std::vector<int> widths_;
  Output output_ = Output::identity;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

// Polyak average: target = (1 - tau) target + tau online.
void polyak(Mlp& target, const Mlp& online, double tau);

}  // namespace skyris::nn
