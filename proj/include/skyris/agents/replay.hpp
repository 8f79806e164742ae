#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "skyris/nn/mlp.hpp"
#include "skyris/rng.hpp"

namespace skyris::agents {

struct Batch {
  nn::Mat obs;
  nn::Mat action;
  Eigen::VectorXd reward;
  nn::Mat next_obs;
  Eigen::VectorXd terminal;  // 1 when the next state is absorbing
};

// Fixed-capacity ring of transitions with uniform sampling.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, int obs_dim, int act_dim);

  void add(std::span<const double> obs, std::span<const double> action, double reward,
           std::span<const double> next_obs, bool terminal);
  Batch sample(std::size_t n, Rng& rng) const;
  Batch gather(std::span<const std::size_t> idx) const;

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }

 private:
  std::size_t capacity_;
  int obs_dim_;
  int act_dim_;
  std::size_t size_ = 0;
  std::size_t head_ = 0;
  std::vector<double> obs_, act_, rew_, next_, term_;
};

}  // namespace skyris::agents
