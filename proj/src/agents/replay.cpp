#include "skyris/agents/replay.hpp"

#include <algorithm>
#include <cmath>

#include "skyris/agents/agent.hpp"
#include "skyris/errors.hpp"

namespace skyris::agents {

std::vector<double> concat(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

void clamp_unit(std::span<double> a) {
  for (auto& x : a) x = std::clamp(x, -1.0, 1.0);
}

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

ReplayBuffer::ReplayBuffer(std::size_t capacity, int obs_dim, int act_dim)
    : capacity_(capacity), obs_dim_(obs_dim), act_dim_(act_dim) {
  if (capacity == 0) throw DomainError("ReplayBuffer: capacity must be positive");
  obs_.resize(capacity * obs_dim);
  next_.resize(capacity * obs_dim);
  act_.resize(capacity * act_dim);
  rew_.resize(capacity);
  term_.resize(capacity);
}

void ReplayBuffer::add(std::span<const double> obs, std::span<const double> action, double reward,
                       std::span<const double> next_obs, bool terminal) {
  if (static_cast<int>(obs.size()) != obs_dim_ || static_cast<int>(next_obs.size()) != obs_dim_ ||
      static_cast<int>(action.size()) != act_dim_)
    throw StructuralError("ReplayBuffer::add: dimension mismatch");
  std::copy(obs.begin(), obs.end(), obs_.begin() + head_ * obs_dim_);
  std::copy(next_obs.begin(), next_obs.end(), next_.begin() + head_ * obs_dim_);
  std::copy(action.begin(), action.end(), act_.begin() + head_ * act_dim_);
  rew_[head_] = reward;
  term_[head_] = terminal ? 1.0 : 0.0;
  head_ = (head_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
}

Batch ReplayBuffer::gather(std::span<const std::size_t> idx) const {
  const auto n = static_cast<Eigen::Index>(idx.size());
  Batch b{nn::Mat(n, obs_dim_), nn::Mat(n, act_dim_), Eigen::VectorXd(n), nn::Mat(n, obs_dim_), Eigen::VectorXd(n)};
  for (Eigen::Index r = 0; r < n; ++r) {
    const std::size_t k = idx[r];
    if (k >= size_) throw PreconditionError("ReplayBuffer::gather: index beyond stored items");
    std::copy_n(obs_.begin() + k * obs_dim_, obs_dim_, b.obs.data() + r * obs_dim_);
    std::copy_n(next_.begin() + k * obs_dim_, obs_dim_, b.next_obs.data() + r * obs_dim_);
    std::copy_n(act_.begin() + k * act_dim_, act_dim_, b.action.data() + r * act_dim_);
    b.reward[r] = rew_[k];
    b.terminal[r] = term_[k];
  }
  return b;
}

Batch ReplayBuffer::sample(std::size_t n, Rng& rng) const {
  if (size_ < n || n == 0) throw PreconditionError("ReplayBuffer::sample: not enough stored transitions");
  std::uniform_int_distribution<std::size_t> pick(0, size_ - 1);
  std::vector<std::size_t> idx(n);
  for (auto& k : idx) k = pick(rng);
  return gather(idx);
}

}  // namespace skyris::agents
