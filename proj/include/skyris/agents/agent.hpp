#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "skyris/env.hpp"
#include "skyris/nn/checkpoint.hpp"

namespace skyris::agents {

// Called after every environment step of the reporting worker.
using StepObserver =
    std::function<void(std::span<const double> obs, std::span<const double> action, const env::StepResult& result)>;

struct UpdateRecord {
  std::int64_t update = 0;
  double actor_loss = 0.0;
  double critic_loss = 0.0;
  double kl = 0.0;
  double grad_norm = 0.0;
  bool accepted = true;
};

class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string kind() const = 0;
  // Resets env with episode_seed and runs one training episode.
  virtual void train_episode(env::Environment& env, std::uint64_t episode_seed, const StepObserver& observer) = 0;
  // Greedy / mean action.
  virtual std::vector<double> act(std::span<const double> obs) const = 0;
  virtual nn::Checkpoint checkpoint() const = 0;
  virtual void restore(const nn::Checkpoint& ck) = 0;

  const std::vector<UpdateRecord>& updates() const { return log_; }
  void clear_updates() { log_.clear(); }

 protected:
  std::vector<UpdateRecord> log_;
};

std::vector<double> concat(std::span<const double> a, std::span<const double> b);
void clamp_unit(std::span<double> a);
double l2_norm(std::span<const double> v);

}  // namespace skyris::agents
