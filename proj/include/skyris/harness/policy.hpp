#pragma once

#include <memory>
#include <span>
#include <vector>

#include "skyris/agents/agent.hpp"
#include "skyris/nn/checkpoint.hpp"
#include "skyris/rng.hpp"

namespace skyris::harness {

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::vector<double> act(std::span<const double> obs) = 0;
};

// Deterministic actor network (TD3 actor or Gaussian mean).
class NetPolicy final : public Policy {
 public:
  explicit NetPolicy(nn::Mlp net) : net_(std::move(net)) {}
  std::vector<double> act(std::span<const double> obs) override { return net_.forward(obs); }
  const nn::Mlp& net() const { return net_; }

 private:
  nn::Mlp net_;
};

class AgentPolicy final : public Policy {
 public:
  explicit AgentPolicy(const agents::Agent& agent) : agent_(agent) {}
  std::vector<double> act(std::span<const double> obs) override { return agent_.act(obs); }

 private:
  const agents::Agent& agent_;
};

// Uniform on [-1, 1]^d.
class RandomPolicy final : public Policy {
 public:
  RandomPolicy(int act_dim, std::uint64_t seed) : dim_(act_dim), rng_(seed) {}
  std::vector<double> act(std::span<const double> obs) override;

 private:
  int dim_;
  Rng rng_;
};

// Greedy policy stored in a checkpoint; checks the network against the
// environment's dimensions.
NetPolicy policy_from_checkpoint(const nn::Checkpoint& ck, int obs_dim, int act_dim);

}  // namespace skyris::harness
