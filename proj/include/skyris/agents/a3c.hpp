#pragma once

#include <cstdint>
#include <mutex>
#include <vector>

#include "json.hpp"
#include "skyris/agents/agent.hpp"
#include "skyris/nn/adam.hpp"
#include "skyris/nn/gaussian.hpp"

namespace skyris::agents {

struct A3cConfig {
  std::vector<int> hidden{64, 64};
  double gamma = 0.99;
  int rollout = 20;  // K
  double entropy_beta = 0.01;
  int workers = 4;
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;
  double init_log_std = -0.5;
};

void from_json(const nlohmann::json& j, A3cConfig& c);
void to_json(nlohmann::json& j, const A3cConfig& c);

// R_t = sum_{i<K-t} gamma^i r_{t+i} + gamma^{K-t} bootstrap
std::vector<double> nstep_returns(std::span<const double> rewards, double bootstrap, double gamma);

struct Rollout {
  nn::Mat obs;     // K x obs_dim
  nn::Mat action;  // K x act_dim (sampled, before clipping)
  std::vector<double> reward;
  double bootstrap = 0.0;  // V(s_K), 0 when s_K is absorbing
};

struct A3cGradients {
  std::vector<double> actor;   // mean params then log_std
  std::vector<double> critic;
  double actor_loss = 0.0;
  double critic_loss = 0.0;
};

// Gradients of -sum_t [log pi(a_t|s_t) A_t + beta H] and sum_t (R_t - V(s_t))^2
// with A_t = R_t - V(s_t) held fixed.
A3cGradients a3c_gradients(const nn::GaussianPolicy& policy, const nn::Mlp& value, const Rollout& ro, double gamma,
                           double beta);

// Global parameters shared by the workers. Reads return a consistent
// snapshot; gradient application is atomic per rollout.
class SharedStore {
 public:
  SharedStore(nn::GaussianPolicy policy, nn::Mlp value, double actor_lr, double critic_lr);

  void snapshot(nn::GaussianPolicy& policy, nn::Mlp& value) const;
  void apply(const A3cGradients& g);
  std::int64_t applied() const;

  // Unsynchronized access; callers must ensure no worker is running.
  nn::GaussianPolicy& policy() { return policy_; }
  nn::Mlp& value() { return value_; }
  const nn::GaussianPolicy& policy() const { return policy_; }
  const nn::Mlp& value() const { return value_; }

 private:
  mutable std::mutex mu_;
  nn::GaussianPolicy policy_;
  nn::Mlp value_;
  nn::Adam actor_opt_, critic_opt_;
  std::int64_t applied_ = 0;
};

class A3cAgent final : public Agent {
 public:
  A3cAgent(int obs_dim, int act_dim, A3cConfig cfg, std::uint64_t seed);

  std::string kind() const override { return "a3c"; }
  // Each worker runs one episode on its own clone of env; worker 0 reports.
  void train_episode(env::Environment& env, std::uint64_t episode_seed, const StepObserver& observer) override;
  std::vector<double> act(std::span<const double> obs) const override;
  nn::Checkpoint checkpoint() const override;
  void restore(const nn::Checkpoint& ck) override;

  const A3cConfig& config() const { return cfg_; }
  SharedStore& store() { return store_; }

 private:
  void run_worker(int w, env::Environment& env, std::uint64_t seed, const StepObserver* observer);

  int obs_dim_, act_dim_;
  A3cConfig cfg_;
  SharedStore store_;
  std::vector<Rng> worker_rng_;
  std::mutex log_mu_;
};

}  // namespace skyris::agents
