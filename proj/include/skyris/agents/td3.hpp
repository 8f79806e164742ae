#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "skyris/agents/agent.hpp"
#include "skyris/agents/replay.hpp"
#include "skyris/nn/adam.hpp"
#include "skyris/nn/mlp.hpp"

namespace skyris::agents {

struct Td3Config {
  std::vector<int> hidden{64, 64};
  double gamma = 0.99;
  double tau = 0.005;
  double sigma_explore = 0.1;
  double sigma_target = 0.2;
  double noise_clip = 0.5;
  int policy_delay = 2;
  int batch_size = 256;
  int buffer_size = 100000;
  double actor_lr = 1e-3;
  double critic_lr = 1e-3;
  int start_steps = 1000;  // uniform random actions before the actor takes over
  int updates_per_step = 1;
};

void from_json(const nlohmann::json& j, Td3Config& c);
void to_json(nlohmann::json& j, const Td3Config& c);

struct Td3Targets {
  const nn::Mlp& actor;
  const nn::Mlp& q1;
  const nn::Mlp& q2;
};

// y = r + gamma (1 - terminal) min(q1', q2')(s', clip(mu'(s') + clip(eps, -c, c), -1, 1)),
// eps ~ N(0, sigma^2). Takes only the target networks.
Eigen::VectorXd td3_target(const Td3Targets& targets, const Batch& batch, double gamma, double sigma_target,
                           double noise_clip, Rng& rng);

struct Td3Step {
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  bool actor_updated = false;
};

class Td3Agent final : public Agent {
 public:
  Td3Agent(int obs_dim, int act_dim, Td3Config cfg, std::uint64_t seed);

  std::string kind() const override { return "td3"; }
  void train_episode(env::Environment& env, std::uint64_t episode_seed, const StepObserver& observer) override;
  std::vector<double> act(std::span<const double> obs) const override;
  nn::Checkpoint checkpoint() const override;
  void restore(const nn::Checkpoint& ck) override;

  std::vector<double> select_action(std::span<const double> obs, bool explore);
  Td3Step update(const Batch& batch);
  Td3Step update_from_buffer();

  ReplayBuffer& buffer() { return buffer_; }
  const Td3Config& config() const { return cfg_; }
  nn::Mlp& actor() { return actor_; }
  nn::Mlp& q1() { return q1_; }
  nn::Mlp& q2() { return q2_; }
  nn::Mlp& actor_target() { return actor_t_; }
  nn::Mlp& q1_target() { return q1_t_; }
  nn::Mlp& q2_target() { return q2_t_; }
  std::int64_t critic_updates() const { return critic_updates_; }
  std::int64_t actor_updates() const { return actor_updates_; }
  std::int64_t env_steps() const { return env_steps_; }

 private:
  double critic_step(nn::Mlp& q, nn::Adam& opt, const nn::Mat& sa, const Eigen::VectorXd& y);

  int obs_dim_, act_dim_;
  Td3Config cfg_;
  nn::Mlp actor_, q1_, q2_, actor_t_, q1_t_, q2_t_;
  nn::Adam actor_opt_, q1_opt_, q2_opt_;
  ReplayBuffer buffer_;
  Rng explore_rng_, replay_rng_, target_rng_;
  std::int64_t critic_updates_ = 0;
  std::int64_t actor_updates_ = 0;
  std::int64_t env_steps_ = 0;
};

}  // namespace skyris::agents
