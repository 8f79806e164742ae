#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "json.hpp"
#include "skyris/agents/advantages.hpp"
#include "skyris/agents/agent.hpp"
#include "skyris/nn/adam.hpp"
#include "skyris/nn/gaussian.hpp"

namespace skyris::agents {

struct TrpoConfig {
  std::vector<int> hidden{64, 64};
  double gamma = 0.99;
  double lambda_gae = 0.95;
  double delta_kl = 0.01;
  int cg_iters = 10;
  double damping = 0.1;
  double backtrack = 0.8;
  int max_backtracks = 10;
  double value_lr = 1e-3;
  int value_iters = 10;
  int episodes_per_update = 1;
  double init_log_std = -0.5;
};

void from_json(const nlohmann::json& j, TrpoConfig& c);
void to_json(nlohmann::json& j, const TrpoConfig& c);

using LinearOp = std::function<std::vector<double>(std::span<const double>)>;

// Solves A x = b for symmetric positive definite A given as a product.
std::vector<double> conjugate_gradient(const LinearOp& a, std::span<const double> b, int iters, double tol = 1e-12);

struct TrpoStep {
  bool accepted = false;
  double kl = 0.0;
  double surrogate_gain = 0.0;
  int backtracks = 0;
  double grad_norm = 0.0;
  double value_loss = 0.0;
};

class TrpoAgent final : public Agent {
 public:
  TrpoAgent(int obs_dim, int act_dim, TrpoConfig cfg, std::uint64_t seed);

  std::string kind() const override { return "trpo"; }
  void train_episode(env::Environment& env, std::uint64_t episode_seed, const StepObserver& observer) override;
  std::vector<double> act(std::span<const double> obs) const override;
  nn::Checkpoint checkpoint() const override;
  void restore(const nn::Checkpoint& ck) override;

  Trajectory collect(env::Environment& env, std::uint64_t episode_seed, const StepObserver& observer);
  TrpoStep update(std::span<const Trajectory> trajs);

  // Mean KL(old || current) over the batch states.
  static double mean_kl(const nn::GaussianPolicy& old_policy, const nn::GaussianPolicy& policy, const nn::Mat& obs);

  nn::GaussianPolicy& policy() { return policy_; }
  nn::Mlp& value() { return value_; }
  const TrpoConfig& config() const { return cfg_; }

 private:
  int obs_dim_, act_dim_;
  TrpoConfig cfg_;
  nn::GaussianPolicy policy_;
  nn::Mlp value_;
  nn::Adam value_opt_;
  Rng rng_;
  std::vector<Trajectory> pending_;
  std::int64_t updates_ = 0;
};

}  // namespace skyris::agents
