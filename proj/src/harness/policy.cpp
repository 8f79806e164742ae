#include "skyris/harness/policy.hpp"

#include "skyris/errors.hpp"

namespace skyris::harness {

std::vector<double> RandomPolicy::act(std::span<const double>) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> a(dim_);
  for (auto& x : a) x = u(rng_);
  return a;
}

NetPolicy policy_from_checkpoint(const nn::Checkpoint& ck, int obs_dim, int act_dim) {
  bool has_actor = false;
  for (const auto& [name, net] : ck.nets) has_actor = has_actor || name == "actor";
  const nn::Mlp& net = ck.net(has_actor ? "actor" : "policy_mean");
  if (net.in() != obs_dim || net.out() != act_dim)
    throw CheckpointError("checkpoint network is " + std::to_string(net.in()) + " -> " + std::to_string(net.out()) +
                          " but the configuration needs " + std::to_string(obs_dim) + " -> " +
                          std::to_string(act_dim));
  return NetPolicy(net);
}

}  // namespace skyris::harness
