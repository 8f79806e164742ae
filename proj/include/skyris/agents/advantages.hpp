#pragma once

#include <span>
#include <vector>

#include "skyris/nn/mlp.hpp"

namespace skyris::agents {

struct Trajectory {
  std::vector<std::vector<double>> obs;
  std::vector<std::vector<double>> action;  // sampled, before clipping
  std::vector<double> reward;
  std::vector<double> final_obs;  // state after the last step
  bool terminal = false;          // final_obs is absorbing
};

struct AdvantageEstimate {
  std::vector<double> advantage;  // raw GAE
  std::vector<double> ret;        // advantage + V(s_t)
};

// GAE(gamma, lambda) over all trajectories, concatenated in order.
AdvantageEstimate estimate_advantages(std::span<const Trajectory> trajs, const nn::Mlp& value, double gamma,
                                      double lambda);

// Zero mean, unit variance; when the spread is negligible only the mean is removed.
std::vector<double> normalize_advantages(std::span<const double> adv);

}  // namespace skyris::agents
