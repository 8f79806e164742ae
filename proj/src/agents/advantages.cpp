#include "skyris/agents/advantages.hpp"

#include <cmath>

#include "skyris/errors.hpp"

namespace skyris::agents {

AdvantageEstimate estimate_advantages(std::span<const Trajectory> trajs, const nn::Mlp& value, double gamma,
                                      double lambda) {
  AdvantageEstimate est;
  for (const auto& tr : trajs) {
    const std::size_t n = tr.reward.size();
    if (tr.obs.size() != n) throw StructuralError("estimate_advantages: trajectory arrays disagree in length");
    if (n == 0) continue;
    std::vector<double> v(n + 1);
    for (std::size_t t = 0; t < n; ++t) v[t] = value.forward(tr.obs[t])[0];
    v[n] = tr.terminal ? 0.0 : value.forward(tr.final_obs)[0];
    std::vector<double> adv(n);
    double acc = 0.0;
    for (std::size_t t = n; t-- > 0;) {
      const double delta = tr.reward[t] + gamma * v[t + 1] - v[t];
      acc = delta + gamma * lambda * acc;
      adv[t] = acc;
    }
    for (std::size_t t = 0; t < n; ++t) {
      if (!std::isfinite(adv[t])) throw DomainError("estimate_advantages: non-finite advantage");
      est.advantage.push_back(adv[t]);
      est.ret.push_back(adv[t] + v[t]);
    }
  }
  return est;
}

std::vector<double> normalize_advantages(std::span<const double> adv) {
  std::vector<double> out(adv.begin(), adv.end());
  if (out.empty()) return out;
  double mean = 0.0;
  for (double a : out) mean += a;
  mean /= static_cast<double>(out.size());
  double var = 0.0;
  for (double a : out) var += (a - mean) * (a - mean);
  var /= static_cast<double>(out.size());
  const double sd = std::sqrt(var);
  const bool scale = sd > 1e-8 * std::max(1.0, std::abs(mean));
  for (auto& a : out) a = scale ? (a - mean) / sd : a - mean;
  return out;
}

}  // namespace skyris::agents
