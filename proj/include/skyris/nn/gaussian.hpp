#pragma once

#include <span>
#include <vector>

#include "skyris/nn/mlp.hpp"
#include "skyris/rng.hpp"

namespace skyris::nn {

constexpr double kLogStdMin = -5.0;
constexpr double kLogStdMax = 2.0;

// Diagonal Gaussian with a network mean and state-independent log-std.
struct GaussianPolicy {
  Mlp mean;
  std::vector<double> log_std;

  GaussianPolicy() = default;
  GaussianPolicy(Mlp mean_net, double init_log_std);

  int act_dim() const { return mean.out(); }
  std::size_t param_count() const { return mean.param_count() + log_std.size(); }
  // mean parameters followed by log_std
  std::vector<double> get_flat() const;
  void set_flat(std::span<const double> p);
  void clamp_log_std();

  std::vector<double> sample(std::span<const double> obs, Rng& rng) const;
};

double gaussian_logprob(std::span<const double> mu, std::span<const double> log_std, std::span<const double> a);
double gaussian_entropy(std::span<const double> log_std);
// KL(old || new)
double gaussian_kl(std::span<const double> mu_old, std::span<const double> ls_old, std::span<const double> mu_new,
                   std::span<const double> ls_new);

struct LogProbEntropyKl {
  double logprob = 0.0;
  double entropy = 0.0;
  double kl = 0.0;
};

// log pi(a|s), H(pi(.|s)) and KL(other(.|s) || pi(.|s)).
LogProbEntropyKl gaussian_logprob_entropy_kl(const GaussianPolicy& policy, const GaussianPolicy& other,
                                             std::span<const double> s, std::span<const double> a);

}  // namespace skyris::nn
