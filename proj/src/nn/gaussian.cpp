#include "skyris/nn/gaussian.hpp"

#include <algorithm>
#include <cmath>

#include "skyris/errors.hpp"
#include "skyris/units.hpp"

namespace skyris::nn {
namespace {

const double kLog2Pi = std::log(2.0 * units::pi);

double clamped(double ls) { return std::clamp(ls, kLogStdMin, kLogStdMax); }

}  // namespace

GaussianPolicy::GaussianPolicy(Mlp mean_net, double init_log_std)
    : mean(std::move(mean_net)), log_std(mean.out(), clamped(init_log_std)) {}

std::vector<double> GaussianPolicy::get_flat() const {
  std::vector<double> p = mean.get_flat();
  p.insert(p.end(), log_std.begin(), log_std.end());
  return p;
}

void GaussianPolicy::set_flat(std::span<const double> p) {
  if (p.size() != param_count()) throw StructuralError("GaussianPolicy::set_flat: length mismatch");
  mean.set_flat(p.first(mean.param_count()));
  std::copy(p.begin() + static_cast<std::ptrdiff_t>(mean.param_count()), p.end(), log_std.begin());
}

void GaussianPolicy::clamp_log_std() {
  for (auto& v : log_std) v = clamped(v);
}

std::vector<double> GaussianPolicy::sample(std::span<const double> obs, Rng& rng) const {
  std::vector<double> a = mean.forward(obs);
  for (std::size_t k = 0; k < a.size(); ++k) a[k] += std::exp(clamped(log_std[k])) * standard_normal(rng);
  return a;
}

double gaussian_logprob(std::span<const double> mu, std::span<const double> log_std, std::span<const double> a) {
  if (mu.size() != log_std.size() || mu.size() != a.size()) throw StructuralError("gaussian_logprob: dimension mismatch");
  double lp = 0.0;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    const double ls = clamped(log_std[k]);
    const double z = (a[k] - mu[k]) * std::exp(-ls);
    lp += -0.5 * z * z - ls - 0.5 * kLog2Pi;
  }
  return lp;
}

double gaussian_entropy(std::span<const double> log_std) {
  double h = 0.0;
  for (double ls : log_std) h += clamped(ls) + 0.5 * (1.0 + kLog2Pi);
  return h;
}

double gaussian_kl(std::span<const double> mu_old, std::span<const double> ls_old, std::span<const double> mu_new,
                   std::span<const double> ls_new) {
  if (mu_old.size() != mu_new.size() || ls_old.size() != mu_old.size() || ls_new.size() != mu_old.size())
    throw StructuralError("gaussian_kl: dimension mismatch");
  double kl = 0.0;
  for (std::size_t k = 0; k < mu_old.size(); ++k) {
    const double lo = clamped(ls_old[k]);
    const double ln = clamped(ls_new[k]);
    const double d = mu_old[k] - mu_new[k];
    kl += ln - lo + (std::exp(2.0 * lo) + d * d) / (2.0 * std::exp(2.0 * ln)) - 0.5;
  }
  return std::max(kl, 0.0);
}

LogProbEntropyKl gaussian_logprob_entropy_kl(const GaussianPolicy& policy, const GaussianPolicy& other,
                                             std::span<const double> s, std::span<const double> a) {
  const std::vector<double> mu = policy.mean.forward(s);
  const std::vector<double> mu_other = other.mean.forward(s);
  LogProbEntropyKl r;
  r.logprob = gaussian_logprob(mu, policy.log_std, a);
  r.entropy = gaussian_entropy(policy.log_std);
  r.kl = gaussian_kl(mu_other, other.log_std, mu, policy.log_std);
  return r;
}

}  // namespace skyris::nn
