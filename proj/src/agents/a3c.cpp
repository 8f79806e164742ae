#include "skyris/agents/a3c.hpp"

#include <cmath>
#include <memory>
#include <thread>

#include "skyris/errors.hpp"

namespace skyris::agents {
namespace {

std::vector<int> layer_widths(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> w{in};
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(out);
  return w;
}

}  // namespace

void from_json(const nlohmann::json& j, A3cConfig& c) {
  c.hidden = j.value("hidden", c.hidden);
  c.gamma = j.value("gamma", c.gamma);
  c.rollout = j.value("rollout", c.rollout);
  c.entropy_beta = j.value("entropy_beta", c.entropy_beta);
  c.workers = j.value("workers", c.workers);
  c.actor_lr = j.value("actor_lr", c.actor_lr);
  c.critic_lr = j.value("critic_lr", c.critic_lr);
  c.init_log_std = j.value("init_log_std", c.init_log_std);
}

void to_json(nlohmann::json& j, const A3cConfig& c) {
  j = {{"hidden", c.hidden},       {"gamma", c.gamma},         {"rollout", c.rollout},
       {"entropy_beta", c.entropy_beta}, {"workers", c.workers}, {"actor_lr", c.actor_lr},
       {"critic_lr", c.critic_lr}, {"init_log_std", c.init_log_std}};
}

std::vector<double> nstep_returns(std::span<const double> rewards, double bootstrap, double gamma) {
  std::vector<double> r(rewards.size());
  double acc = bootstrap;
  for (std::size_t t = rewards.size(); t-- > 0;) {
    acc = rewards[t] + gamma * acc;
    r[t] = acc;
  }
  return r;
}

A3cGradients a3c_gradients(const nn::GaussianPolicy& policy, const nn::Mlp& value, const Rollout& ro, double gamma,
                           double beta) {
  const Eigen::Index k = ro.obs.rows();
  if (ro.action.rows() != k || static_cast<Eigen::Index>(ro.reward.size()) != k)
    throw StructuralError("a3c_gradients: rollout arrays disagree in length");
  const int ad = policy.act_dim();
  A3cGradients g;
  g.actor.assign(policy.param_count(), 0.0);
  g.critic.assign(value.param_count(), 0.0);
  if (k == 0) return g;

  const std::vector<double> ret = nstep_returns(ro.reward, ro.bootstrap, gamma);
  nn::Mlp::Cache v_cache;
  const nn::Mat v = value.forward(ro.obs, &v_cache);
  nn::Mlp::Cache m_cache;
  const nn::Mat mu = policy.mean.forward(ro.obs, &m_cache);

  nn::Mat dv(k, 1);
  nn::Mat dmu(k, ad);
  std::vector<double> dls(ad, 0.0);
  std::vector<double> ls(ad);
  for (int d = 0; d < ad; ++d) ls[d] = std::clamp(policy.log_std[d], nn::kLogStdMin, nn::kLogStdMax);
  const double entropy = nn::gaussian_entropy(policy.log_std);
  for (Eigen::Index t = 0; t < k; ++t) {
    const double adv = ret[t] - v(t, 0);
    g.critic_loss += adv * adv;
    dv(t, 0) = -2.0 * adv;
    const double lp = nn::gaussian_logprob({mu.data() + t * ad, static_cast<std::size_t>(ad)}, policy.log_std,
                                           {ro.action.data() + t * ad, static_cast<std::size_t>(ad)});
    g.actor_loss -= lp * adv + beta * entropy;
    for (int d = 0; d < ad; ++d) {
      const double inv_var = std::exp(-2.0 * ls[d]);
      const double diff = ro.action(t, d) - mu(t, d);
      dmu(t, d) = -adv * diff * inv_var;
      const bool active = policy.log_std[d] > nn::kLogStdMin && policy.log_std[d] < nn::kLogStdMax;
      if (active) dls[d] += -adv * (diff * diff * inv_var - 1.0) - beta;
    }
  }
  value.backward(v_cache, dv, g.critic);
  std::span<double> gm(g.actor.data(), policy.mean.param_count());
  policy.mean.backward(m_cache, dmu, gm);
  std::copy(dls.begin(), dls.end(), g.actor.begin() + static_cast<std::ptrdiff_t>(policy.mean.param_count()));
  return g;
}

SharedStore::SharedStore(nn::GaussianPolicy policy, nn::Mlp value, double actor_lr, double critic_lr)
    : policy_(std::move(policy)),
      value_(std::move(value)),
      actor_opt_(policy_.param_count(), actor_lr),
      critic_opt_(value_.param_count(), critic_lr) {}

void SharedStore::snapshot(nn::GaussianPolicy& policy, nn::Mlp& value) const {
  std::lock_guard lock(mu_);
  policy = policy_;
  value = value_;
}

void SharedStore::apply(const A3cGradients& g) {
  std::lock_guard lock(mu_);
  std::vector<double> p = policy_.get_flat();
  actor_opt_.step(p, g.actor);
  policy_.set_flat(p);
  policy_.clamp_log_std();
  critic_opt_.step(value_.params(), g.critic);
  ++applied_;
}

std::int64_t SharedStore::applied() const {
  std::lock_guard lock(mu_);
  return applied_;
}

A3cAgent::A3cAgent(int obs_dim, int act_dim, A3cConfig cfg, std::uint64_t seed)
    : obs_dim_(obs_dim),
      act_dim_(act_dim),
      cfg_(std::move(cfg)),
      store_([&] {
        Rng init(derive_seed(seed, {tag(Stream::policy_init)}));
        nn::Mlp mean(layer_widths(obs_dim, cfg_.hidden, act_dim), nn::Output::tanh, init, 0.01);
        return nn::GaussianPolicy(std::move(mean), cfg_.init_log_std);
      }(),
             [&] {
               Rng init(derive_seed(seed, {tag(Stream::policy_init), 1}));
               return nn::Mlp(layer_widths(obs_dim, cfg_.hidden, 1), nn::Output::identity, init);
             }(),
             cfg_.actor_lr, cfg_.critic_lr) {
  if (cfg_.workers < 1 || cfg_.rollout < 1) throw DomainError("a3c: workers and rollout must be positive");
  for (int w = 0; w < cfg_.workers; ++w) worker_rng_.emplace_back(derive_seed(seed, {tag(Stream::worker), static_cast<std::uint64_t>(w)}));
}

std::vector<double> A3cAgent::act(std::span<const double> obs) const { return store_.policy().mean.forward(obs); }

void A3cAgent::run_worker(int w, env::Environment& env, std::uint64_t seed, const StepObserver* observer) {
  Rng& rng = worker_rng_[w];
  nn::GaussianPolicy policy;
  nn::Mlp value;
  std::vector<double> obs = env.reset(seed);
  bool done = false;
  while (!done) {
    store_.snapshot(policy, value);
    std::vector<std::vector<double>> s_buf, a_buf;
    std::vector<double> rewards;
    std::vector<double> last_obs;
    for (int t = 0; t < cfg_.rollout && !done; ++t) {
      std::vector<double> a = policy.sample(obs, rng);
      std::vector<double> sent = a;
      clamp_unit(sent);
      env::StepResult res = env.step(sent);
      if (observer && *observer) (*observer)(obs, sent, res);
      s_buf.push_back(std::move(obs));
      a_buf.push_back(std::move(a));
      rewards.push_back(res.reward);
      done = res.done;
      obs = std::move(res.obs);
    }
    Rollout ro;
    const auto k = static_cast<Eigen::Index>(rewards.size());
    ro.obs.resize(k, obs_dim_);
    ro.action.resize(k, act_dim_);
    for (Eigen::Index t = 0; t < k; ++t) {
      std::copy(s_buf[t].begin(), s_buf[t].end(), ro.obs.data() + t * obs_dim_);
      std::copy(a_buf[t].begin(), a_buf[t].end(), ro.action.data() + t * act_dim_);
    }
    ro.reward = std::move(rewards);
    // the horizon truncates; bootstrap from the last observed state
    ro.bootstrap = value.forward(obs)[0];
    A3cGradients g = a3c_gradients(policy, value, ro, cfg_.gamma, cfg_.entropy_beta);
    store_.apply(g);
    if (w == 0) {
      std::lock_guard lock(log_mu_);
      UpdateRecord rec;
      rec.update = store_.applied();
      rec.actor_loss = g.actor_loss;
      rec.critic_loss = g.critic_loss;
      rec.grad_norm = l2_norm(g.actor);
      log_.push_back(rec);
    }
  }
}

void A3cAgent::train_episode(env::Environment& env, std::uint64_t episode_seed, const StepObserver& observer) {
  if (env.obs_size() != obs_dim_ || env.action_size() != act_dim_)
    throw StructuralError("a3c: environment dimensions do not match the agent");
  if (cfg_.workers == 1) {
    run_worker(0, env, episode_seed, &observer);
    return;
  }
  std::vector<std::unique_ptr<env::Environment>> envs;
  for (int w = 1; w < cfg_.workers; ++w) envs.push_back(env.clone());
  std::vector<std::thread> threads;
  std::exception_ptr failure;
  std::mutex fail_mu;
  for (int w = 1; w < cfg_.workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        run_worker(w, *envs[w - 1], derive_seed(episode_seed, {tag(Stream::worker), static_cast<std::uint64_t>(w)}),
                   nullptr);
      } catch (...) {
        std::lock_guard lock(fail_mu);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  try {
    run_worker(0, env, episode_seed, &observer);
  } catch (...) {
    std::lock_guard lock(fail_mu);
    if (!failure) failure = std::current_exception();
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

nn::Checkpoint A3cAgent::checkpoint() const {
  nn::Checkpoint ck;
  ck.nets = {{"policy_mean", store_.policy().mean}, {"value", store_.value()}};
  ck.vectors = {{"log_std", store_.policy().log_std}};
  ck.meta = {{"agent", "a3c"}, {"obs_dim", obs_dim_}, {"act_dim", act_dim_}, {"updates", store_.applied()}};
  return ck;
}

void A3cAgent::restore(const nn::Checkpoint& ck) {
  const nn::Mlp& mean = ck.net("policy_mean");
  const nn::Mlp& value = ck.net("value");
  const auto& ls = ck.vec("log_std");
  if (mean.widths() != store_.policy().mean.widths() || value.widths() != store_.value().widths() ||
      ls.size() != store_.policy().log_std.size())
    throw CheckpointError("a3c: checkpoint shapes do not match the agent");
  store_.policy().mean = mean;
  store_.policy().log_std = ls;
  store_.value() = value;
}

}  // namespace skyris::agents
