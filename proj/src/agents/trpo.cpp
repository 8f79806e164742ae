#include "skyris/agents/trpo.hpp"

#include <algorithm>
#include <cmath>

#include "skyris/errors.hpp"

namespace skyris::agents {
namespace {

std::vector<int> layer_widths(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> w{in};
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(out);
  return w;
}

double dotv(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

nn::Mat stack(const std::vector<std::vector<double>>& rows, int width) {
  nn::Mat m(static_cast<Eigen::Index>(rows.size()), width);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (static_cast<int>(rows[r].size()) != width) throw StructuralError("trpo: row width mismatch");
    std::copy(rows[r].begin(), rows[r].end(), m.data() + r * width);
  }
  return m;
}

std::vector<double> logprobs(const nn::Mat& mu, std::span<const double> log_std, const nn::Mat& act) {
  const auto ad = static_cast<std::size_t>(mu.cols());
  std::vector<double> lp(mu.rows());
  for (Eigen::Index r = 0; r < mu.rows(); ++r)
    lp[r] = nn::gaussian_logprob({mu.data() + r * ad, ad}, log_std, {act.data() + r * ad, ad});
  return lp;
}

}  // namespace

void from_json(const nlohmann::json& j, TrpoConfig& c) {
  c.hidden = j.value("hidden", c.hidden);
  c.gamma = j.value("gamma", c.gamma);
  c.lambda_gae = j.value("lambda_gae", c.lambda_gae);
  c.delta_kl = j.value("delta_kl", c.delta_kl);
  c.cg_iters = j.value("cg_iters", c.cg_iters);
  c.damping = j.value("damping", c.damping);
  c.backtrack = j.value("backtrack", c.backtrack);
  c.max_backtracks = j.value("max_backtracks", c.max_backtracks);
  c.value_lr = j.value("value_lr", c.value_lr);
  c.value_iters = j.value("value_iters", c.value_iters);
  c.episodes_per_update = j.value("episodes_per_update", c.episodes_per_update);
  c.init_log_std = j.value("init_log_std", c.init_log_std);
}

void to_json(nlohmann::json& j, const TrpoConfig& c) {
  j = {{"hidden", c.hidden},
       {"gamma", c.gamma},
       {"lambda_gae", c.lambda_gae},
       {"delta_kl", c.delta_kl},
       {"cg_iters", c.cg_iters},
       {"damping", c.damping},
       {"backtrack", c.backtrack},
       {"max_backtracks", c.max_backtracks},
       {"value_lr", c.value_lr},
       {"value_iters", c.value_iters},
       {"episodes_per_update", c.episodes_per_update},
       {"init_log_std", c.init_log_std}};
}

std::vector<double> conjugate_gradient(const LinearOp& a, std::span<const double> b, int iters, double tol) {
  std::vector<double> x(b.size(), 0.0);
  std::vector<double> r(b.begin(), b.end());
  std::vector<double> p = r;
  double rr = dotv(r, r);
  for (int it = 0; it < iters && rr > tol; ++it) {
    const std::vector<double> ap = a(p);
    const double pap = dotv(p, ap);
    if (!(pap > 0.0)) break;
    const double alpha = rr / pap;
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    const double rr_new = dotv(r, r);
    const double beta = rr_new / rr;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = r[i] + beta * p[i];
    rr = rr_new;
  }
  return x;
}

TrpoAgent::TrpoAgent(int obs_dim, int act_dim, TrpoConfig cfg, std::uint64_t seed)
    : obs_dim_(obs_dim), act_dim_(act_dim), cfg_(std::move(cfg)), rng_(derive_seed(seed, {tag(Stream::exploration)})) {
  if (!(cfg_.delta_kl > 0.0) || cfg_.cg_iters < 1 || cfg_.episodes_per_update < 1)
    throw DomainError("trpo: delta_kl, cg_iters and episodes_per_update must be positive");
  Rng init(derive_seed(seed, {tag(Stream::policy_init)}));
  policy_ = nn::GaussianPolicy(nn::Mlp(layer_widths(obs_dim, cfg_.hidden, act_dim), nn::Output::tanh, init, 0.01),
                               cfg_.init_log_std);
  Rng vinit(derive_seed(seed, {tag(Stream::policy_init), 1}));
  value_ = nn::Mlp(layer_widths(obs_dim, cfg_.hidden, 1), nn::Output::identity, vinit);
  value_opt_ = nn::Adam(value_.param_count(), cfg_.value_lr);
}

std::vector<double> TrpoAgent::act(std::span<const double> obs) const { return policy_.mean.forward(obs); }

double TrpoAgent::mean_kl(const nn::GaussianPolicy& old_policy, const nn::GaussianPolicy& policy, const nn::Mat& obs) {
  const nn::Mat mu_old = old_policy.mean.forward(obs);
  const nn::Mat mu_new = policy.mean.forward(obs);
  const auto ad = static_cast<std::size_t>(mu_old.cols());
  double kl = 0.0;
  for (Eigen::Index r = 0; r < obs.rows(); ++r)
    kl += nn::gaussian_kl({mu_old.data() + r * ad, ad}, old_policy.log_std, {mu_new.data() + r * ad, ad},
                          policy.log_std);
  return obs.rows() > 0 ? kl / static_cast<double>(obs.rows()) : 0.0;
}

TrpoStep TrpoAgent::update(std::span<const Trajectory> trajs) {
  TrpoStep st;
  std::vector<std::vector<double>> obs_rows, act_rows;
  for (const auto& tr : trajs) {
    obs_rows.insert(obs_rows.end(), tr.obs.begin(), tr.obs.end());
    act_rows.insert(act_rows.end(), tr.action.begin(), tr.action.end());
  }
  if (obs_rows.empty()) throw PreconditionError("trpo: empty batch");
  const nn::Mat obs = stack(obs_rows, obs_dim_);
  const nn::Mat act = stack(act_rows, act_dim_);
  const auto n = static_cast<double>(obs.rows());

  const AdvantageEstimate est = estimate_advantages(trajs, value_, cfg_.gamma, cfg_.lambda_gae);
  const std::vector<double> adv = normalize_advantages(est.advantage);

  // policy gradient of the surrogate at the current parameters (ratio = 1)
  nn::Mlp::Cache cache;
  const nn::Mat mu = policy_.mean.forward(obs, &cache);
  const std::vector<double> lp_old = logprobs(mu, policy_.log_std, act);
  std::vector<double> ls(act_dim_), inv_var(act_dim_);
  for (int d = 0; d < act_dim_; ++d) {
    ls[d] = std::clamp(policy_.log_std[d], nn::kLogStdMin, nn::kLogStdMax);
    inv_var[d] = std::exp(-2.0 * ls[d]);
  }
  nn::Mat dmu(obs.rows(), act_dim_);
  std::vector<double> g(policy_.param_count(), 0.0);
  const std::size_t n_mean = policy_.mean.param_count();
  for (Eigen::Index r = 0; r < obs.rows(); ++r) {
    for (int d = 0; d < act_dim_; ++d) {
      const double diff = act(r, d) - mu(r, d);
      dmu(r, d) = adv[r] * diff * inv_var[d] / n;
      g[n_mean + d] += adv[r] * (diff * diff * inv_var[d] - 1.0) / n;
    }
  }
  policy_.mean.backward(cache, dmu, std::span<double>(g.data(), n_mean));
  st.grad_norm = l2_norm(g);

  double surr_old = 0.0;
  for (double a : adv) surr_old += a;
  surr_old /= n;

  if (st.grad_norm > 0.0 && std::isfinite(st.grad_norm)) {
    const LinearOp fisher = [&](std::span<const double> v) {
      const nn::Mat jv = policy_.mean.jvp(cache, v.first(n_mean));
      nn::Mat u(jv.rows(), jv.cols());
      for (Eigen::Index r = 0; r < jv.rows(); ++r)
        for (int d = 0; d < act_dim_; ++d) u(r, d) = jv(r, d) * inv_var[d] / n;
      std::vector<double> out(v.size(), 0.0);
      policy_.mean.backward(cache, u, std::span<double>(out.data(), n_mean));
      for (int d = 0; d < act_dim_; ++d) out[n_mean + d] = 2.0 * v[n_mean + d];
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += cfg_.damping * v[i];
      return out;
    };
    const std::vector<double> s = conjugate_gradient(fisher, g, cfg_.cg_iters);
    const double shs = dotv(s, fisher(s));
    if (shs > 0.0 && std::isfinite(shs)) {
      const double scale = std::sqrt(2.0 * cfg_.delta_kl / shs);
      const std::vector<double> theta_old = policy_.get_flat();
      const nn::GaussianPolicy old_policy = policy_;
      std::vector<double> trial(theta_old.size());
      double frac = 1.0;
      for (int k = 0; k < cfg_.max_backtracks; ++k, frac *= cfg_.backtrack) {
        for (std::size_t i = 0; i < trial.size(); ++i) trial[i] = theta_old[i] + frac * scale * s[i];
        policy_.set_flat(trial);
        const nn::Mat mu_new = policy_.mean.forward(obs);
        const std::vector<double> lp_new = logprobs(mu_new, policy_.log_std, act);
        double surr = 0.0;
        for (Eigen::Index r = 0; r < obs.rows(); ++r) surr += std::exp(lp_new[r] - lp_old[r]) * adv[r];
        surr /= n;
        const double kl = mean_kl(old_policy, policy_, obs);
        if (std::isfinite(surr) && surr > surr_old && kl <= cfg_.delta_kl) {
          st.accepted = true;
          st.kl = kl;
          st.surrogate_gain = surr - surr_old;
          st.backtracks = k;
          break;
        }
      }
      if (!st.accepted) policy_.set_flat(theta_old);
      else policy_.clamp_log_std();
    }
  }

  // critic: 1/2 mean (V - R)^2
  std::vector<double> vg(value_.param_count());
  for (int it = 0; it < cfg_.value_iters; ++it) {
    nn::Mlp::Cache vc;
    const nn::Mat v = value_.forward(obs, &vc);
    nn::Mat dv(obs.rows(), 1);
    double loss = 0.0;
    for (Eigen::Index r = 0; r < obs.rows(); ++r) {
      const double e = v(r, 0) - est.ret[r];
      loss += 0.5 * e * e / n;
      dv(r, 0) = e / n;
    }
    std::fill(vg.begin(), vg.end(), 0.0);
    value_.backward(vc, dv, vg);
    value_opt_.step(value_.params(), vg);
    st.value_loss = loss;
  }

  ++updates_;
  UpdateRecord rec;
  rec.update = updates_;
  rec.actor_loss = -st.surrogate_gain;
  rec.critic_loss = st.value_loss;
  rec.kl = st.kl;
  rec.grad_norm = st.grad_norm;
  rec.accepted = st.accepted;
  log_.push_back(rec);
  return st;
}

Trajectory TrpoAgent::collect(env::Environment& env, std::uint64_t episode_seed, const StepObserver& observer) {
  if (env.obs_size() != obs_dim_ || env.action_size() != act_dim_)
    throw StructuralError("trpo: environment dimensions do not match the agent");
  Trajectory tr;
  std::vector<double> obs = env.reset(episode_seed);
  for (;;) {
    std::vector<double> a = policy_.sample(obs, rng_);
    std::vector<double> sent = a;
    clamp_unit(sent);
    env::StepResult res = env.step(sent);
    if (observer) observer(obs, sent, res);
    tr.obs.push_back(std::move(obs));
    tr.action.push_back(std::move(a));
    tr.reward.push_back(res.reward);
    obs = std::move(res.obs);
    if (res.done) break;
  }
  tr.final_obs = std::move(obs);
  tr.terminal = false;
  return tr;
}

void TrpoAgent::train_episode(env::Environment& env, std::uint64_t episode_seed, const StepObserver& observer) {
  pending_.push_back(collect(env, episode_seed, observer));
  if (static_cast<int>(pending_.size()) >= cfg_.episodes_per_update) {
    update(pending_);
    pending_.clear();
  }
}

nn::Checkpoint TrpoAgent::checkpoint() const {
  nn::Checkpoint ck;
  ck.nets = {{"policy_mean", policy_.mean}, {"value", value_}};
  ck.vectors = {{"log_std", policy_.log_std}};
  ck.meta = {{"agent", "trpo"}, {"obs_dim", obs_dim_}, {"act_dim", act_dim_}, {"updates", updates_}};
  return ck;
}

void TrpoAgent::restore(const nn::Checkpoint& ck) {
  const nn::Mlp& mean = ck.net("policy_mean");
  const nn::Mlp& value = ck.net("value");
  const auto& ls = ck.vec("log_std");
  if (mean.widths() != policy_.mean.widths() || value.widths() != value_.widths() || ls.size() != policy_.log_std.size())
    throw CheckpointError("trpo: checkpoint shapes do not match the agent");
  policy_.mean = mean;
  policy_.log_std = ls;
  value_ = value;
}

}  // namespace skyris::agents
