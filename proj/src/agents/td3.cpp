#include "skyris/agents/td3.hpp"

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

nn::Mat join(const nn::Mat& a, const nn::Mat& b) {
  nn::Mat out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

}  // namespace

void from_json(const nlohmann::json& j, Td3Config& c) {
  c.hidden = j.value("hidden", c.hidden);
  c.gamma = j.value("gamma", c.gamma);
  c.tau = j.value("tau", c.tau);
  c.sigma_explore = j.value("sigma_explore", c.sigma_explore);
  c.sigma_target = j.value("sigma_target", c.sigma_target);
  c.noise_clip = j.value("noise_clip", c.noise_clip);
  c.policy_delay = j.value("policy_delay", c.policy_delay);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.buffer_size = j.value("buffer_size", c.buffer_size);
  c.actor_lr = j.value("actor_lr", c.actor_lr);
  c.critic_lr = j.value("critic_lr", c.critic_lr);
  c.start_steps = j.value("start_steps", c.start_steps);
  c.updates_per_step = j.value("updates_per_step", c.updates_per_step);
}

void to_json(nlohmann::json& j, const Td3Config& c) {
  j = {{"hidden", c.hidden},         {"gamma", c.gamma},
       {"tau", c.tau},               {"sigma_explore", c.sigma_explore},
       {"sigma_target", c.sigma_target}, {"noise_clip", c.noise_clip},
       {"policy_delay", c.policy_delay}, {"batch_size", c.batch_size},
       {"buffer_size", c.buffer_size},   {"actor_lr", c.actor_lr},
       {"critic_lr", c.critic_lr},       {"start_steps", c.start_steps},
       {"updates_per_step", c.updates_per_step}};
}

Eigen::VectorXd td3_target(const Td3Targets& targets, const Batch& batch, double gamma, double sigma_target,
                           double noise_clip, Rng& rng) {
  nn::Mat a_next = targets.actor.forward(batch.next_obs);
  for (Eigen::Index k = 0; k < a_next.size(); ++k) {
    const double eps = sigma_target > 0.0 ? std::clamp(sigma_target * standard_normal(rng), -noise_clip, noise_clip) : 0.0;
    a_next.data()[k] = std::clamp(a_next.data()[k] + eps, -1.0, 1.0);
  }
  const nn::Mat sa = join(batch.next_obs, a_next);
  const nn::Mat q1 = targets.q1.forward(sa);
  const nn::Mat q2 = targets.q2.forward(sa);
  Eigen::VectorXd y(batch.reward.size());
  for (Eigen::Index r = 0; r < y.size(); ++r)
    y[r] = batch.reward[r] + gamma * (1.0 - batch.terminal[r]) * std::min(q1(r, 0), q2(r, 0));
  return y;
}

Td3Agent::Td3Agent(int obs_dim, int act_dim, Td3Config cfg, std::uint64_t seed)
    : obs_dim_(obs_dim),
      act_dim_(act_dim),
      cfg_(std::move(cfg)),
      buffer_(static_cast<std::size_t>(std::max(cfg_.buffer_size, 1)), obs_dim, act_dim),
      explore_rng_(derive_seed(seed, {tag(Stream::exploration)})),
      replay_rng_(derive_seed(seed, {tag(Stream::replay)})),
      target_rng_(derive_seed(seed, {tag(Stream::replay), 1})) {
  if (cfg_.policy_delay < 1 || cfg_.batch_size < 1) throw DomainError("td3: policy_delay and batch_size must be positive");
  Rng init(derive_seed(seed, {tag(Stream::policy_init)}));
  actor_ = nn::Mlp(layer_widths(obs_dim, cfg_.hidden, act_dim), nn::Output::tanh, init, 0.01);
  q1_ = nn::Mlp(layer_widths(obs_dim + act_dim, cfg_.hidden, 1), nn::Output::identity, init);
  q2_ = nn::Mlp(layer_widths(obs_dim + act_dim, cfg_.hidden, 1), nn::Output::identity, init);
  actor_t_ = actor_;
  q1_t_ = q1_;
  q2_t_ = q2_;
  actor_opt_ = nn::Adam(actor_.param_count(), cfg_.actor_lr);
  q1_opt_ = nn::Adam(q1_.param_count(), cfg_.critic_lr);
  q2_opt_ = nn::Adam(q2_.param_count(), cfg_.critic_lr);
}

std::vector<double> Td3Agent::act(std::span<const double> obs) const { return actor_.forward(obs); }

std::vector<double> Td3Agent::select_action(std::span<const double> obs, bool explore) {
  std::vector<double> a = actor_.forward(obs);
  if (explore && cfg_.sigma_explore > 0.0)
    for (auto& x : a) x += std::clamp(cfg_.sigma_explore * standard_normal(explore_rng_), -cfg_.noise_clip, cfg_.noise_clip);
  clamp_unit(a);
  return a;
}

double Td3Agent::critic_step(nn::Mlp& q, nn::Adam& opt, const nn::Mat& sa, const Eigen::VectorXd& y) {
  nn::Mlp::Cache cache;
  const nn::Mat out = q.forward(sa, &cache);
  const auto n = static_cast<double>(y.size());
  nn::Mat dy(y.size(), 1);
  double loss = 0.0;
  for (Eigen::Index r = 0; r < y.size(); ++r) {
    const double e = out(r, 0) - y[r];
    loss += 0.5 * e * e / n;
    dy(r, 0) = e / n;
  }
  std::vector<double> g(q.param_count(), 0.0);
  q.backward(cache, dy, g);
  opt.step(q.params(), g);
  return loss;
}

Td3Step Td3Agent::update(const Batch& batch) {
  Td3Step st;
  const Eigen::VectorXd y = td3_target({actor_t_, q1_t_, q2_t_}, batch, cfg_.gamma, cfg_.sigma_target,
                                       cfg_.noise_clip, target_rng_);
  const nn::Mat sa = join(batch.obs, batch.action);
  st.critic_loss = critic_step(q1_, q1_opt_, sa, y) + critic_step(q2_, q2_opt_, sa, y);
  ++critic_updates_;

  UpdateRecord rec;
  rec.update = critic_updates_;
  rec.critic_loss = st.critic_loss;

  if (critic_updates_ % cfg_.policy_delay == 0) {
    // ascend q1(s, mu(s))
    nn::Mlp::Cache a_cache;
    const nn::Mat a = actor_.forward(batch.obs, &a_cache);
    nn::Mlp::Cache q_cache;
    const nn::Mat q = q1_.forward(join(batch.obs, a), &q_cache);
    const auto n = static_cast<double>(batch.obs.rows());
    nn::Mat dq = nn::Mat::Constant(batch.obs.rows(), 1, -1.0 / n);
    std::vector<double> unused(q1_.param_count(), 0.0);
    nn::Mat d_sa;
    q1_.backward(q_cache, dq, unused, &d_sa);
    const nn::Mat da = d_sa.rightCols(act_dim_);
    std::vector<double> g(actor_.param_count(), 0.0);
    actor_.backward(a_cache, da, g);
    actor_opt_.step(actor_.params(), g);
    st.actor_loss = -q.mean();
    st.actor_updated = true;
    ++actor_updates_;
    nn::polyak(actor_t_, actor_, cfg_.tau);
    nn::polyak(q1_t_, q1_, cfg_.tau);
    nn::polyak(q2_t_, q2_, cfg_.tau);
    rec.actor_loss = st.actor_loss;
    rec.grad_norm = l2_norm(g);
  }
  log_.push_back(rec);
  return st;
}

Td3Step Td3Agent::update_from_buffer() {
  return update(buffer_.sample(static_cast<std::size_t>(cfg_.batch_size), replay_rng_));
}

void Td3Agent::train_episode(env::Environment& env, std::uint64_t episode_seed, const StepObserver& observer) {
  if (env.obs_size() != obs_dim_ || env.action_size() != act_dim_)
    throw StructuralError("td3: environment dimensions do not match the agent");
  std::vector<double> obs = env.reset(episode_seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    std::vector<double> a;
    if (env_steps_ < cfg_.start_steps) {
      a.resize(act_dim_);
      for (auto& x : a) x = u(explore_rng_);
    } else {
      a = select_action(obs, true);
    }
    env::StepResult res = env.step(a);
    ++env_steps_;
    // the horizon is a time limit, not an absorbing state
    buffer_.add(obs, a, res.reward, res.obs, false);
    if (observer) observer(obs, a, res);
    if (buffer_.size() >= static_cast<std::size_t>(cfg_.batch_size) && env_steps_ >= cfg_.start_steps)
      for (int k = 0; k < cfg_.updates_per_step; ++k) update_from_buffer();
    if (res.done) break;
    obs = std::move(res.obs);
  }
}

nn::Checkpoint Td3Agent::checkpoint() const {
  nn::Checkpoint ck;
  ck.nets = {{"actor", actor_}, {"q1", q1_}, {"q2", q2_}, {"actor_target", actor_t_}, {"q1_target", q1_t_},
             {"q2_target", q2_t_}};
  ck.meta = {{"agent", "td3"}, {"obs_dim", obs_dim_}, {"act_dim", act_dim_}, {"critic_updates", critic_updates_},
             {"actor_updates", actor_updates_}, {"env_steps", env_steps_}};
  return ck;
}

void Td3Agent::restore(const nn::Checkpoint& ck) {
  auto take = [&](nn::Mlp& dst, const char* name) {
    const nn::Mlp& src = ck.net(name);
    if (src.widths() != dst.widths() || src.output() != dst.output())
      throw CheckpointError(std::string("td3: network '") + name + "' has incompatible shape");
    dst = src;
  };
  take(actor_, "actor");
  take(q1_, "q1");
  take(q2_, "q2");
  take(actor_t_, "actor_target");
  take(q1_t_, "q1_target");
  take(q2_t_, "q2_target");
}

}  // namespace skyris::agents
