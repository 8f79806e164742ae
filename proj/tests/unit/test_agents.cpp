#include <cmath>
#include <memory>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "skyris/agents/a3c.hpp"
#include "skyris/agents/advantages.hpp"
#include "skyris/agents/replay.hpp"
#include "skyris/agents/td3.hpp"
#include "skyris/agents/trpo.hpp"
#include "skyris/errors.hpp"

using namespace skyris;
using namespace skyris::agents;

namespace {

// One-dimensional bandit: constant observation, reward -(a - target)^2.
class QuadraticBandit final : public env::Environment {
 public:
  explicit QuadraticBandit(int horizon = 10, double target = 0.3) : horizon_(horizon), target_(target) {}
  int obs_size() const override { return 1; }
  int action_size() const override { return 1; }
  int horizon() const override { return horizon_; }
  std::vector<double> reset(std::uint64_t) override {
    t_ = 0;
    return {1.0};
  }
  env::StepResult step(std::span<const double> a) override {
    env::StepResult r;
    r.obs = {1.0};
    r.reward = -(a[0] - target_) * (a[0] - target_);
    r.done = ++t_ >= horizon_;
    return r;
  }
  std::unique_ptr<env::Environment> clone() const override { return std::make_unique<QuadraticBandit>(*this); }

 private:
  int horizon_;
  double target_;
  int t_ = 0;
};

template <class A>
double train_bandit(A& agent, int steps) {
  QuadraticBandit env;
  const int episodes = steps / env.horizon();
  for (int e = 0; e < episodes; ++e) agent.train_episode(env, static_cast<std::uint64_t>(e + 1), {});
  return agent.act(std::vector<double>{1.0})[0];
}

}  // namespace

TEST_SUITE("agents") {

TEST_CASE("replay buffer: ring order and errors") {
  ReplayBuffer buf(3, 1, 1);
  CHECK_THROWS_AS(ReplayBuffer(0, 1, 1), DomainError);
  Rng rng(1);
  CHECK_THROWS_AS(buf.sample(1, rng), PreconditionError);
  for (int k = 0; k < 5; ++k)
    buf.add(std::vector<double>{double(k)}, std::vector<double>{0.1 * k}, double(k), std::vector<double>{k + 1.0},
            k == 4);
  CHECK(buf.size() == 3);
  const std::vector<std::size_t> idx{0, 1, 2};
  const Batch b = buf.gather(idx);
  CHECK(b.reward[0] == 3.0);
  CHECK(b.reward[1] == 4.0);
  CHECK(b.reward[2] == 2.0);
  CHECK(b.next_obs(1, 0) == 5.0);
  CHECK(b.terminal[1] == 1.0);
  CHECK(b.terminal[0] == 0.0);
  CHECK_THROWS_AS(buf.sample(4, rng), PreconditionError);
  CHECK_THROWS_AS(buf.gather(std::vector<std::size_t>{3}), PreconditionError);
  CHECK_THROWS_AS(buf.add(std::vector<double>{1, 2}, std::vector<double>{0}, 0, std::vector<double>{1}, false),
                  StructuralError);
  const Batch s = buf.sample(3, rng);
  for (Eigen::Index r = 0; r < 3; ++r) CHECK((s.reward[r] >= 2.0 && s.reward[r] <= 4.0));
}

TEST_CASE("n-step returns") {
  const auto r = nstep_returns(std::vector<double>{1.0, 2.0}, 2.0, 0.5);
  CHECK(r[1] == 3.0);
  CHECK(r[0] == 2.5);
  CHECK(nstep_returns(std::vector<double>{}, 5.0, 0.9).empty());
  const auto z = nstep_returns(std::vector<double>{1.0, 1.0, 1.0}, 7.0, 0.0);
  CHECK(z == std::vector<double>{1.0, 1.0, 1.0});
}

TEST_CASE("a3c gradients: one-step bandit against the analytic form") {
  nn::Mlp mean({1, 1}, nn::Output::identity);
  mean.set_flat(std::vector<double>{0.2, -0.1});
  nn::GaussianPolicy pol(mean, std::log(0.5));
  nn::Mlp value({1, 1}, nn::Output::identity);
  value.set_flat(std::vector<double>{0.3, 0.1});
  Rollout ro;
  ro.obs = nn::Mat::Constant(1, 1, 2.0);
  ro.action = nn::Mat::Constant(1, 1, 0.7);
  ro.reward = {1.5};
  ro.bootstrap = 0.0;
  const double beta = 0.05;
  const auto g = a3c_gradients(pol, value, ro, 0.9, beta);

  const double s = 2.0, a = 0.7, mu = 0.2 * s - 0.1, sig2 = 0.25;
  const double v = 0.3 * s + 0.1, adv = 1.5 - v;
  const double dmu = -adv * (a - mu) / sig2;
  CHECK(g.actor[0] == doctest::Approx(dmu * s).epsilon(1e-12));
  CHECK(g.actor[1] == doctest::Approx(dmu).epsilon(1e-12));
  CHECK(g.actor[2] == doctest::Approx(-adv * ((a - mu) * (a - mu) / sig2 - 1.0) - beta).epsilon(1e-12));
  CHECK(g.critic[0] == doctest::Approx(-2.0 * adv * s).epsilon(1e-12));
  CHECK(g.critic[1] == doctest::Approx(-2.0 * adv).epsilon(1e-12));
  CHECK(g.critic_loss == doctest::Approx(adv * adv));
}

TEST_CASE("a3c gradients: zero advantage and no entropy gives a zero actor gradient") {
  Rng rng(2);
  nn::GaussianPolicy pol(nn::Mlp({2, 4, 1}, nn::Output::tanh, rng), -0.5);
  nn::Mlp value({2, 1}, nn::Output::identity);
  value.set_flat(std::vector<double>{0.0, 0.0, 1.0});
  Rollout ro;
  ro.obs = nn::Mat::Constant(2, 2, 0.5);
  ro.action = nn::Mat::Constant(2, 1, 0.3);
  ro.reward = {0.0, 1.0};  // returns {1, 1} with gamma 1 equal V = 1
  ro.bootstrap = 0.0;
  const auto g = a3c_gradients(pol, value, ro, 1.0, 0.0);
  for (double x : g.actor) CHECK(x == 0.0);
  for (double x : g.critic) CHECK(x == 0.0);
  ro.reward = {0.0};
  CHECK_THROWS_AS(a3c_gradients(pol, value, ro, 1.0, 0.0), StructuralError);
}

TEST_CASE("gae: lambda 1 and lambda 0 identities") {
  Rng rng(3);
  nn::Mlp value({2, 5, 1}, nn::Output::identity, rng);
  Trajectory tr;
  for (int t = 0; t < 6; ++t) {
    tr.obs.push_back({uniform01(rng), uniform01(rng)});
    tr.action.push_back({0.0});
    tr.reward.push_back(uniform01(rng) - 0.5);
  }
  tr.final_obs = {0.2, 0.4};
  const double gamma = 0.9;
  std::vector<double> v;
  for (const auto& o : tr.obs) v.push_back(value.forward(o)[0]);
  const double vf = value.forward(tr.final_obs)[0];

  for (bool terminal : {false, true}) {
    tr.terminal = terminal;
    const double boot = terminal ? 0.0 : vf;
    const std::vector<Trajectory> one{tr};
    const auto mc = estimate_advantages(one, value, gamma, 1.0);
    const auto td = estimate_advantages(one, value, gamma, 0.0);
    const auto ret = nstep_returns(tr.reward, boot, gamma);
    for (int t = 0; t < 6; ++t) {
      CHECK(mc.advantage[t] == doctest::Approx(ret[t] - v[t]).epsilon(1e-12));
      CHECK(mc.ret[t] == doctest::Approx(ret[t]).epsilon(1e-12));
      const double next = t + 1 < 6 ? v[t + 1] : boot;
      CHECK(td.advantage[t] == doctest::Approx(tr.reward[t] + gamma * next - v[t]).epsilon(1e-12));
    }
  }
  const std::vector<Trajectory> two{tr, tr};
  CHECK(estimate_advantages(two, value, gamma, 0.95).advantage.size() == 12);
}

TEST_CASE("advantage normalization") {
  const auto n = normalize_advantages(std::vector<double>{1.0, 2.0, 3.0, 4.0});
  CHECK(std::accumulate(n.begin(), n.end(), 0.0) == doctest::Approx(0.0).scale(1.0));
  double ss = 0.0;
  for (double x : n) ss += x * x;
  CHECK(ss / 4 == doctest::Approx(1.0));
  const auto flat = normalize_advantages(std::vector<double>{5.0, 5.0, 5.0});
  for (double x : flat) CHECK(x == 0.0);
  CHECK(normalize_advantages(std::vector<double>{}).empty());
}

TEST_CASE("conjugate gradient solves an SPD system") {
  Eigen::Matrix3d a;
  a << 4, 1, 0, 1, 3, 1, 0, 1, 2;
  const LinearOp op = [&](std::span<const double> v) {
    const Eigen::Vector3d x = a * Eigen::Vector3d(v[0], v[1], v[2]);
    return std::vector<double>{x[0], x[1], x[2]};
  };
  const std::vector<double> b{1.0, 2.0, 3.0};
  const auto x = conjugate_gradient(op, b, 10);
  const Eigen::Vector3d ref = a.ldlt().solve(Eigen::Vector3d(1, 2, 3));
  for (int i = 0; i < 3; ++i) CHECK(x[i] == doctest::Approx(ref[i]).epsilon(1e-10));
  const LinearOp id = [](std::span<const double> v) { return std::vector<double>(v.begin(), v.end()); };
  CHECK(conjugate_gradient(id, b, 1) == b);
}

TEST_CASE("trpo: zero advantages leave the policy unchanged") {
  TrpoConfig cfg;
  cfg.hidden = {8};
  TrpoAgent agent(1, 1, cfg, 4);
  std::vector<double> zeros(agent.value().param_count(), 0.0);
  agent.value().set_flat(zeros);
  Trajectory tr;
  for (int t = 0; t < 5; ++t) {
    tr.obs.push_back({1.0});
    tr.action.push_back({0.1 * t});
    tr.reward.push_back(0.0);
  }
  tr.final_obs = {1.0};
  const auto before = agent.policy().get_flat();
  const std::vector<Trajectory> batch{tr};
  const auto st = agent.update(batch);
  CHECK_FALSE(st.accepted);
  CHECK(st.grad_norm == 0.0);
  CHECK(agent.policy().get_flat() == before);
  CHECK_THROWS_AS(agent.update(std::vector<Trajectory>{}), PreconditionError);
}

TEST_CASE("trpo: accepted steps respect the KL bound") {
  TrpoConfig cfg;
  cfg.hidden = {8};
  cfg.delta_kl = 0.02;
  cfg.gamma = 0.0;
  TrpoAgent agent(1, 1, cfg, 5);
  QuadraticBandit env;
  for (int e = 0; e < 20; ++e) {
    const auto tr = agent.collect(env, e + 1, {});
    const nn::GaussianPolicy old = agent.policy();
    nn::Mat obs(static_cast<Eigen::Index>(tr.obs.size()), 1);
    for (Eigen::Index r = 0; r < obs.rows(); ++r) obs(r, 0) = tr.obs[r][0];
    const auto st = agent.update(std::vector<Trajectory>{tr});
    if (st.accepted) {
      CHECK(TrpoAgent::mean_kl(old, agent.policy(), obs) <= cfg.delta_kl * (1 + 1e-9));
      CHECK(st.surrogate_gain > 0.0);
    } else {
      CHECK(agent.policy().get_flat() == old.get_flat());
    }
  }
}

TEST_CASE("td3: target on a handcrafted batch") {
  nn::Mlp actor({1, 1}, nn::Output::tanh);
  nn::Mlp q1({2, 1}, nn::Output::identity), q2({2, 1}, nn::Output::identity);
  q1.set_flat(std::vector<double>{0.0, 0.0, 3.0});
  q2.set_flat(std::vector<double>{0.0, 0.0, 2.0});
  Batch b{nn::Mat::Constant(2, 1, 1.0), nn::Mat::Zero(2, 1), Eigen::VectorXd(2), nn::Mat::Constant(2, 1, 1.0),
          Eigen::VectorXd(2)};
  b.reward << 1.0, 1.0;
  b.terminal << 0.0, 1.0;
  Rng rng(1);
  const Eigen::VectorXd y = td3_target({actor, q1, q2}, b, 0.9, 0.0, 0.5, rng);
  CHECK(y[0] == doctest::Approx(2.8));
  CHECK(y[1] == 1.0);
  const Eigen::VectorXd y0 = td3_target({actor, q1, q2}, b, 0.0, 0.2, 0.5, rng);
  CHECK(y0[0] == 1.0);
  CHECK(y0[1] == 1.0);
}

TEST_CASE("td3: target policy smoothing noise is clipped") {
  nn::Mlp actor({1, 1}, nn::Output::tanh);
  nn::Mlp q({2, 1}, nn::Output::identity);
  q.set_flat(std::vector<double>{0.0, 1.0, 0.0});  // Q(s, a) = a
  Batch b{nn::Mat::Zero(200, 1), nn::Mat::Zero(200, 1), Eigen::VectorXd::Zero(200), nn::Mat::Zero(200, 1),
          Eigen::VectorXd::Zero(200)};
  Rng rng(2);
  const Eigen::VectorXd y = td3_target({actor, q, q}, b, 1.0, 10.0, 0.3, rng);
  for (Eigen::Index r = 0; r < y.size(); ++r) CHECK(std::abs(y[r]) <= 0.3 + 1e-15);
  CHECK(y.cwiseAbs().maxCoeff() == doctest::Approx(0.3));
}

TEST_CASE("td3: targets track the online networks by polyak averaging") {
  Td3Config cfg;
  cfg.hidden = {4};
  Td3Agent agent(1, 1, cfg, 1);
  nn::Mlp t = agent.actor_target();
  const nn::Mlp& online = agent.actor();
  auto p = online.get_flat();
  for (auto& x : p) x += 1.0;
  agent.actor().set_flat(p);
  for (int k = 0; k < 3000; ++k) nn::polyak(t, agent.actor(), cfg.tau);
  for (std::size_t k = 0; k < p.size(); ++k) CHECK(t.params()[k] == doctest::Approx(p[k]).epsilon(1e-6));
}

TEST_CASE("td3: select_action stays in the unit box") {
  Td3Config cfg;
  cfg.hidden = {4};
  cfg.sigma_explore = 5.0;
  cfg.noise_clip = 5.0;
  Td3Agent agent(2, 3, cfg, 1);
  for (int k = 0; k < 200; ++k) {
    const auto a = agent.select_action(std::vector<double>{0.5, -0.5}, true);
    CHECK(a.size() == 3);
    for (double x : a) CHECK(std::abs(x) <= 1.0);
  }
  CHECK(agent.select_action(std::vector<double>{0.5, -0.5}, false) == agent.act(std::vector<double>{0.5, -0.5}));
}

TEST_CASE("agents reject mismatched environments") {
  QuadraticBandit env;
  Td3Agent td3(2, 1, Td3Config{}, 1);
  A3cAgent a3c(1, 2, A3cConfig{}, 1);
  TrpoAgent trpo(3, 1, TrpoConfig{}, 1);
  CHECK_THROWS_AS(td3.train_episode(env, 1, {}), StructuralError);
  CHECK_THROWS_AS(a3c.train_episode(env, 1, {}), StructuralError);
  CHECK_THROWS_AS(trpo.train_episode(env, 1, {}), StructuralError);
}

TEST_CASE("toy bandit: td3 converges") {
  int ok = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Td3Config cfg;
    cfg.hidden = {16, 16};
    cfg.gamma = 0.0;
    cfg.batch_size = 32;
    cfg.start_steps = 200;
    cfg.buffer_size = 5000;
    cfg.sigma_explore = 0.2;
    Td3Agent agent(1, 1, cfg, seed);
    const double a = train_bandit(agent, 5000);
    MESSAGE("td3 seed " << seed << " action " << a);
    ok += std::abs(a - 0.3) <= 0.05;
  }
  CHECK(ok >= 4);
}

TEST_CASE("toy bandit: a3c converges") {
  int ok = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    A3cConfig cfg;
    cfg.hidden = {16, 16};
    cfg.gamma = 0.0;
    cfg.workers = 1;
    cfg.rollout = 10;
    cfg.actor_lr = 3e-3;
    cfg.critic_lr = 1e-2;
    cfg.entropy_beta = 0.0;
    A3cAgent agent(1, 1, cfg, seed);
    const double a = train_bandit(agent, 5000);
    MESSAGE("a3c seed " << seed << " action " << a);
    ok += std::abs(a - 0.3) <= 0.05;
  }
  CHECK(ok >= 4);
}

TEST_CASE("toy bandit: trpo converges") {
  int ok = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    TrpoConfig cfg;
    cfg.hidden = {16, 16};
    cfg.gamma = 0.0;
    cfg.delta_kl = 0.05;
    cfg.value_lr = 1e-2;
    TrpoAgent agent(1, 1, cfg, seed);
    const double a = train_bandit(agent, 5000);
    MESSAGE("trpo seed " << seed << " action " << a);
    ok += std::abs(a - 0.3) <= 0.05;
  }
  CHECK(ok >= 4);
}

TEST_CASE("a3c: several workers share one store") {
  A3cConfig cfg;
  cfg.hidden = {8};
  cfg.workers = 3;
  cfg.rollout = 5;
  A3cAgent agent(1, 1, cfg, 1);
  QuadraticBandit env(10);
  int steps = 0;
  agent.train_episode(env, 1, [&](auto, auto, const env::StepResult&) { ++steps; });
  CHECK(steps == 10);
  CHECK(agent.store().applied() == 6);
  CHECK(agent.updates().size() == 2);
}

TEST_CASE("single-worker training is deterministic") {
  auto run_a3c = [] {
    A3cConfig cfg;
    cfg.hidden = {8};
    cfg.workers = 1;
    A3cAgent agent(1, 1, cfg, 9);
    train_bandit(agent, 100);
    return agent.checkpoint().net("policy_mean").get_flat();
  };
  CHECK(run_a3c() == run_a3c());
  auto run_td3 = [] {
    Td3Config cfg;
    cfg.hidden = {8};
    cfg.batch_size = 8;
    cfg.start_steps = 20;
    Td3Agent agent(1, 1, cfg, 9);
    train_bandit(agent, 100);
    return agent.actor().get_flat();
  };
  CHECK(run_td3() == run_td3());
  auto run_trpo = [] {
    TrpoConfig cfg;
    cfg.hidden = {8};
    TrpoAgent agent(1, 1, cfg, 9);
    train_bandit(agent, 100);
    return agent.policy().get_flat();
  };
  CHECK(run_trpo() == run_trpo());
}

TEST_CASE("checkpoint restore reproduces the greedy action") {
  Td3Config tc;
  tc.hidden = {8};
  Td3Agent a(1, 1, tc, 1), b(1, 1, tc, 2);
  b.restore(a.checkpoint());
  CHECK(a.act(std::vector<double>{0.4}) == b.act(std::vector<double>{0.4}));
  TrpoConfig rc;
  rc.hidden = {8};
  TrpoAgent c(1, 1, rc, 1), d(1, 1, rc, 2);
  d.restore(c.checkpoint());
  CHECK(c.act(std::vector<double>{0.4}) == d.act(std::vector<double>{0.4}));
  A3cConfig ac;
  ac.hidden = {8};
  A3cAgent e(1, 1, ac, 1), f(1, 1, ac, 2);
  f.restore(e.checkpoint());
  CHECK(e.act(std::vector<double>{0.4}) == f.act(std::vector<double>{0.4}));
  TrpoAgent wrong(2, 1, rc, 1);
  CHECK_THROWS_AS(wrong.restore(c.checkpoint()), CheckpointError);
}

}
