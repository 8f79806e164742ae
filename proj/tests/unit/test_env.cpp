#include <cmath>
#include <vector>

#include "doctest.h"
#include "skyris/env.hpp"
#include "skyris/errors.hpp"
#include "skyris/rng.hpp"

using namespace skyris;
using namespace skyris::env;

namespace {

ScenarioConfig small_fixed() {
  ScenarioConfig c = desk_scenario();
  c.user_layout = UserLayout::fixed;
  c.user_positions = {{1000.0, 1000.0}, {4000.0, 3000.0}};
  return c;
}

std::vector<double> uniform(Rng& rng, int n) {
  std::vector<double> v(n);
  for (auto& x : v) x = 2.0 * uniform01(rng) - 1.0;
  return v;
}

}  // namespace

TEST_SUITE("env") {

TEST_CASE("sizes") {
  ScenarioConfig c = desk_scenario();
  c.num_sat_antennas = 4;
  c.num_ris_elements = 4;
  MdpConfig m;
  CHECK(obs_size(c, m) == 64);
  m.observe_uav_position = true;
  CHECK(obs_size(c, m) == 66);
  m = MdpConfig{};
  CHECK(action_size(c, m) == 3 + 2 * 4 * 3 + 6 * 2 + 2);
  m.learn_delta = true;
  CHECK(action_size(c, m) == 3 + 2 * 4 * 3 + 6 * 2 + 2 + 2);
  CHECK(violation_count(2) == 10);
  CHECK(violation_names(2).size() == 10);
  CHECK(violation_names(2)[2] == "private_sinr_2");
}

TEST_CASE("decode: zero vector and lower bound") {
  const ScenarioConfig c = small_fixed();
  const MdpConfig m;
  std::vector<double> raw(action_size(c, m), 0.0);
  RsmaAction a = decode_action(raw, c, m);
  CHECK(a.a_c == doctest::Approx(1.0 / 3.0));
  CHECK(a.a[0] == doctest::Approx(1.0 / 3.0));
  CHECK(a.power_fraction() == doctest::Approx(1.0));
  CHECK(a.uav.x == doctest::Approx(c.x_max / 2));
  CHECK(a.uav.y == doctest::Approx(c.y_max / 2));
  CHECK(a.delta == std::vector<double>{0.5, 0.5});

  for (int k = 0; k < 3; ++k) raw[k] = -1.0;
  a = decode_action(raw, c, m);
  CHECK(a.a_c == 0.0);
  CHECK(a.a == std::vector<double>{0.0, 0.0});
  CHECK_THROWS_AS(decode_action(std::vector<double>(5, 0.0), c, m), StructuralError);
}

TEST_CASE("decode: random vectors land in the feasible set") {
  Rng rng(1);
  for (RisMode mode : {RisMode::bd_active, RisMode::diag_active, RisMode::diag_passive}) {
    ScenarioConfig c = small_fixed();
    c.ris_mode = mode;
    MdpConfig m;
    m.learn_delta = true;
    for (int k = 0; k < 2000; ++k) {
      auto raw = uniform(rng, action_size(c, m));
      for (auto& x : raw) x *= 1.5;
      const RsmaAction a = decode_action(raw, c, m);
      CHECK(a.power_fraction() <= 1.0 + 1e-12);
      CHECK(a.a_c >= 0.0);
      for (double x : a.a) CHECK(x >= 0.0);
      CHECK(a.w_c.norm() == doctest::Approx(1.0));
      CHECK(a.phi.symmetry_defect() <= 1e-12);
      CHECK(a.phi.max_singular_value() <= a.phi.a_max + 1e-10);
      CHECK(a.uav.x >= 0.0);
      CHECK(a.uav.x <= c.x_max);
      double s = 0.0;
      for (double d : a.delta) s += d;
      CHECK(s == doctest::Approx(1.0));
      if (mode == RisMode::diag_passive) CHECK(a.phi.a_max == 1.0);
    }
  }
}

TEST_CASE("violations: normalized gaps") {
  const ScenarioConfig c = small_fixed();
  const MdpConfig m;
  std::vector<double> raw(action_size(c, m), 0.0);
  const RsmaAction a = decode_action(raw, c, m);
  link::LinkReport rep;
  rep.sinr_common = {1.0, 1.0};
  rep.sinr_private = {0.005, 1.0};
  auto psi = violations(a, rep, 0.0, c);
  CHECK(psi.size() == 10);
  CHECK(psi[0] == 0.0);
  CHECK(psi[1] == doctest::Approx(0.5));
  CHECK(psi[2] == 0.0);
  rep.sinr_private = {1.0, 1.0};
  psi = violations(a, rep, 2.0 * c.p_ris_max(), c);
  CHECK(psi[4] == doctest::Approx(1.0));
  psi = violations(a, rep, 0.5 * c.p_ris_max(), c);
  for (double p : psi) CHECK(p == 0.0);
}

TEST_CASE("reward") {
  const std::vector<double> none(5, 0.0), one{0.5, 0.5};
  CHECK(reward(6.0, none, 1.0) == 6.0);
  CHECK(reward(6.0, none, 1.0, 10.0) == 60.0);
  CHECK(reward(6.0, one, 1.0) == 3.0);
  CHECK(reward(6.0, one, 0.0) == 6.0);
  CHECK(reward(6.0, std::vector<double>{1.0}, 1.0) > reward(6.0, std::vector<double>{2.0}, 1.0));
  CHECK(reward(7.0, one, 1.0) > reward(6.0, one, 1.0));
  CHECK_THROWS_AS(reward(1.0, none, -1.0), DomainError);
}

TEST_CASE("reset: determinism, perfect CSI, layout") {
  MdpConfig m;
  RsmaEnv a(small_fixed(), m, 1), b(small_fixed(), m, 1);
  CHECK(a.reset(5) == b.reset(5));
  CHECK(a.reset(5) != a.reset(6));

  ScenarioConfig perfect = small_fixed();
  perfect.csi_error_variance = 0.0;
  RsmaEnv p(perfect, m, 1);
  const auto obs = p.reset(3);
  channel::ChannelSet truth = p.channels();
  truth.h_hat = truth.h;
  truth.g_hat = truth.g;
  truth.hu_hat = truth.hu;
  CHECK(obs == encode_observation(truth, perfect));
  CHECK(p.uav() == Point2{perfect.x_max / 2, perfect.y_max / 2});

  ScenarioConfig rnd = desk_scenario();
  RsmaEnv r1(rnd, m, 11), r2(rnd, m, 11), r3(rnd, m, 12);
  CHECK(r1.users() == r2.users());
  CHECK(r1.users() != r3.users());
}

TEST_CASE("step: lifecycle") {
  RsmaEnv e(small_fixed(), MdpConfig{}, 1);
  std::vector<double> raw(e.action_size(), 0.0);
  CHECK_THROWS_AS(e.step(raw), LifecycleError);
  MdpConfig shortm;
  shortm.horizon = 2;
  RsmaEnv s(small_fixed(), shortm, 1);
  s.reset(1);
  CHECK_FALSE(s.step(raw).done);
  CHECK(s.step(raw).done);
  CHECK_THROWS_AS(s.step(raw), LifecycleError);
  s.reset(2);
  raw[0] = std::nan("");
  CHECK_THROWS_AS(s.step(raw), DomainError);
}

TEST_CASE("step: frozen fading gives identical rewards for identical actions") {
  MdpConfig m;
  m.block_fading = false;
  RsmaEnv e(small_fixed(), m, 1);
  e.reset(4);
  Rng rng(2);
  auto raw = uniform(rng, e.action_size());
  const double r1 = e.step(raw).reward;
  const double r2 = e.step(raw).reward;
  CHECK(r1 == r2);
}

TEST_CASE("step: zero power gives zero rate and reward") {
  RsmaEnv e(small_fixed(), MdpConfig{}, 1);
  e.reset(4);
  std::vector<double> raw(e.action_size(), 0.3);
  for (int k = 0; k < 3; ++k) raw[k] = -1.0;
  const auto res = e.step(raw);
  CHECK(res.stats.sum_rate == 0.0);
  CHECK(res.reward == 0.0);
}

TEST_CASE("step: reward recomputed from the reported fields") {
  MdpConfig m;
  m.penalty_lambda = 2.0;
  m.reward_scale = 1000.0;
  ScenarioConfig c = small_fixed();
  c.gamma_min_private = 50.0;
  RsmaEnv e(c, m, 1);
  e.reset(9);
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const auto res = e.step(uniform(rng, e.action_size()));
    const Transition& tr = e.last_transition();
    double psi = 0.0;
    for (double p : tr.info.psi) psi += p;
    const double ee = tr.info.report.sum_rate / tr.info.power.p_total;
    CHECK(res.reward == doctest::Approx(1000.0 * ee / (1.0 + 2.0 * psi)).epsilon(1e-12));
    CHECK(res.stats.ee_bits_per_joule == doctest::Approx(ee * c.bandwidth).epsilon(1e-12));
    CHECK(res.stats.feasible == (psi == 0.0));
    for (std::size_t k = c.num_users + 3; k < tr.info.psi.size(); ++k) CHECK(tr.info.psi[k] == 0.0);
    if (res.done) break;
  }
}

TEST_CASE("step: with no penalty the reward ranks actions like EE") {
  MdpConfig m;
  m.penalty_lambda = 0.0;
  m.block_fading = false;
  ScenarioConfig c = small_fixed();
  RsmaEnv e(c, m, 1);
  Rng rng(4);
  for (int k = 0; k < 20; ++k) {
    e.reset(3);
    const auto a = uniform(rng, e.action_size());
    auto b = uniform(rng, e.action_size());
    // same UAV target so both actions see the same channels
    b[b.size() - 2] = a[a.size() - 2];
    b[b.size() - 1] = a[a.size() - 1];
    const auto ra = e.step(a);
    e.reset(3);
    const auto rb = e.step(b);
    CHECK((ra.reward > rb.reward) == (ra.stats.ee > rb.stats.ee));
  }
}

TEST_CASE("transition JSON carries every field") {
  RsmaEnv e(small_fixed(), MdpConfig{}, 1);
  e.reset(1);
  e.step(std::vector<double>(e.action_size(), 0.1));
  const auto j = to_json(e.last_transition(), violation_names(2));
  for (const char* k : {"obs", "raw_action", "reward", "next_obs", "done", "info"}) CHECK(j.contains(k));
  CHECK(j["info"]["psi"].size() == 10);
  CHECK(j["info"]["power"].contains("p_total"));
}

TEST_CASE("clones evolve independently and identically") {
  RsmaEnv e(small_fixed(), MdpConfig{}, 1);
  e.reset(7);
  auto c = e.clone();
  std::vector<double> raw(e.action_size(), 0.2);
  CHECK(e.step(raw).obs == c->step(raw).obs);
}

}
