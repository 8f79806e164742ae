#include "skyris/env.hpp"

#include <algorithm>
#include <cmath>

#include "skyris/errors.hpp"

namespace skyris::env {
namespace {

constexpr double kZeroTol = 1e-12;

double gap(double excess) { return excess > kZeroTol ? excess : 0.0; }

double unit_interval(double u) { return 0.5 * (std::clamp(u, -1.0, 1.0) + 1.0); }

Eigen::VectorXcd read_beam(std::span<const double> raw, int n) {
  Eigen::VectorXcd w(n);
  for (int k = 0; k < n; ++k) w[k] = {raw[2 * k], raw[2 * k + 1]};
  const double norm = w.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    w.setZero();
    w[0] = 1.0;
    return w;
  }
  return w / norm;
}

void push_complex(std::vector<double>& out, std::complex<double> z) {
  out.push_back(z.real());
  out.push_back(z.imag());
}

}  // namespace

std::vector<std::string> violation_names(int num_users) {
  std::vector<std::string> names{"common_sinr"};
  for (int i = 0; i < num_users; ++i) names.push_back("private_sinr_" + std::to_string(i + 1));
  for (const char* n : {"sat_power", "ris_power", "simplex", "coefficient_range", "ris_symmetry", "ris_gain_bound",
                        "uav_bounds"})
    names.emplace_back(n);
  return names;
}

int violation_count(int num_users) { return num_users + 8; }

int action_size(const ScenarioConfig& cfg, const MdpConfig& mdp) {
  const int i = cfg.num_users;
  const int n = cfg.num_sat_antennas;
  const int m = cfg.num_ris_elements;
  return (i + 1) + 2 * n * (i + 1) + 6 * (m / 2) + 2 + (mdp.learn_delta ? i : 0);
}

int obs_size(const ScenarioConfig& cfg, const MdpConfig& mdp) {
  const int i = cfg.num_users;
  const int n = cfg.num_sat_antennas;
  const int m = cfg.num_ris_elements;
  return 2 * (i * n + m * n + i * m) + (mdp.observe_uav_position ? 2 : 0);
}

RsmaAction decode_action(std::span<const double> raw, const ScenarioConfig& cfg, const MdpConfig& mdp) {
  if (static_cast<int>(raw.size()) != action_size(cfg, mdp))
    throw StructuralError("decode_action: expected " + std::to_string(action_size(cfg, mdp)) + " entries, got " +
                          std::to_string(raw.size()));
  const int n_users = cfg.num_users;
  const int n = cfg.num_sat_antennas;
  const int m = cfg.num_ris_elements;
  size_t pos = 0;
  RsmaAction act;

  std::vector<double> v(n_users + 1);
  double total = 0.0;
  for (auto& x : v) {
    x = unit_interval(raw[pos++]);
    total += x;
  }
  if (total > 1.0)
    for (auto& x : v) x /= total;
  act.a_c = v[0];
  act.a.assign(v.begin() + 1, v.end());

  act.w_c = read_beam(raw.subspan(pos, 2 * n), n);
  pos += 2 * n;
  for (int i = 0; i < n_users; ++i) {
    act.w.push_back(read_beam(raw.subspan(pos, 2 * n), n));
    pos += 2 * n;
  }

  const double a_max = cfg.ris_mode == RisMode::diag_passive ? 1.0 : cfg.a_max;
  act.phi = bdris::BdRisMatrix::zero(cfg.ris_mode, m, a_max);
  for (int g = 0; g < m / 2; ++g) {
    const std::complex<double> p1(raw[pos], raw[pos + 1]);
    const std::complex<double> p2(raw[pos + 2], raw[pos + 3]);
    const std::complex<double> b(raw[pos + 4], cfg.complex_coupling ? raw[pos + 5] : 0.0);
    pos += 6;
    if (cfg.ris_mode == RisMode::bd_active) {
      bdris::Block blk;
      blk << p1, b, b, p2;
      act.phi.blocks[g] = bdris::project_block(a_max * blk, a_max);
    } else {
      for (int k = 0; k < 2; ++k) {
        std::complex<double> z = a_max * (k == 0 ? p1 : p2);
        if (std::abs(z) > a_max) z *= a_max / std::abs(z);
        act.phi.diag[2 * g + k] = z;
      }
    }
  }

  act.uav = {cfg.x_max * unit_interval(raw[pos]), cfg.y_max * unit_interval(raw[pos + 1])};
  pos += 2;

  act.delta.assign(n_users, 1.0 / n_users);
  if (mdp.learn_delta) {
    std::vector<double> d(n_users);
    double s = 0.0;
    for (auto& x : d) {
      x = unit_interval(raw[pos++]);
      s += x;
    }
    if (s > 0.0)
      for (int i = 0; i < n_users; ++i) act.delta[i] = d[i] / s;
  }
  return act;
}

std::vector<double> violations(const RsmaAction& act, const link::LinkReport& rep, double p_out,
                               const ScenarioConfig& cfg) {
  const int n_users = act.num_users();
  std::vector<double> psi;
  psi.reserve(violation_count(n_users));

  const double g_c = *std::min_element(rep.sinr_common.begin(), rep.sinr_common.end());
  psi.push_back(gap((cfg.gamma_min_common - g_c) / cfg.gamma_min_common));
  for (int i = 0; i < n_users; ++i)
    psi.push_back(gap((cfg.gamma_min_private - rep.sinr_private[i]) / cfg.gamma_min_private));

  const double p_max = cfg.p_sat_max();
  psi.push_back(gap((p_max * act.power_fraction() - p_max) / p_max));
  psi.push_back(gap((p_out - cfg.p_ris_max()) / cfg.p_ris_max()));
  psi.push_back(gap(act.power_fraction() - 1.0));

  double range = std::max(-act.a_c, act.a_c - 1.0);
  for (double x : act.a) range = std::max({range, -x, x - 1.0});
  psi.push_back(gap(range));

  psi.push_back(gap(act.phi.symmetry_defect()));
  const double bound = act.phi.a_max;
  psi.push_back(gap((act.phi.max_singular_value() - bound) / bound - 1e-10));

  const double ux = std::max({-act.uav.x, act.uav.x - cfg.x_max, 0.0}) / cfg.x_max;
  const double uy = std::max({-act.uav.y, act.uav.y - cfg.y_max, 0.0}) / cfg.y_max;
  psi.push_back(gap(std::max(ux, uy)));
  return psi;
}

std::vector<double> violations(const RsmaAction& act, const channel::ChannelSet& cs, const ScenarioConfig& cfg) {
  const double p_s = cfg.p_sat_max();
  const auto rep = link::rates(link::equivalent_channels(cs, act.phi), act, p_s, cfg.noise_power);
  const double p_out = bdris::ris_output_power(act.phi, cs.hu, act.a_c, act.w_c, act.a, act.w, p_s);
  return violations(act, rep, p_out, cfg);
}

double reward(double ee, std::span<const double> psi, double lambda, double scale) {
  if (!(lambda >= 0.0)) throw DomainError("reward: lambda must be non-negative");
  double total = 0.0;
  for (double p : psi) total += p;
  return scale * ee / (1.0 + lambda * total);
}

Evaluation evaluate(const RsmaAction& act, const channel::ChannelSet& cs, const ScenarioConfig& cfg,
                    const MdpConfig& mdp) {
  Evaluation ev;
  const double p_s = cfg.p_sat_max();
  ev.report = link::rates(link::equivalent_channels(cs, act.phi), act, p_s, cfg.noise_power);
  ev.p_out = bdris::ris_output_power(act.phi, cs.hu, act.a_c, act.w_c, act.a, act.w, p_s);
  ev.power = power::total_power(act, p_s, ev.p_out, cfg);
  ev.psi = violations(act, ev.report, ev.p_out, cfg);
  ev.ee = link::energy_efficiency(ev.report, ev.power.p_total, cfg.bandwidth, false);
  ev.ee_bits_per_joule = link::energy_efficiency(ev.report, ev.power.p_total, cfg.bandwidth, true);
  ev.reward = reward(ev.ee, ev.psi, mdp.penalty_lambda, mdp.reward_scale);
  return ev;
}

std::vector<double> encode_observation(const channel::ChannelSet& cs, const ScenarioConfig& cfg) {
  const auto s = channel::link_scales(cfg);
  std::vector<double> out;
  for (const auto& h : cs.h_hat)
    for (Eigen::Index k = 0; k < h.size(); ++k) push_complex(out, h[k] / s.sat_user);
  for (Eigen::Index r = 0; r < cs.hu_hat.rows(); ++r)
    for (Eigen::Index c = 0; c < cs.hu_hat.cols(); ++c) push_complex(out, cs.hu_hat(r, c) / s.sat_uav);
  for (const auto& g : cs.g_hat)
    for (Eigen::Index k = 0; k < g.size(); ++k) push_complex(out, g[k] / s.uav_user);
  return out;
}

nlohmann::json to_json(const Transition& t, const std::vector<std::string>& psi_names) {
  nlohmann::json psi = nlohmann::json::object();
  for (size_t k = 0; k < t.info.psi.size() && k < psi_names.size(); ++k) psi[psi_names[k]] = t.info.psi[k];
  const auto& r = t.info.report;
  const auto& p = t.info.power;
  return {{"obs", t.obs},
          {"raw_action", t.raw_action},
          {"reward", t.reward},
          {"next_obs", t.next_obs},
          {"done", t.done},
          {"info",
           {{"sinr_common", r.sinr_common},
            {"sinr_private", r.sinr_private},
            {"r_c", r.r_c},
            {"r_private", r.r_private},
            {"r_total", r.r_total},
            {"sum_rate", r.sum_rate},
            {"ee", t.info.ee},
            {"ee_bits_per_joule", t.info.ee_bits_per_joule},
            {"p_out", t.info.p_out},
            {"power",
             {{"p_sat_alloc", p.p_sat_alloc},
              {"p_bdaris", p.p_bdaris},
              {"p_proc", p.p_proc},
              {"p_uav_hover", p.p_uav_hover},
              {"p_total", p.p_total}}},
            {"psi", psi}}}};
}

RsmaEnv::RsmaEnv(ScenarioConfig cfg, MdpConfig mdp, std::uint64_t layout_seed)
    : cfg_(std::move(cfg)), mdp_(mdp) {
  cfg_.validate();
  mdp_.validate();
  if (cfg_.user_layout == UserLayout::fixed) {
    run_users_ = cfg_.user_positions;
  } else {
    Rng rng(derive_seed(layout_seed, {tag(Stream::user_layout)}));
    run_users_ = channel::random_users(cfg_, rng);
  }
  users_ = run_users_;
  uav_ = {cfg_.x_max / 2, cfg_.y_max / 2};
}

int RsmaEnv::obs_size() const { return env::obs_size(cfg_, mdp_); }
int RsmaEnv::action_size() const { return env::action_size(cfg_, mdp_); }

std::unique_ptr<Environment> RsmaEnv::clone() const { return std::make_unique<RsmaEnv>(*this); }

channel::ChannelSet RsmaEnv::draw(std::uint64_t fade_seed, Point2 uav) const {
  Rng rng(fade_seed);
  return channel::build_channels(cfg_, users_, uav, rng);
}

std::vector<double> RsmaEnv::reset(std::uint64_t seed) {
  if (cfg_.user_layout == UserLayout::random_per_episode) {
    Rng rng(derive_seed(seed, {tag(Stream::user_layout)}));
    users_ = channel::random_users(cfg_, rng);
  }
  fading_.seed(derive_seed(seed, {tag(Stream::fading)}));
  fade_seed_ = fading_();
  uav_ = {cfg_.x_max / 2, cfg_.y_max / 2};
  observed_ = draw(fade_seed_, uav_);
  obs_ = encode_observation(observed_, cfg_);
  if (mdp_.observe_uav_position) {
    obs_.push_back(2.0 * uav_.x / cfg_.x_max - 1.0);
    obs_.push_back(2.0 * uav_.y / cfg_.y_max - 1.0);
  }
  t_ = 0;
  ready_ = true;
  return obs_;
}

StepResult RsmaEnv::step(std::span<const double> action) {
  if (!ready_) throw LifecycleError("RsmaEnv::step called before reset or after the episode ended");
  for (double a : action)
    if (!std::isfinite(a)) throw DomainError("RsmaEnv::step: non-finite action entry");

  const RsmaAction act = decode_action(action, cfg_, mdp_);
  const channel::ChannelSet truth = draw(fade_seed_, act.uav);

  Transition tr;
  tr.obs = obs_;
  tr.raw_action.assign(action.begin(), action.end());
  tr.info = evaluate(act, truth, cfg_, mdp_);
  tr.reward = tr.info.reward;

  uav_ = act.uav;
  if (mdp_.block_fading) fade_seed_ = fading_();
  observed_ = draw(fade_seed_, uav_);
  obs_ = encode_observation(observed_, cfg_);
  if (mdp_.observe_uav_position) {
    obs_.push_back(2.0 * uav_.x / cfg_.x_max - 1.0);
    obs_.push_back(2.0 * uav_.y / cfg_.y_max - 1.0);
  }
  ++t_;
  tr.done = t_ >= mdp_.horizon;
  if (tr.done) ready_ = false;
  tr.next_obs = obs_;

  StepResult res;
  res.obs = obs_;
  res.reward = tr.reward;
  res.done = tr.done;
  res.stats.ee = tr.info.ee;
  res.stats.ee_bits_per_joule = tr.info.ee_bits_per_joule;
  res.stats.sum_rate = tr.info.report.sum_rate;
  res.stats.psi = tr.info.psi;
  res.stats.feasible = std::all_of(tr.info.psi.begin(), tr.info.psi.end(), [](double p) { return p == 0.0; });
  last_ = std::move(tr);
  return res;
}

}  // namespace skyris::env
