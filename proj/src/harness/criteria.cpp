#include "skyris/harness/criteria.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>

#include "skyris/agents/a3c.hpp"
#include "skyris/agents/td3.hpp"
#include "skyris/agents/trpo.hpp"
#include "skyris/bdris.hpp"
#include "skyris/channel.hpp"
#include "skyris/env.hpp"
#include "skyris/errors.hpp"
#include "skyris/harness/experiment.hpp"
#include "skyris/harness/stats.hpp"
#include "skyris/harness/sweep.hpp"
#include "skyris/harness/training.hpp"
#include "skyris/link.hpp"
#include "skyris/nn/gaussian.hpp"
#include "skyris/power.hpp"
#include "skyris/units.hpp"

namespace skyris::harness {
namespace {

using cplx = std::complex<double>;
using Clock = std::chrono::steady_clock;

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Collects named sub-checks; the first few failures go into the detail text.
struct Checker {
  int total = 0;
  std::vector<std::string> failures;

  void ok(const std::string& name, bool cond) {
    ++total;
    if (!cond) failures.push_back(name);
  }
  void near(const std::string& name, double got, double want, double rel, double abs = 0.0) {
    ++total;
    const double tol = std::max(abs, rel * std::abs(want));
    if (!(std::abs(got - want) <= tol)) failures.push_back(name + " got " + fmt("%.9g", got) + " want " + fmt("%.9g", want));
  }
  std::string summary() const {
    std::string s = std::to_string(total - static_cast<int>(failures.size())) + "/" + std::to_string(total) + " checks";
    for (std::size_t i = 0; i < std::min<std::size_t>(failures.size(), 3); ++i) s += "; " + failures[i];
    return s;
  }
  bool pass() const { return failures.empty(); }
};

template <class F>
CriterionResult timed(int id, const std::string& name, F&& body) {
  CriterionResult r;
  r.id = id;
  r.name = name;
  const auto t0 = Clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return r;
}

// G_max [J1(v)/(2v) + 36 J3(v)/v^3]^2 from the standard library Bessel functions.
double pattern_oracle(double theta, double theta_3db, double g_max) {
  const double v = 2.07123 * std::sin(theta) / std::sin(theta_3db);
  if (v == 0.0) return g_max;
  const double s = std::cyl_bessel_j(1.0, v) / (2.0 * v) + 36.0 * std::cyl_bessel_j(3.0, v) / (v * v * v);
  return g_max * s * s;
}

double mean_power(const Eigen::VectorXcd& x) { return x.squaredNorm() / static_cast<double>(x.size()); }

RsmaAction scalar_action(int users, int n, RisMode mode, int m, double a_max) {
  RsmaAction act;
  act.a.assign(users, 0.0);
  act.w_c = Eigen::VectorXcd::Zero(n);
  act.w.assign(users, Eigen::VectorXcd::Zero(n));
  act.phi = bdris::BdRisMatrix::zero(mode, m, a_max);
  act.delta.assign(users, 1.0 / users);
  return act;
}

void channel_oracles(Checker& c) {
  ScenarioConfig cfg;
  const double lam = cfg.speed_of_light / (4.0 * units::pi * cfg.carrier_frequency);
  c.near("path gain l=2 at 520 km", channel::amplitude_path_gain(520e3, cfg, 1.0, 1.0), 3.2933e-17, 1e-4);
  c.near("path gain closed form", channel::amplitude_path_gain(520e3, cfg, 1.0, 1.0), std::pow(lam / 520e3, 2), 1e-13);
  c.near("path gain unit argument", channel::amplitude_path_gain(lam, cfg, 1.0, 1.0), 1.0, 1e-13);
  {
    ScenarioConfig z = cfg;
    z.path_loss_exponent = 0.0;
    c.near("path gain l=0", channel::amplitude_path_gain(1234.5, z, 1.0, 1.0), 1.0, 0.0, 0.0);
  }

  Rng rng(11);
  Eigen::VectorXcd los = Eigen::VectorXcd::Constant(5, cplx(0.6, -0.8));
  c.ok("rician LoS limit", (channel::sample_rician(los, 1e12, rng) - los).cwiseAbs().maxCoeff() == 0.0);
  const int draws = 100000;
  Eigen::VectorXcd big = Eigen::VectorXcd::Constant(draws, cplx(std::sqrt(2.0), 0.0));
  c.near("rician K=0 power", mean_power(channel::sample_rician(big, 0.0, rng)), 1.0, 0.02);
  c.near("rician K=1 power", mean_power(channel::sample_rician(big, 1.0, rng)), 2.0 / 2.0 + 0.5, 0.02);

  Eigen::VectorXcd x = Eigen::VectorXcd::Constant(draws, cplx(1.0, 2.0));
  c.ok("csi zero variance", channel::apply_csi_error(x, 0.0, rng) == x);
  c.near("csi variance 1e-2", mean_power(x - channel::apply_csi_error(x, 1e-2, rng)), 1e-2, 0.03);
  c.near("csi variance 4 on zero", mean_power(channel::apply_csi_error(Eigen::VectorXcd(Eigen::VectorXcd::Zero(draws)), 4.0, rng)), 4.0,
         0.03);

  // Scalar geometry with deterministic fades: every magnitude is a hand product.
  ScenarioConfig s;
  s.num_users = 1;
  s.num_sat_antennas = 1;
  s.num_ris_elements = 2;
  s.k_sat = 1e12;
  s.k_uav = 1e12;
  s.csi_error_variance = 0.0;
  s.user_layout = UserLayout::fixed;
  s.sat_ground_track = {1000.0, 2000.0};
  s.user_positions = {{3000.0, 1500.0}};
  const Point2 uav{2500.0, 2500.0};
  Rng r1(5);
  const channel::ChannelSet cs = channel::build_channels(s, uav, r1);
  auto beta = [&](double dx, double dy, double dz, double gt, double gr) {
    const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
    return std::sqrt(gt * gr) * std::pow(s.speed_of_light / (4.0 * units::pi * s.carrier_frequency * d), 2.0);
  };
  const double hs = s.sat_altitude;
  const double th_u = std::atan2(std::hypot(2000.0, -500.0), hs);
  const double th_r = std::atan2(std::hypot(1500.0, 500.0), hs - s.uav_altitude);
  const double want_h = beta(2000.0, -500.0, hs, pattern_oracle(th_u, s.theta_3db, s.g_max()), s.user_gain());
  const double want_hu = beta(1500.0, 500.0, hs - s.uav_altitude, pattern_oracle(th_r, s.theta_3db, s.g_max()), 1.0);
  const double want_g = beta(500.0, -1000.0, s.uav_altitude, 1.0, s.user_gain());
  c.near("scalar |h|", std::abs(cs.h[0][0]), want_h, 1e-9);
  c.near("scalar |H_u|", std::abs(cs.hu(0, 0)), want_hu, 1e-9);
  c.near("scalar |H_u| second element", std::abs(cs.hu(1, 0)), want_hu, 1e-9);
  c.near("scalar |g|", std::abs(cs.g[0][0]), want_g, 1e-9);
  c.ok("perfect CSI estimate", cs.h_hat[0] == cs.h[0] && cs.hu_hat == cs.hu && cs.g_hat[0] == cs.g[0]);

  Rng r2(5);
  const channel::ChannelSet far = channel::build_channels(s, Point2{4999.0, 4999.0}, r2);
  bool dec = true;
  for (int k = 0; k < 2; ++k) dec = dec && std::abs(far.g[0][k]) < std::abs(cs.g[0][k]);
  c.ok("UAV farther -> weaker g", dec);

  ScenarioConfig d = desk_scenario();
  d.user_layout = UserLayout::fixed;
  d.user_positions = {{1000.0, 1000.0}, {4000.0, 3000.0}};
  Rng a(9), b(9);
  const auto ca = channel::build_channels(d, Point2{2500.0, 2500.0}, a);
  const auto cb = channel::build_channels(d, Point2{2500.0, 2500.0}, b);
  c.ok("channel determinism", ca.h == cb.h && ca.g == cb.g && ca.hu == cb.hu && ca.h_hat == cb.h_hat &&
                                  ca.g_hat == cb.g_hat && ca.hu_hat == cb.hu_hat);
}

void bdris_oracles(Checker& c) {
  using bdris::Block;
  const double tol = 1e-12;
  c.ok("assemble identity", bdris::assemble({Block::Identity()}).isApprox(Eigen::Matrix2cd::Identity(), tol));
  Block A, B;
  A << cplx(1, 2), cplx(3, 0), cplx(3, 0), cplx(0, -1);
  B << cplx(0.5, 0), cplx(0, 1), cplx(0, 1), cplx(2, 0);
  const Eigen::MatrixXcd phi = bdris::assemble({A, B});
  Eigen::MatrixXcd want = Eigen::MatrixXcd::Zero(4, 4);
  want.block(0, 0, 2, 2) = A;
  want.block(2, 2, 2, 2) = B;
  c.ok("assemble block layout", phi == want);

  // symmetric block with singular values {2, 0.5}: Q diag Q^T for a real rotation Q
  const double t = 0.37;
  Eigen::Matrix2cd q;
  q << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  const Block raw = q * Eigen::Vector2cd(2.0, 0.5).asDiagonal() * q.transpose();
  const Eigen::Vector2d sv = bdris::singular_values(bdris::project_block(raw, 1.0));
  c.near("clip {2,0.5} top", sv[0], 1.0, 1e-12);
  c.near("clip {2,0.5} bottom", sv[1], 0.5, 1e-12);
  const Block iso = bdris::project_block(3.0 * Block::Identity(), 1.0);
  c.ok("clip 3I", (iso - Block::Identity()).cwiseAbs().maxCoeff() < tol);
  Block feas;
  feas << cplx(0.2, 0.1), cplx(-0.3, 0.2), cplx(-0.3, 0.2), cplx(0.4, 0);
  c.ok("feasible unchanged", (bdris::project_block(feas, 1.0) - feas).cwiseAbs().maxCoeff() <= tol);

  // P_out oracles
  {
    auto phi1 = bdris::BdRisMatrix::zero(RisMode::diag_active, 2, 4.0);
    phi1.diag << 2.0, 0.0;
    Eigen::MatrixXcd hu(2, 1);
    hu << 1.0, 0.0;
    Eigen::VectorXcd w1(1);
    w1 << 1.0;
    c.near("P_out scalar", bdris::ris_output_power(phi1, hu, 0.0, Eigen::VectorXcd::Zero(1), {1.0}, {w1}, 3.0), 12.0,
           1e-15);
  }
  Rng rng(3);
  Eigen::MatrixXcd hu(4, 3);
  for (Eigen::Index k = 0; k < hu.size(); ++k) hu.data()[k] = cscg(rng, 1.0);
  std::vector<Eigen::VectorXcd> w(2, Eigen::VectorXcd(3));
  Eigen::VectorXcd wc(3);
  for (auto* v : {&wc, &w[0], &w[1]})
    for (auto& e : *v) e = cscg(rng, 1.0);
  const std::vector<double> a{0.3, 0.2};
  const auto zero = bdris::BdRisMatrix::zero(RisMode::bd_active, 4, 1.0);
  c.ok("P_out zero", bdris::ris_output_power(zero, hu, 0.5, wc, a, w, 2.0) == 0.0);
  auto unitary = bdris::BdRisMatrix::zero(RisMode::bd_active, 4, 1.0);
  for (auto& blk : unitary.blocks) {
    // symmetric unitary: Q diag(e^{ja}, e^{jb}) Q^T
    blk = q * Eigen::Vector2cd(std::polar(1.0, 0.4), std::polar(1.0, -1.1)).asDiagonal() * q.transpose();
  }
  double ref = 0.5 * (hu * wc).squaredNorm();
  for (int i = 0; i < 2; ++i) ref += a[i] * (hu * w[i]).squaredNorm();
  c.near("P_out unitary invariance", bdris::ris_output_power(unitary, hu, 0.5, wc, a, w, 2.0), 2.0 * ref, 1e-12);
}

void link_oracles(Checker& c) {
  Rng rng(21);
  Eigen::VectorXcd h(3), g(4);
  for (auto& e : h) e = cscg(rng, 1.0);
  for (auto& e : g) e = cscg(rng, 1.0);
  Eigen::MatrixXcd hu(4, 3);
  for (Eigen::Index k = 0; k < hu.size(); ++k) hu.data()[k] = cscg(rng, 1.0);
  const auto zero = bdris::BdRisMatrix::zero(RisMode::bd_active, 4, 1.0);
  c.ok("H_eq with zero RIS", link::equivalent_channel(h, g, zero, hu) == h.adjoint());
  {
    auto one = bdris::BdRisMatrix::zero(RisMode::diag_active, 2, 4.0);
    one.diag << 1.0, 0.0;
    Eigen::VectorXcd h1 = Eigen::VectorXcd::Zero(1), g1(2);
    g1 << 1.0, 0.0;
    Eigen::MatrixXcd u(2, 1);
    u << 1.0, 0.0;
    c.near("H_eq scalar", std::abs(link::equivalent_channel(h1, g1, one, u)(0) - cplx(1.0, 0.0)), 0.0, 0.0, 1e-15);
  }

  // I = 1 scalar SINRs
  {
    RsmaAction act = scalar_action(1, 1, RisMode::bd_active, 2, 1.0);
    act.a_c = 0.5;
    act.a[0] = 0.5;
    act.w_c[0] = 1.0;
    act.w[0][0] = 1.0;
    const std::vector<Eigen::RowVectorXcd> heq{Eigen::RowVectorXcd::Ones(1)};
    const Eigen::MatrixXd gains = link::stream_gains(heq, act);
    c.near("common SINR 1/3", link::sinr_common(0, gains, act, 1.0, 1.0), 1.0 / 3.0, 1e-15);
    c.near("private SINR 0.5", link::sinr_private(0, gains, act, 1.0, 1.0), 0.5, 1e-15);
    c.ok("common SINR -> 0 as noise grows", link::sinr_common(0, gains, act, 1.0, 1e300) < 1e-299);
    act.a_c = 0.0;
    c.ok("common SINR a_c = 0", link::sinr_common(0, gains, act, 1.0, 1.0) == 0.0);
    act.a[0] = 0.0;
    c.ok("private SINR a_i = 0", link::sinr_private(0, link::stream_gains(heq, act), act, 1.0, 1.0) == 0.0);
  }

  // I = 2 rate oracle: gamma_p = {3, 1}, R_c = 1, delta = {1/2, 1/2}
  {
    RsmaAction act = scalar_action(2, 2, RisMode::bd_active, 2, 1.0);
    act.a_c = 0.5;
    act.a = {0.25, 0.25};
    act.w_c << std::sqrt(8.0), std::sqrt(8.0);
    act.w[0] << std::sqrt(12.0), 0.0;
    act.w[1] << 0.0, 2.0;
    Eigen::RowVectorXcd h1(2), h2(2);
    h1 << 1.0, 0.0;
    h2 << 0.0, 1.0;
    const link::LinkReport rep = link::rates({h1, h2}, act, 1.0, 1.0);
    c.near("rate oracle gamma_p1", rep.sinr_private[0], 3.0, 1e-14);
    c.near("rate oracle gamma_p2", rep.sinr_private[1], 1.0, 1e-14);
    c.near("rate oracle R_c", rep.r_c, 1.0, 1e-14);
    c.near("rate oracle R_1", rep.r_total[0], 2.5, 1e-14);
    c.near("rate oracle R_2", rep.r_total[1], 1.5, 1e-14);
    c.near("rate oracle sum", rep.sum_rate, 4.0, 1e-14);
    double two_way = rep.r_c;
    for (double sp : rep.sinr_private) two_way += std::log2(1.0 + sp);
    c.near("sum rate two ways", rep.sum_rate, two_way, 0.0, 1e-12);
  }
  {
    link::LinkReport rep;
    rep.sum_rate = 10.0;
    c.near("EE per Hz", link::energy_efficiency(rep, 2.0, 5e6, false), 5.0, 1e-15);
    c.near("EE bit/J", link::energy_efficiency(rep, 2.0, 5e6, true), 2.5e7, 1e-15);
    rep.sum_rate = 0.0;
    c.ok("EE zero rate", link::energy_efficiency(rep, 2.0, 5e6, false) == 0.0);
  }

  // Monotonicity in noise and common channel scaling on a random instance.
  {
    RsmaAction act = scalar_action(2, 3, RisMode::bd_active, 2, 1.0);
    act.a_c = 0.4;
    act.a = {0.3, 0.2};
    for (auto* v : {&act.w_c, &act.w[0], &act.w[1]})
      for (auto& e : *v) e = cscg(rng, 1.0);
    std::vector<Eigen::RowVectorXcd> heq(2, Eigen::RowVectorXcd(3));
    for (auto& r : heq)
      for (auto& e : r) e = cscg(rng, 1.0);
    const auto gains = link::stream_gains(heq, act);
    std::vector<Eigen::RowVectorXcd> scaled = heq;
    for (auto& r : scaled) r *= 1.7;
    const auto gains2 = link::stream_gains(scaled, act);
    bool mono = true, scale_ok = true;
    for (int i = 0; i < 2; ++i) {
      mono = mono && link::sinr_common(i, gains, act, 1.0, 0.5) > link::sinr_common(i, gains, act, 1.0, 0.6);
      mono = mono && link::sinr_private(i, gains, act, 1.0, 0.5) > link::sinr_private(i, gains, act, 1.0, 0.6);
      scale_ok = scale_ok && link::sinr_common(i, gains2, act, 1.0, 0.5) >= link::sinr_common(i, gains, act, 1.0, 0.5);
      scale_ok = scale_ok && link::sinr_private(i, gains2, act, 1.0, 0.5) >= link::sinr_private(i, gains, act, 1.0, 0.5);
    }
    c.ok("SINR strictly decreasing in noise", mono);
    c.ok("SINR non-decreasing under channel scaling", scale_ok);
  }
}

void power_oracles(Checker& c) {
  const double p_d = std::pow(10.0, -10.0 / 10.0 - 3.0);
  const double p_dc = std::pow(10.0, -5.0 / 10.0 - 3.0);
  c.near("BD-ARIS power example", power::bdaris_power(1.0, 64, 1.25, p_d, p_dc), 1.2633, 1e-4);
  c.near("BD-ARIS power closed form", power::bdaris_power(1.0, 64, 1.25, p_d, p_dc), 1.25 + 32.0 * (p_d + p_dc), 1e-15);
  c.ok("BD-ARIS power zero", power::bdaris_power(0.0, 64, 1.25, 0.0, 0.0) == 0.0);
  c.near("BD-ARIS doubling m", power::bdaris_power(0.3, 128, 1.25, p_d, p_dc) - power::bdaris_power(0.3, 64, 1.25, p_d, p_dc),
         32.0 * (p_d + p_dc), 1e-12);

  HoverParams hp;
  c.near("blade profile power", power::blade_profile_power(hp), 5.43, 0.001);
  c.near("induced power", power::induced_power(hp), 693.6, 0.0002);
  Rng rng(17);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    HoverParams r;
    r.rotor_solidity = 0.01 + 0.1 * uniform01(rng);
    r.air_density = 0.01 + 1.2 * uniform01(rng);
    r.profile_drag = 0.01 + 0.1 * uniform01(rng);
    r.rotor_radius = 0.1 + 0.5 * uniform01(rng);
    r.disc_area = units::pi * r.rotor_radius * r.rotor_radius;
    r.angular_velocity = 100.0 + 400.0 * uniform01(rng);
    r.weight = 50.0 * uniform01(rng);
    r.induced_correction = 0.2 * uniform01(rng);
    const double want = r.profile_drag / 8.0 * r.air_density * r.rotor_solidity * r.disc_area *
                            std::pow(r.angular_velocity * r.rotor_radius, 3.0) +
                        (1.0 + r.induced_correction) * r.weight * std::sqrt(r.weight) /
                            std::sqrt(2.0 * r.air_density * r.disc_area);
    worst = std::max(worst, std::abs(power::hover_power(r) - want) / want);
  }
  c.ok("hover power on 100 random sets", worst < 1e-9);
  HoverParams fast = hp;
  fast.angular_velocity *= 2.0;
  c.near("hover cubic law", power::blade_profile_power(fast), 8.0 * power::blade_profile_power(hp), 1e-14);
  HoverParams light = hp;
  light.weight = 0.0;
  c.near("weightless hover", power::hover_power(light), power::blade_profile_power(hp), 1e-15);

  ScenarioConfig cfg;
  RsmaAction act = scalar_action(3, cfg.num_sat_antennas, cfg.ris_mode, cfg.num_ris_elements, cfg.a_max);
  act.a_c = 0.4;
  act.a = {0.3, 0.2, 0.1};
  const auto pb = power::total_power(act, cfg.p_sat_max(), 0.0, cfg);
  c.near("satellite allocation at 56 dBm", pb.p_sat_alloc, 398.1, 1e-4);
  c.ok("processing power verbatim", pb.p_proc == 3.0);
  c.near("breakdown re-sums", pb.p_sat_alloc + pb.p_bdaris + pb.p_proc + pb.p_uav_hover, pb.p_total, 0.0, 1e-12);
  RsmaAction idle = scalar_action(3, cfg.num_sat_antennas, cfg.ris_mode, cfg.num_ris_elements, cfg.a_max);
  ScenarioConfig bare = cfg;
  bare.p_circuit_dbm = -1e9;
  bare.p_dc_dbm = -1e9;
  const auto pz = power::total_power(idle, cfg.p_sat_max(), 0.0, bare);
  c.near("idle total", pz.p_total, bare.p_proc + power::hover_power(bare.hover), 1e-14);
}

// ---------------------------------------------------------------------------

std::vector<double> uniform_vector(Rng& rng, int n, double lo, double hi) {
  std::vector<double> v(n);
  for (auto& x : v) x = lo + (hi - lo) * uniform01(rng);
  return v;
}

struct GradCheck {
  double worst = 0.0;
  std::size_t checked = 0;
};

// Relative error of reverse-mode against central differences of L = sum(dy . f),
// denominator floored at 1e-6.
void add_rel(GradCheck& gc, double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  gc.worst = std::max(gc.worst, std::abs(analytic - numeric) / denom);
  ++gc.checked;
}

GradCheck check_mlp(nn::Mlp net, int batch, Rng& rng, std::size_t stride) {
  const double h = 1e-5;
  nn::Mat x(batch, net.in());
  for (Eigen::Index k = 0; k < x.size(); ++k) x.data()[k] = standard_normal(rng);
  nn::Mat dy(batch, net.out());
  for (Eigen::Index k = 0; k < dy.size(); ++k) dy.data()[k] = standard_normal(rng);
  auto loss = [&](const nn::Mlp& m, const nn::Mat& in) { return (m.forward(in).array() * dy.array()).sum(); };

  nn::Mlp::Cache cache;
  net.forward(x, &cache);
  std::vector<double> g(net.param_count(), 0.0);
  nn::Mat dx;
  net.backward(cache, dy, g, &dx);

  GradCheck gc;
  auto p = net.params();
  for (std::size_t i = 0; i < p.size(); i += stride) {
    const double keep = p[i];
    p[i] = keep + h;
    const double up = loss(net, x);
    p[i] = keep - h;
    const double down = loss(net, x);
    p[i] = keep;
    add_rel(gc, g[i], (up - down) / (2.0 * h));
  }
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    nn::Mat xp = x, xm = x;
    xp.data()[k] += h;
    xm.data()[k] -= h;
    add_rel(gc, dx.data()[k], (loss(net, xp) - loss(net, xm)) / (2.0 * h));
  }
  return gc;
}

std::vector<int> widths(int in, std::vector<int> hidden, int out) {
  std::vector<int> w{in};
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(out);
  return w;
}

}  // namespace

std::string format_result(const CriterionResult& r) {
  char head[64];
  std::snprintf(head, sizeof head, "%s %2d ", r.pass ? "PASS" : "FAIL", r.id);
  return std::string(head) + r.name + " | " + r.detail + " | " + fmt("%.1f s", r.seconds);
}

CriterionResult check_link_oracles() {
  return timed(1, "link-math oracle suite", [](CriterionResult& r) {
    Checker c;
    channel_oracles(c);
    bdris_oracles(c);
    link_oracles(c);
    power_oracles(c);
    r.pass = c.pass();
    r.detail = c.summary();
  });
}

CriterionResult check_bessel_half_power() {
  return timed(2, "Bessel half-power", [](CriterionResult& r) {
    const double th = units::deg_to_rad(1.0);
    const double g_max = units::db_to_linear(6.6);
    const double half = channel::satellite_gain(th, th, g_max) / g_max;
    const double bore = channel::satellite_gain(0.0, th, g_max) / g_max;
    const double near0 = channel::satellite_gain(1e-9, th, g_max) / g_max;
    // cross-check the whole main lobe against the standard library Bessel functions
    double worst = 0.0;
    for (int k = 0; k <= 1000; ++k) {
      const double t = 3.0 * th * k / 1000.0;
      worst = std::max(worst, std::abs(channel::satellite_gain(t, th, g_max) - pattern_oracle(t, th, g_max)) / g_max);
    }
    r.pass = std::abs(half - 0.5) <= 0.005 && std::abs(bore - 1.0) <= 1e-6 && std::abs(near0 - 1.0) <= 1e-6 &&
             worst <= 1e-9;
    r.detail = "G(theta_3dB)/G_max = " + fmt("%.8f", half) + ", boresight " + fmt("%.12f", bore) + ", near-zero " +
               fmt("%.12f", near0) + ", max |G - oracle|/G_max " + fmt("%.2e", worst);
  });
}

CriterionResult check_feasibility_by_construction() {
  return timed(3, "feasibility by construction", [](CriterionResult& r) {
    const int samples = 10000;
    const std::vector<RisMode> modes{RisMode::bd_active, RisMode::diag_active, RisMode::diag_passive};
    Rng rng(derive_seed(3, {1}));
    int structural_bad = 0;
    double worst_idem = 0.0;
    for (int k = 0; k < samples; ++k) {
      ScenarioConfig cfg = desk_scenario();
      cfg.ris_mode = modes[k % 3];
      cfg.user_layout = UserLayout::fixed;
      cfg.user_positions = {{1000.0, 1000.0}, {4000.0, 3000.0}};
      MdpConfig mdp;
      mdp.learn_delta = (k % 2) == 1;
      const double span = (k % 10 == 0) ? 3.0 : 1.0;
      const auto raw = uniform_vector(rng, env::action_size(cfg, mdp), -span, span);
      const RsmaAction act = env::decode_action(raw, cfg, mdp);
      Rng ch(k);
      const auto cs = channel::build_channels(cfg, Point2{2500.0, 2500.0}, ch);
      const auto psi = env::violations(act, cs, cfg);
      const int first = cfg.num_users + 3;  // simplex .. uav_bounds
      for (std::size_t s = first; s < psi.size(); ++s)
        if (psi[s] != 0.0) {
          ++structural_bad;
          break;
        }
      if (cfg.ris_mode == RisMode::bd_active) {
        for (const auto& blk : act.phi.blocks) {
          const auto once = bdris::project_block(blk, act.phi.a_max);
          worst_idem = std::max(worst_idem, (bdris::project_block(once, act.phi.a_max) - once).cwiseAbs().maxCoeff());
        }
      }
    }
    for (int k = 0; k < 1000; ++k) {
      bdris::Block raw;
      const cplx off = cscg(rng, 4.0);
      raw << cscg(rng, 4.0), off, off, cscg(rng, 4.0);
      const auto once = bdris::project_block(raw, 1.0);
      worst_idem = std::max(worst_idem, (bdris::project_block(once, 1.0) - once).cwiseAbs().maxCoeff());
    }
    r.pass = structural_bad == 0 && worst_idem <= 1e-10;
    r.detail = std::to_string(samples) + " decoded actions, " + std::to_string(structural_bad) +
               " with structural psi != 0; max idempotence defect " + fmt("%.2e", worst_idem);
  });
}

CriterionResult check_gradients() {
  return timed(4, "gradient correctness", [](CriterionResult& r) {
    const ScenarioConfig cfg = desk_scenario();
    const MdpConfig mdp;
    const int od = env::obs_size(cfg, mdp);
    const int ad = env::action_size(cfg, mdp);
    Rng rng(derive_seed(4, {1}));
    struct Head {
      std::string name;
      nn::Mlp net;
    };
    std::vector<Head> heads;
    heads.push_back({"td3 actor", nn::Mlp(widths(od, {64, 64}, ad), nn::Output::tanh, rng, 1.0)});
    heads.push_back({"td3 critic", nn::Mlp(widths(od + ad, {64, 64}, 1), nn::Output::identity, rng)});
    heads.push_back({"gaussian mean", nn::Mlp(widths(od, {64, 64}, ad), nn::Output::identity, rng)});
    heads.push_back({"value", nn::Mlp(widths(od, {64, 64}, 1), nn::Output::identity, rng)});
    std::string detail;
    double worst = 0.0;
    for (auto& h : heads) {
      for (auto& p : h.net.params()) p *= 1.5;
      const GradCheck gc = check_mlp(h.net, 3, rng, 7);
      worst = std::max(worst, gc.worst);
      detail += h.name + " " + fmt("%.1e", gc.worst) + ", ";
    }

    // actor-critic losses including the log-std head
    nn::GaussianPolicy pol(nn::Mlp(widths(6, {16, 16}, 3), nn::Output::identity, rng), -0.4);
    for (auto& v : pol.log_std) v += 0.2 * standard_normal(rng);
    nn::Mlp value(widths(6, {16, 16}, 1), nn::Output::identity, rng);
    agents::Rollout ro;
    ro.obs = nn::Mat(5, 6);
    ro.action = nn::Mat(5, 3);
    for (Eigen::Index k = 0; k < ro.obs.size(); ++k) ro.obs.data()[k] = standard_normal(rng);
    for (Eigen::Index k = 0; k < ro.action.size(); ++k) ro.action.data()[k] = standard_normal(rng);
    ro.reward = {0.3, -0.2, 1.0, 0.5, 0.1};
    ro.bootstrap = 0.7;
    const auto g = agents::a3c_gradients(pol, value, ro, 0.9, 0.01);
    GradCheck ac;
    const double h = 1e-5;
    std::vector<double> theta = pol.get_flat();
    for (std::size_t i = 0; i < theta.size(); ++i) {
      auto tp = theta, tm = theta;
      tp[i] += h;
      tm[i] -= h;
      nn::GaussianPolicy pp = pol, pm = pol;
      pp.set_flat(tp);
      pm.set_flat(tm);
      const double fd = (agents::a3c_gradients(pp, value, ro, 0.9, 0.01).actor_loss -
                         agents::a3c_gradients(pm, value, ro, 0.9, 0.01).actor_loss) /
                        (2.0 * h);
      add_rel(ac, g.actor[i], fd);
    }
    auto vp = value.params();
    for (std::size_t i = 0; i < vp.size(); ++i) {
      const double keep = vp[i];
      vp[i] = keep + h;
      const double up = agents::a3c_gradients(pol, value, ro, 0.9, 0.01).critic_loss;
      vp[i] = keep - h;
      const double down = agents::a3c_gradients(pol, value, ro, 0.9, 0.01).critic_loss;
      vp[i] = keep;
      add_rel(ac, g.critic[i], (up - down) / (2.0 * h));
    }
    worst = std::max(worst, ac.worst);
    detail += "actor-critic losses " + fmt("%.1e", ac.worst);
    r.pass = worst < 1e-4;
    r.detail = "max rel err " + fmt("%.2e", worst) + " (" + detail + ")";
  });
}

CriterionResult check_trpo_trust_region() {
  return timed(5, "TRPO trust region", [](CriterionResult& r) {
    const ExperimentConfig cfg = desk_experiment(AgentKind::trpo);
    auto env = make_env(cfg, 1);
    int accepted = 0, rejected = 0, kl_bad = 0, moved_on_reject = 0, updates = 0;
    double worst_ratio = 0.0;
    // second phase: oversized trust region, one backtrack
    agents::TrpoConfig wide = cfg.trpo;
    wide.delta_kl = 1e4;
    wide.max_backtracks = 1;
    wide.backtrack = 0.5;
    for (const auto& [tc, count] : {std::pair{cfg.trpo, 120}, std::pair{wide, 40}}) {
      agents::TrpoAgent agent(env->obs_size(), env->action_size(), tc, 1);
      const double delta = tc.delta_kl;
      for (int u = 0; u < count; ++u, ++updates) {
        std::vector<agents::Trajectory> batch{agent.collect(*env, episode_seed(1, u), {})};
        const nn::GaussianPolicy before = agent.policy();
        const auto st = agent.update(batch);
        const auto& rows = batch[0].obs;
        nn::Mat obs(static_cast<Eigen::Index>(rows.size()), env->obs_size());
        for (std::size_t i = 0; i < rows.size(); ++i)
          for (int d = 0; d < env->obs_size(); ++d) obs(static_cast<Eigen::Index>(i), d) = rows[i][d];
        // measured independently of the agent's own line search
        double kl = 0.0;
        const nn::Mat mu0 = before.mean.forward(obs);
        const nn::Mat mu1 = agent.policy().mean.forward(obs);
        for (Eigen::Index i = 0; i < obs.rows(); ++i)
          kl += nn::gaussian_kl({mu0.data() + i * mu0.cols(), static_cast<std::size_t>(mu0.cols())}, before.log_std,
                                {mu1.data() + i * mu1.cols(), static_cast<std::size_t>(mu1.cols())},
                                agent.policy().log_std);
        kl /= static_cast<double>(obs.rows());
        if (st.accepted) {
          ++accepted;
          worst_ratio = std::max(worst_ratio, kl / delta);
          if (kl > 1.5 * delta) ++kl_bad;
        } else {
          ++rejected;
          if (agent.policy().get_flat() != before.get_flat()) ++moved_on_reject;
        }
      }
    }
    r.pass = updates >= 100 && kl_bad == 0 && moved_on_reject == 0 && accepted > 0;
    r.detail = std::to_string(updates) + " updates: " + std::to_string(accepted) + " accepted (max KL/delta " +
               fmt("%.3f", worst_ratio) + "), " + std::to_string(rejected) + " rejected, " +
               std::to_string(moved_on_reject) + " rejected steps moved parameters";
  });
}

CriterionResult check_td3_mechanics() {
  return timed(6, "TD3 mechanics", [](CriterionResult& r) {
    const int od = 4, ad = 2;
    agents::Td3Config tc;
    tc.hidden = {8, 8};
    tc.gamma = 0.9;
    tc.policy_delay = 3;
    tc.batch_size = 6;
    tc.buffer_size = 64;
    agents::Td3Agent agent(od, ad, tc, 7);
    // frozen target nets with non-trivial weights
    Rng rng(61);
    for (nn::Mlp* m : {&agent.actor_target(), &agent.q1_target(), &agent.q2_target()})
      for (auto& p : m->params()) p = 0.5 * standard_normal(rng);

    agents::Batch b;
    b.obs = nn::Mat(3, od);
    b.next_obs = nn::Mat(3, od);
    b.action = nn::Mat(3, ad);
    b.reward = Eigen::Vector3d(1.0, -0.5, 2.25);
    b.terminal = Eigen::Vector3d(0.0, 1.0, 0.0);
    b.obs << 0.1, 0.2, 0.3, 0.4, -1, 0, 1, 0, 0.5, 0.5, -0.5, -0.5;
    b.next_obs << 0.2, -0.1, 0.0, 0.3, 1, 1, 1, 1, -0.3, 0.7, 0.2, -0.9;
    b.action << 0.1, -0.2, 0.9, 0.9, -1, 1;

    bool exact = true;
    for (double sigma : {0.0, 0.2}) {
      Rng a(99), o(99);
      const auto& at = agent.actor_target();
      const auto& q1 = agent.q1_target();
      const auto& q2 = agent.q2_target();
      const Eigen::VectorXd y = agents::td3_target({at, q1, q2}, b, tc.gamma, sigma, tc.noise_clip, a);
      for (int i = 0; i < 3; ++i) {
        std::vector<double> s(b.next_obs.row(i).data(), b.next_obs.row(i).data() + od);
        std::vector<double> act = at.forward(s);
        for (auto& x : act) {
          const double eps = sigma > 0.0 ? std::clamp(sigma * standard_normal(o), -tc.noise_clip, tc.noise_clip) : 0.0;
          x = std::clamp(x + eps, -1.0, 1.0);
        }
        std::vector<double> sa = s;
        sa.insert(sa.end(), act.begin(), act.end());
        const double q = std::min(q1.forward(sa)[0], q2.forward(sa)[0]);
        const double want = b.reward[i] + tc.gamma * (1.0 - b.terminal[i]) * q;
        exact = exact && y[i] == want;
      }
    }

    // actor delay: actor and targets move only on every d-th critic update
    for (int k = 0; k < 40; ++k) {
      const auto o = uniform_vector(rng, od, -1, 1);
      const auto a = uniform_vector(rng, ad, -1, 1);
      const auto n = uniform_vector(rng, od, -1, 1);
      agent.buffer().add(o, a, standard_normal(rng), n, false);
    }
    bool delay_ok = true;
    for (int u = 1; u <= 12; ++u) {
      const auto actor_before = agent.actor().get_flat();
      const auto target_before = agent.actor_target().get_flat();
      const auto st = agent.update_from_buffer();
      const bool should = agent.critic_updates() % tc.policy_delay == 0;
      const bool moved = agent.actor().get_flat() != actor_before;
      const bool target_moved = agent.actor_target().get_flat() != target_before;
      delay_ok = delay_ok && st.actor_updated == should && moved == should && target_moved == should;
    }
    delay_ok = delay_ok && agent.actor_updates() == agent.critic_updates() / tc.policy_delay;
    r.pass = exact && delay_ok;
    r.detail = std::string("target ") + (exact ? "bit-exact" : "MISMATCH") + " on handcrafted batch; delay d=" +
               std::to_string(tc.policy_delay) + ": " + std::to_string(agent.actor_updates()) + " actor / " +
               std::to_string(agent.critic_updates()) + " critic updates" + (delay_ok ? "" : " (schedule broken)");
  });
}

std::vector<CriterionResult> run_fast_criteria() {
  return {check_link_oracles(),        check_bessel_half_power(), check_feasibility_by_construction(),
          check_gradients(),           check_trpo_trust_region(), check_td3_mechanics()};
}

// ---------------------------------------------------------------------------

namespace {

struct AgentRuns {
  AgentKind kind;
  ExperimentConfig cfg;
  std::vector<double> head, tail;
  std::map<std::uint64_t, nn::Checkpoint> checkpoints;
  std::vector<EpisodeMetrics> rows;
};

ExperimentConfig criteria_config(AgentKind kind, const TrainingCriteriaOptions& opt) {
  ExperimentConfig c = desk_experiment(kind);
  c.seeds = opt.seeds;
  if (opt.episodes > 0) c.episodes = opt.episodes;
  c.eval_episodes = opt.eval_episodes;
  return c;
}

void note(const TrainingCriteriaOptions& opt, const std::string& msg) {
  if (opt.verbose) std::fprintf(stderr, "%s\n", msg.c_str());
}

std::string join_values(const std::vector<double>& v, const char* f) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + fmt(f, v[i]);
  return s;
}

void write_sweep(const TrainingCriteriaOptions& opt, const std::string& stem, const ExperimentConfig& cfg,
                 const std::string& variable, const SweepResult& res) {
  if (opt.out_dir.empty()) return;
  std::filesystem::create_directories(opt.out_dir);
  const std::string hash = config_hash(cfg);
  write_sweep_csv(opt.out_dir + "/" + stem + "_sweep.csv", hash, variable, res.rows);
  write_cells_csv(opt.out_dir + "/" + stem + "_cells.csv", hash, variable, res.cells);
}


}  // namespace

std::vector<CriterionResult> run_training_criteria(const TrainingCriteriaOptions& opt) {
  std::vector<CriterionResult> out;
  std::vector<AgentRuns> runs;

  out.push_back(timed(7, "learning progress", [&](CriterionResult& r) {
    std::string detail;
    bool all = true;
    for (AgentKind kind : {AgentKind::td3, AgentKind::a3c, AgentKind::trpo}) {
      AgentRuns ar{kind, criteria_config(kind, opt), {}, {}, {}, {}};
      for (std::uint64_t seed : ar.cfg.seeds) {
        const auto t0 = Clock::now();
        SeedRun run = train_seed(ar.cfg, seed);
        std::vector<double> rew;
        for (const auto& e : run.episodes) rew.push_back(e.mean_reward);
        ar.head.push_back(head_mean(rew, 0.2));
        ar.tail.push_back(tail_mean(rew, 0.2));
        ar.checkpoints.emplace(seed, run.agent->checkpoint());
        ar.rows.insert(ar.rows.end(), run.episodes.begin(), run.episodes.end());
        note(opt, to_string(kind) + " seed " + std::to_string(seed) + ": head " + fmt("%.4f", ar.head.back()) +
                      " tail " + fmt("%.4f", ar.tail.back()) + " (" +
                      fmt("%.1f s", std::chrono::duration<double>(Clock::now() - t0).count()) + ")");
      }
      if (!opt.out_dir.empty()) {
        std::filesystem::create_directories(opt.out_dir);
        write_metrics_csv(opt.out_dir + "/" + to_string(kind) + "_metrics.csv", config_hash(ar.cfg), ar.rows,
                          ar.cfg.scenario.num_users);
      }
      int improved = 0;
      for (std::size_t i = 0; i < ar.head.size(); ++i) improved += ar.tail[i] > ar.head[i];
      const int need = static_cast<int>(std::ceil(0.8 * static_cast<double>(ar.head.size())));
      all = all && improved >= need;
      detail += to_string(kind) + " " + std::to_string(improved) + "/" + std::to_string(ar.head.size()) +
                " improved (final median " + fmt("%.3f", median(ar.tail)) + "); ";
      runs.push_back(std::move(ar));
    }
    const double trpo = median(runs[2].tail), a3c = median(runs[1].tail), td3 = median(runs[0].tail);
    const bool order = trpo >= a3c;
    r.pass = all && order;
    detail += std::string("TRPO ") + (order ? ">=" : "<") + " A3C";
    detail += std::string("; TRPO ") + (trpo > td3 ? ">" : "<=") + " TD3 (not gated)";
    r.detail = detail;
  }));

  out.push_back(timed(8, "EE vs satellite power", [&](CriterionResult& r) {
    const ExperimentConfig cfg = criteria_config(AgentKind::a3c, opt);
    const std::vector<double> dbm{40.0, 45.0, 50.0, 56.0};
    std::vector<nlohmann::json> values(dbm.begin(), dbm.end());
    const SweepResult res = run_sweep(cfg, "p_sat_max", values, SweepMode::train);
    write_sweep(opt, "p_sat_max", cfg, "p_sat_max", res);
    std::vector<double> med;
    for (const auto& row : res.rows) med.push_back(row.ee.median);
    const double tau = kendall_tau(dbm, med);
    r.pass = tau >= 0.5;
    r.detail = "a3c median EE [bit/J/Hz] at 40/45/50/56 dBm: " + join_values(med, "%.3e") + "; Kendall tau " +
               fmt("%.3f", tau);
  }));

  out.push_back(timed(9, "CSI robustness", [&](CriterionResult& r) {
    if (runs.size() != 3) throw PreconditionError("criterion 9 needs the trained policies of criterion 7");
    const std::vector<double> var{1e-4, 1e-3, 1e-2, 1e-1};
    std::vector<nlohmann::json> values(var.begin(), var.end());
    bool all = true;
    std::string detail;
    for (const auto& ar : runs) {
      const auto& ck = ar.checkpoints;
      const SweepResult res = run_sweep(ar.cfg, "csi_error_variance", values, SweepMode::evaluate,
                                        [&ck](std::uint64_t s) { return ck.at(s); });
      write_sweep(opt, "csi_" + to_string(ar.kind), ar.cfg, "csi_error_variance", res);
      std::vector<double> med;
      for (const auto& row : res.rows) med.push_back(row.reliability.median);
      const bool dec = med.back() < med.front();
      all = all && dec;
      detail += to_string(ar.kind) + " " + join_values(med, "%.4f") + (dec ? " (decreasing); " : " (not decreasing); ");
    }
    r.pass = all;
    r.detail = "median reliability at 1e-4/1e-3/1e-2/1e-1: " + detail;
  }));

  out.push_back(timed(10, "RIS-type ordering", [&](CriterionResult& r) {
    const ExperimentConfig cfg = criteria_config(AgentKind::a3c, opt);
    std::vector<nlohmann::json> values{"diag_passive", "diag_active", "bd_active"};
    const SweepResult res = run_sweep(cfg, "ris_mode", values, SweepMode::train);
    write_sweep(opt, "ris_mode", cfg, "ris_mode", res);
    std::vector<double> med;
    for (const auto& row : res.rows) med.push_back(row.ee.median);
    r.pass = med.size() == 3 && med[2] >= med[1] && med[1] >= med[0];
    r.detail = "a3c median EE passive/diag_active/bd_active: " + join_values(med, "%.4e");
  }));

  out.push_back(timed(11, "end-to-end determinism", [&](CriterionResult& r) {
    std::string detail;
    bool all = true;
    for (AgentKind kind : {AgentKind::td3, AgentKind::trpo, AgentKind::a3c}) {
      ExperimentConfig cfg = desk_experiment(kind);
      cfg.episodes = 30;
      cfg.a3c.workers = 1;
      std::vector<std::string> lines[2];
      std::vector<double> params[2];
      for (int rep = 0; rep < 2; ++rep) {
        SeedRun run = train_seed(cfg, 42);
        for (auto m : run.episodes) {
          m.wall_clock_s = 0.0;
          lines[rep].push_back(metrics_line(config_hash(cfg), m));
        }
        for (const auto& [name, net] : run.agent->checkpoint().nets) {
          auto p = net.params();
          params[rep].insert(params[rep].end(), p.begin(), p.end());
        }
      }
      const bool same = lines[0] == lines[1] && params[0] == params[1];
      all = all && same;
      detail += to_string(kind) + (same ? " identical" : " DIFFERS") + "; ";
    }
    r.pass = all;
    r.detail = detail + "A3C in single-worker mode, 30 episodes each";
  }));

  return out;
}

}  // namespace skyris::harness
