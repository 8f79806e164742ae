#include "skyris/channel.hpp"

#include <cmath>

#include "skyris/bessel.hpp"
#include "skyris/errors.hpp"
#include "skyris/units.hpp"

namespace skyris::channel {
namespace {

constexpr double kLosOnly = 1e12;

struct Vec3 {
  double x, y, z;
};

Vec3 sub(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
double norm(Vec3 v) { return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z); }

// Angle between the satellite's nadir boresight and the direction to target.
double off_nadir(Vec3 sat, Vec3 target) {
  const Vec3 d = sub(target, sat);
  const double c = std::clamp(-d.z / norm(d), -1.0, 1.0);
  return std::acos(c);
}

Eigen::VectorXcd steering_towards(int elements, Vec3 from, Vec3 to) {
  const Vec3 d = sub(to, from);
  const double n = norm(d);
  return ura_steering(elements, d.x / n, d.y / n);
}

cplx unit_phase(Rng& rng) {
  // e^{j pi s}, s ~ U[0, 2)
  const double s = 2.0 * uniform01(rng);
  return std::polar(1.0, units::pi * s);
}

}  // namespace

bool ChannelSet::all_finite() const {
  auto ok = [](const auto& m) { return m.allFinite(); };
  for (const auto& v : h) if (!ok(v)) return false;
  for (const auto& v : g) if (!ok(v)) return false;
  for (const auto& v : h_hat) if (!ok(v)) return false;
  for (const auto& v : g_hat) if (!ok(v)) return false;
  return ok(hu) && ok(hu_hat);
}

double satellite_gain(double theta, double theta_3db, double g_max) {
  if (!std::isfinite(theta) || !std::isfinite(theta_3db) || !std::isfinite(g_max))
    throw DomainError("satellite_gain: non-finite input");
  if (!(theta_3db > 0.0) || g_max < 0.0) throw DomainError("satellite_gain: invalid pattern parameters");
  if (theta < 0.0 || theta >= units::pi / 2) throw DomainError("satellite_gain: theta outside [0, pi/2)");
  const double v = 2.07123 * std::sin(theta) / std::sin(theta_3db);
  const double lobe = 0.5 * bessel::jn_over_xn(1, v) + 36.0 * bessel::jn_over_xn(3, v);
  return g_max * lobe * lobe;
}

double amplitude_path_gain(double d, const ScenarioConfig& cfg, double g_tx, double g_rx) {
  if (!(d > 0.0) || !std::isfinite(d)) throw DomainError("amplitude_path_gain: distance must be positive");
  if (g_tx < 0.0 || g_rx < 0.0) throw DomainError("amplitude_path_gain: negative antenna gain");
  const double ratio = cfg.speed_of_light / (4.0 * units::pi * cfg.carrier_frequency * d);
  return std::sqrt(g_tx * g_rx) * std::pow(ratio, cfg.path_loss_exponent);
}

Eigen::VectorXcd sample_rician(const Eigen::VectorXcd& los, double k, Rng& rng) {
  if (!(k >= 0.0)) throw DomainError("sample_rician: K must be non-negative");
  if (!los.allFinite()) throw DomainError("sample_rician: non-finite LoS component");
  Eigen::VectorXcd out(los.size());
  const bool los_only = k >= kLosOnly;
  const double a = los_only ? 1.0 : std::sqrt(k / (k + 1.0));
  const double b = los_only ? 0.0 : std::sqrt(1.0 / (k + 1.0));
  for (Eigen::Index i = 0; i < los.size(); ++i) {
    const cplx w = cscg(rng, 1.0);
    out[i] = los_only ? los[i] : a * los[i] + b * w;
  }
  return out;
}

Eigen::MatrixXcd sample_rician(const Eigen::MatrixXcd& los, double k, Rng& rng) {
  Eigen::VectorXcd flat = Eigen::Map<const Eigen::VectorXcd>(los.data(), los.size());
  Eigen::VectorXcd drawn = sample_rician(flat, k, rng);
  return Eigen::Map<Eigen::MatrixXcd>(drawn.data(), los.rows(), los.cols());
}

Eigen::VectorXcd apply_csi_error(const Eigen::VectorXcd& x, double var, Rng& rng) {
  if (!(var >= 0.0)) throw DomainError("apply_csi_error: variance must be non-negative");
  Eigen::VectorXcd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const cplx e = cscg(rng, 1.0);
    out[i] = var == 0.0 ? x[i] : x[i] - std::sqrt(var) * e;
  }
  return out;
}

Eigen::MatrixXcd apply_csi_error(const Eigen::MatrixXcd& x, double var, Rng& rng) {
  Eigen::VectorXcd flat = Eigen::Map<const Eigen::VectorXcd>(x.data(), x.size());
  Eigen::VectorXcd drawn = apply_csi_error(flat, var, rng);
  return Eigen::Map<Eigen::MatrixXcd>(drawn.data(), x.rows(), x.cols());
}

std::pair<int, int> ura_shape(int elements) {
  int rows = static_cast<int>(std::floor(std::sqrt(static_cast<double>(elements))));
  while (rows > 1 && elements % rows != 0) --rows;
  return {rows, elements / rows};
}

Eigen::VectorXcd ura_steering(int elements, double ux, double uy) {
  const auto [rows, cols] = ura_shape(elements);
  Eigen::VectorXcd a(elements);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) a[r * cols + c] = std::polar(1.0, units::pi * (r * ux + c * uy));
  return a;
}

LinkScales link_scales(const ScenarioConfig& cfg) {
  const double g_max = cfg.g_max();
  const double g_user = cfg.user_gain();
  LinkScales s;
  s.sat_user = cfg.ref_gain_sat_user ? std::sqrt(*cfg.ref_gain_sat_user)
                                     : amplitude_path_gain(cfg.sat_altitude, cfg, g_max, g_user);
  s.sat_uav = cfg.ref_gain_sat_uav ? std::sqrt(*cfg.ref_gain_sat_uav)
                                   : amplitude_path_gain(cfg.sat_altitude, cfg, g_max, 1.0);
  s.uav_user = cfg.ref_gain_uav_user ? std::sqrt(*cfg.ref_gain_uav_user)
                                     : amplitude_path_gain(cfg.uav_ref_distance, cfg, 1.0, g_user);
  return s;
}

ChannelSet build_channels(const ScenarioConfig& cfg, std::span<const Point2> users, Point2 uav,
                          Rng& rng) {
  cfg.validate();
  if (static_cast<int>(users.size()) != cfg.num_users)
    throw StructuralError("build_channels: user count does not match num_users");
  if (!(uav.x >= 0.0 && uav.x <= cfg.x_max && uav.y >= 0.0 && uav.y <= cfg.y_max))
    throw DomainError("build_channels: UAV position outside [0, x_max] x [0, y_max]");

  const int n_users = cfg.num_users;
  const int n_ant = cfg.num_sat_antennas;
  const int m_el = cfg.num_ris_elements;
  const double g_max = cfg.g_max();
  const double g_user = cfg.user_gain();

  // The free-space magnitude at the reference geometry maps to 1 in the
  // normalized domain; each link class is then rescaled to its reference
  // amplitude.
  const double ref_sat_user = amplitude_path_gain(cfg.sat_altitude, cfg, g_max, g_user);
  const double ref_sat_uav = amplitude_path_gain(cfg.sat_altitude, cfg, g_max, 1.0);
  const double ref_uav_user = amplitude_path_gain(cfg.uav_ref_distance, cfg, 1.0, g_user);
  const LinkScales scale = link_scales(cfg);

  const Vec3 sat{cfg.sat_ground_track.x, cfg.sat_ground_track.y, cfg.sat_altitude};
  const Vec3 ris{uav.x, uav.y, cfg.uav_altitude};

  ChannelSet cs;
  cs.h.reserve(n_users);
  cs.g.reserve(n_users);

  // satellite -> user
  for (int i = 0; i < n_users; ++i) {
    const Vec3 user{users[i].x, users[i].y, 0.0};
    const double gs = satellite_gain(off_nadir(sat, user), cfg.theta_3db, g_max);
    const double beta = amplitude_path_gain(norm(sub(user, sat)), cfg, gs, g_user);
    const cplx phase = unit_phase(rng);
    Eigen::VectorXcd los = (beta / ref_sat_user) * phase * steering_towards(n_ant, sat, user);
    cs.h.push_back(scale.sat_user * sample_rician(los, cfg.k_sat, rng));
  }

  // satellite -> UAV
  {
    const double gs = satellite_gain(off_nadir(sat, ris), cfg.theta_3db, g_max);
    const double beta = amplitude_path_gain(norm(sub(ris, sat)), cfg, gs, 1.0);
    const cplx phase = unit_phase(rng);
    Eigen::MatrixXcd los = (beta / ref_sat_uav) * phase * steering_towards(m_el, ris, sat) *
                           steering_towards(n_ant, sat, ris).adjoint();
    cs.hu = scale.sat_uav * sample_rician(los, cfg.k_sat, rng);
  }

  // UAV -> user
  for (int i = 0; i < n_users; ++i) {
    const Vec3 user{users[i].x, users[i].y, 0.0};
    const double beta = amplitude_path_gain(norm(sub(user, ris)), cfg, 1.0, g_user);
    const cplx phase = unit_phase(rng);
    Eigen::VectorXcd los = (beta / ref_uav_user) * phase * steering_towards(m_el, ris, user);
    cs.g.push_back(scale.uav_user * sample_rician(los, cfg.k_uav, rng));
  }

  // Estimation error lives in the normalized domain: variance sigma_X^2
  // relative to the link's reference power.
  const double var = cfg.csi_error_variance;
  for (int i = 0; i < n_users; ++i)
    cs.h_hat.push_back(scale.sat_user * apply_csi_error(Eigen::VectorXcd(cs.h[i] / scale.sat_user), var, rng));
  cs.hu_hat = scale.sat_uav * apply_csi_error(Eigen::MatrixXcd(cs.hu / scale.sat_uav), var, rng);
  for (int i = 0; i < n_users; ++i)
    cs.g_hat.push_back(scale.uav_user * apply_csi_error(Eigen::VectorXcd(cs.g[i] / scale.uav_user), var, rng));
  return cs;
}

ChannelSet build_channels(const ScenarioConfig& cfg, Point2 uav, Rng& rng) {
  if (cfg.user_positions.empty())
    throw StructuralError("build_channels: no user positions in config; pass them explicitly");
  return build_channels(cfg, cfg.user_positions, uav, rng);
}

std::vector<Point2> random_users(const ScenarioConfig& cfg, Rng& rng) {
  std::vector<Point2> users;
  for (int i = 0; i < cfg.num_users; ++i) {
    const double x = cfg.x_max * uniform01(rng);
    const double y = cfg.y_max * uniform01(rng);
    users.push_back({x, y});
  }
  return users;
}

}  // namespace skyris::channel
