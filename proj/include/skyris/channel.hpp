#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "skyris/config.hpp"
#include "skyris/rng.hpp"

namespace skyris::channel {

using cplx = std::complex<double>;

// True channels of one coherence interval plus the estimates the agent sees.
// h[i]: satellite -> user i (N), g[i]: UAV -> user i (M), hu: satellite -> UAV
// (M x N). Estimated = true - error.
struct ChannelSet {
  std::vector<Eigen::VectorXcd> h;
  std::vector<Eigen::VectorXcd> g;
  Eigen::MatrixXcd hu;
  std::vector<Eigen::VectorXcd> h_hat;
  std::vector<Eigen::VectorXcd> g_hat;
  Eigen::MatrixXcd hu_hat;

  int num_users() const { return static_cast<int>(h.size()); }
  bool all_finite() const;
};

// Reference amplitudes per link class. Channels are generated in a normalized
// domain (LoS magnitude relative to the reference geometry, unit-variance
// scatter) and scaled by these factors.
struct LinkScales {
  double sat_user = 1.0;
  double sat_uav = 1.0;
  double uav_user = 1.0;
};

// Satellite antenna pattern G_max [J1(v)/(2v) + 36 J3(v)/v^3]^2 with
// v = 2.07123 sin(theta) / sin(theta_3db).
double satellite_gain(double theta, double theta_3db, double g_max);

// sqrt(g_tx g_rx) (c / (4 pi f_c d))^l.
double amplitude_path_gain(double d, const ScenarioConfig& cfg, double g_tx, double g_rx);

// sqrt(K/(K+1)) los + sqrt(1/(K+1)) W, W ~ CN(0, I). K >= 1e12 returns los.
Eigen::VectorXcd sample_rician(const Eigen::VectorXcd& los, double k, Rng& rng);
Eigen::MatrixXcd sample_rician(const Eigen::MatrixXcd& los, double k, Rng& rng);

// x_hat = x - dx with dx ~ CN(0, var I).
Eigen::VectorXcd apply_csi_error(const Eigen::VectorXcd& x, double var, Rng& rng);
Eigen::MatrixXcd apply_csi_error(const Eigen::MatrixXcd& x, double var, Rng& rng);

// Uniform rectangular array response for a unit direction vector, half-wave
// spacing, array in the horizontal plane.
Eigen::VectorXcd ura_steering(int elements, double ux, double uy);
std::pair<int, int> ura_shape(int elements);

LinkScales link_scales(const ScenarioConfig& cfg);

// Draws every random quantity in a fixed order that does not depend on the
// geometry, so a fixed stream gives the same fades at any UAV position.
ChannelSet build_channels(const ScenarioConfig& cfg, std::span<const Point2> users, Point2 uav,
                          Rng& rng);
ChannelSet build_channels(const ScenarioConfig& cfg, Point2 uav, Rng& rng);

std::vector<Point2> random_users(const ScenarioConfig& cfg, Rng& rng);

}  // namespace skyris::channel
