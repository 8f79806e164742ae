#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace skyris {

enum class RisMode { bd_active, diag_active, diag_passive };
enum class UserLayout { fixed, random_per_run, random_per_episode };

std::string to_string(RisMode m);
RisMode ris_mode_from_string(const std::string& s);

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

// Rotary-wing hover model parameters.
struct HoverParams {
  double rotor_solidity = 0.05;  // s
  double air_density = 0.02;     // rho, kg/m^3
  double profile_drag = 0.05;    // delta
  double disc_area = 0.503;      // A, m^2
  double angular_velocity = 300.0;  // Omega, rad/s
  double rotor_radius = 0.4;     // R, m
  double weight = 20.0;          // W, N
  double induced_correction = 0.1;  // k
};

// Physical and system parameters. Defaults describe the full-scale system.
struct ScenarioConfig {
  double carrier_frequency = 8e9;
  double speed_of_light = 3e8;
  double path_loss_exponent = 2.0;
  double sat_altitude = 520e3;
  double uav_altitude = 10e3;
  Point2 sat_ground_track{0.0, 0.0};
  UserLayout user_layout = UserLayout::random_per_run;
  std::vector<Point2> user_positions;  // used when user_layout == fixed

  int num_users = 3;
  int num_sat_antennas = 32;
  int num_ris_elements = 64;

  double k_sat = 10.0;  // Rician K for satellite->user and satellite->UAV
  double k_uav = 5.0;   // Rician K for UAV->user
  double g_max_dbi = 6.6;
  double user_gain_dbi = 0.0;
  double theta_3db = 0.0174532925199432958;  // 1 degree

  double noise_power = 1e-10;
  double csi_error_variance = 1e-2;
  double bandwidth = 5e6;
  double x_max = 5000.0;
  double y_max = 5000.0;

  double p_sat_max_dbm = 56.0;
  double p_ris_max_dbm = 33.0;
  double gamma_min_common = 0.01;
  double gamma_min_private = 0.01;

  RisMode ris_mode = RisMode::bd_active;
  double a_max = 4.0;
  bool complex_coupling = true;
  double theta_ris = 1.25;
  double p_circuit_dbm = -10.0;
  double p_dc_dbm = -5.0;
  HoverParams hover;
  double p_proc = 3.0;

  // Large-scale reference powers per link class. Unset means the free-space
  // magnitude at the reference geometry (physical link budget).
  std::optional<double> ref_gain_sat_user;
  std::optional<double> ref_gain_sat_uav;
  std::optional<double> ref_gain_uav_user;
  double uav_ref_distance = 10e3;

  double g_max() const;
  double user_gain() const;
  double p_sat_max() const;
  double p_ris_max() const;
  double p_circuit() const;
  double p_dc() const;

  // Throws DomainError / StructuralError on violated invariants.
  void validate() const;
};

// MDP-level knobs that are not physical parameters.
struct MdpConfig {
  double penalty_lambda = 1.0;
  double reward_scale = 1.0;
  int horizon = 200;
  bool block_fading = true;
  bool learn_delta = false;
  bool observe_uav_position = false;

  void validate() const;
};

// Strict JSON mapping: unknown keys raise SchemaError naming every one.
void from_json(const nlohmann::json& j, ScenarioConfig& c);
void to_json(nlohmann::json& j, const ScenarioConfig& c);
void from_json(const nlohmann::json& j, MdpConfig& c);
void to_json(nlohmann::json& j, const MdpConfig& c);

// Small desk-scale scenario used by tests and the acceptance suite.
ScenarioConfig desk_scenario();

}  // namespace skyris
