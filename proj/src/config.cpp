#include "skyris/config.hpp"

#include <cmath>
#include <set>

#include "skyris/errors.hpp"
#include "skyris/units.hpp"

namespace skyris {

using nlohmann::json;

std::string to_string(RisMode m) {
  switch (m) {
    case RisMode::bd_active:
      return "bd_active";
    case RisMode::diag_active:
      return "diag_active";
    case RisMode::diag_passive:
      return "diag_passive";
  }
  return "?";
}

RisMode ris_mode_from_string(const std::string& s) {
  if (s == "bd_active") return RisMode::bd_active;
  if (s == "diag_active") return RisMode::diag_active;
  if (s == "diag_passive") return RisMode::diag_passive;
  throw SchemaError({"ris_mode"}, "unknown ris_mode '" + s + "'");
}

namespace {

std::string to_string(UserLayout l) {
  switch (l) {
    case UserLayout::fixed:
      return "fixed";
    case UserLayout::random_per_run:
      return "random_per_run";
    case UserLayout::random_per_episode:
      return "random_per_episode";
  }
  return "?";
}

UserLayout layout_from_string(const std::string& s) {
  if (s == "fixed") return UserLayout::fixed;
  if (s == "random_per_run") return UserLayout::random_per_run;
  if (s == "random_per_episode") return UserLayout::random_per_episode;
  throw SchemaError({"user_layout"}, "unknown user_layout '" + s + "'");
}

// Reads keys from one JSON object and remembers which were consumed so the
// leftovers can be reported as unknown.
class StrictObject {
 public:
  StrictObject(const json& j, std::string prefix) : j_(j), prefix_(std::move(prefix)) {
    if (!j_.is_object()) throw SchemaError({prefix_}, "expected a JSON object at '" + prefix_ + "'");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception& e) {
      bad_.push_back(prefix_ + key);
    }
  }

  template <class T>
  void get_optional(const char* key, std::optional<T>& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception& e) {
      bad_.push_back(prefix_ + key);
    }
  }

  const json* sub(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish() {
    std::vector<std::string> keys = bad_;
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) keys.push_back(prefix_ + it.key());
    if (!keys.empty()) {
      std::string msg = "invalid or unknown configuration keys:";
      for (const auto& k : keys) msg += " " + k;
      throw SchemaError(keys, msg);
    }
  }

 private:
  const json& j_;
  std::string prefix_;
  std::set<std::string> seen_;
  std::vector<std::string> bad_;
};

Point2 point_from_json(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw SchemaError({key}, "expected [x, y] at '" + key + "'");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

double ScenarioConfig::g_max() const { return units::db_to_linear(g_max_dbi); }
double ScenarioConfig::user_gain() const { return units::db_to_linear(user_gain_dbi); }
double ScenarioConfig::p_sat_max() const { return units::dbm_to_watt(p_sat_max_dbm); }
double ScenarioConfig::p_ris_max() const { return units::dbm_to_watt(p_ris_max_dbm); }
double ScenarioConfig::p_circuit() const { return units::dbm_to_watt(p_circuit_dbm); }
double ScenarioConfig::p_dc() const { return units::dbm_to_watt(p_dc_dbm); }

void ScenarioConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(name) + " must be positive and finite");
  };
  positive(carrier_frequency, "carrier_frequency");
  positive(speed_of_light, "speed_of_light");
  positive(sat_altitude, "sat_altitude");
  positive(uav_altitude, "uav_altitude");
  positive(theta_3db, "theta_3db");
  positive(noise_power, "noise_power");
  positive(bandwidth, "bandwidth");
  positive(x_max, "x_max");
  positive(y_max, "y_max");
  positive(a_max, "a_max");
  positive(theta_ris, "theta_ris");
  positive(uav_ref_distance, "uav_ref_distance");
  if (!(path_loss_exponent >= 0.0)) throw DomainError("path_loss_exponent must be non-negative");
  if (!(csi_error_variance >= 0.0)) throw DomainError("csi_error_variance must be non-negative");
  if (!(k_sat >= 0.0) || !(k_uav >= 0.0)) throw DomainError("Rician K factors must be non-negative");
  if (!(p_proc >= 0.0)) throw DomainError("p_proc must be non-negative");
  if (!(gamma_min_common > 0.0) || !(gamma_min_private > 0.0))
    throw DomainError("SINR thresholds must be positive");
  if (!(sat_altitude > uav_altitude)) throw DomainError("UAV must fly below the satellite");
  for (auto g : {ref_gain_sat_user, ref_gain_sat_uav, ref_gain_uav_user})
    if (g && !(*g > 0.0)) throw DomainError("reference gains must be positive");
  if (num_users < 1) throw StructuralError("num_users must be at least 1");
  if (num_sat_antennas < 1) throw StructuralError("num_sat_antennas must be at least 1");
  if (num_ris_elements < 2 || num_ris_elements % 2 != 0)
    throw StructuralError("num_ris_elements must be even and at least 2");
  if (user_layout == UserLayout::fixed) {
    if (static_cast<int>(user_positions.size()) != num_users)
      throw StructuralError("user_positions must list num_users points for a fixed layout");
  }
}

void MdpConfig::validate() const {
  if (!(penalty_lambda >= 0.0)) throw DomainError("penalty_lambda must be non-negative");
  if (!(reward_scale > 0.0)) throw DomainError("reward_scale must be positive");
  if (horizon < 1) throw StructuralError("horizon must be at least 1");
}

void from_json(const json& j, ScenarioConfig& c) {
  StrictObject o(j, "scenario.");
  o.get("carrier_frequency", c.carrier_frequency);
  o.get("speed_of_light", c.speed_of_light);
  o.get("path_loss_exponent", c.path_loss_exponent);
  o.get("sat_altitude", c.sat_altitude);
  o.get("uav_altitude", c.uav_altitude);
  if (const json* p = o.sub("sat_ground_track")) c.sat_ground_track = point_from_json(*p, "scenario.sat_ground_track");
  std::string layout = to_string(c.user_layout);
  o.get("user_layout", layout);
  c.user_layout = layout_from_string(layout);
  if (const json* p = o.sub("user_positions")) {
    if (!p->is_array()) throw SchemaError({"scenario.user_positions"}, "user_positions must be an array");
    c.user_positions.clear();
    for (const auto& q : *p) c.user_positions.push_back(point_from_json(q, "scenario.user_positions"));
  }
  o.get("num_users", c.num_users);
  o.get("num_sat_antennas", c.num_sat_antennas);
  o.get("num_ris_elements", c.num_ris_elements);
  o.get("k_sat", c.k_sat);
  o.get("k_uav", c.k_uav);
  o.get("g_max_dbi", c.g_max_dbi);
  o.get("user_gain_dbi", c.user_gain_dbi);
  o.get("theta_3db", c.theta_3db);
  o.get("noise_power", c.noise_power);
  o.get("csi_error_variance", c.csi_error_variance);
  o.get("bandwidth", c.bandwidth);
  o.get("x_max", c.x_max);
  o.get("y_max", c.y_max);
  o.get("p_sat_max_dbm", c.p_sat_max_dbm);
  o.get("p_ris_max_dbm", c.p_ris_max_dbm);
  o.get("gamma_min_common", c.gamma_min_common);
  o.get("gamma_min_private", c.gamma_min_private);
  std::string mode = to_string(c.ris_mode);
  o.get("ris_mode", mode);
  c.ris_mode = ris_mode_from_string(mode);
  o.get("a_max", c.a_max);
  o.get("complex_coupling", c.complex_coupling);
  o.get("theta_ris", c.theta_ris);
  o.get("p_circuit_dbm", c.p_circuit_dbm);
  o.get("p_dc_dbm", c.p_dc_dbm);
  if (const json* h = o.sub("hover")) {
    StrictObject ho(*h, "scenario.hover.");
    ho.get("rotor_solidity", c.hover.rotor_solidity);
    ho.get("air_density", c.hover.air_density);
    ho.get("profile_drag", c.hover.profile_drag);
    ho.get("disc_area", c.hover.disc_area);
    ho.get("angular_velocity", c.hover.angular_velocity);
    ho.get("rotor_radius", c.hover.rotor_radius);
    ho.get("weight", c.hover.weight);
    ho.get("induced_correction", c.hover.induced_correction);
    ho.finish();
  }
  o.get("p_proc", c.p_proc);
  o.get_optional("ref_gain_sat_user", c.ref_gain_sat_user);
  o.get_optional("ref_gain_sat_uav", c.ref_gain_sat_uav);
  o.get_optional("ref_gain_uav_user", c.ref_gain_uav_user);
  o.get("uav_ref_distance", c.uav_ref_distance);
  o.finish();
}

void to_json(json& j, const ScenarioConfig& c) {
  json users = json::array();
  for (const auto& p : c.user_positions) users.push_back({p.x, p.y});
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  j = json{{"carrier_frequency", c.carrier_frequency},
           {"speed_of_light", c.speed_of_light},
           {"path_loss_exponent", c.path_loss_exponent},
           {"sat_altitude", c.sat_altitude},
           {"uav_altitude", c.uav_altitude},
           {"sat_ground_track", {c.sat_ground_track.x, c.sat_ground_track.y}},
           {"user_layout", to_string(c.user_layout)},
           {"user_positions", users},
           {"num_users", c.num_users},
           {"num_sat_antennas", c.num_sat_antennas},
           {"num_ris_elements", c.num_ris_elements},
           {"k_sat", c.k_sat},
           {"k_uav", c.k_uav},
           {"g_max_dbi", c.g_max_dbi},
           {"user_gain_dbi", c.user_gain_dbi},
           {"theta_3db", c.theta_3db},
           {"noise_power", c.noise_power},
           {"csi_error_variance", c.csi_error_variance},
           {"bandwidth", c.bandwidth},
           {"x_max", c.x_max},
           {"y_max", c.y_max},
           {"p_sat_max_dbm", c.p_sat_max_dbm},
           {"p_ris_max_dbm", c.p_ris_max_dbm},
           {"gamma_min_common", c.gamma_min_common},
           {"gamma_min_private", c.gamma_min_private},
           {"ris_mode", to_string(c.ris_mode)},
           {"a_max", c.a_max},
           {"complex_coupling", c.complex_coupling},
           {"theta_ris", c.theta_ris},
           {"p_circuit_dbm", c.p_circuit_dbm},
           {"p_dc_dbm", c.p_dc_dbm},
           {"hover",
            {{"rotor_solidity", c.hover.rotor_solidity},
             {"air_density", c.hover.air_density},
             {"profile_drag", c.hover.profile_drag},
             {"disc_area", c.hover.disc_area},
             {"angular_velocity", c.hover.angular_velocity},
             {"rotor_radius", c.hover.rotor_radius},
             {"weight", c.hover.weight},
             {"induced_correction", c.hover.induced_correction}}},
           {"p_proc", c.p_proc},
           {"ref_gain_sat_user", opt(c.ref_gain_sat_user)},
           {"ref_gain_sat_uav", opt(c.ref_gain_sat_uav)},
           {"ref_gain_uav_user", opt(c.ref_gain_uav_user)},
           {"uav_ref_distance", c.uav_ref_distance}};
}

void from_json(const json& j, MdpConfig& c) {
  StrictObject o(j, "mdp.");
  o.get("penalty_lambda", c.penalty_lambda);
  o.get("reward_scale", c.reward_scale);
  o.get("horizon", c.horizon);
  o.get("block_fading", c.block_fading);
  o.get("learn_delta", c.learn_delta);
  o.get("observe_uav_position", c.observe_uav_position);
  o.finish();
}

void to_json(json& j, const MdpConfig& c) {
  j = json{{"penalty_lambda", c.penalty_lambda},
           {"reward_scale", c.reward_scale},
           {"horizon", c.horizon},
           {"block_fading", c.block_fading},
           {"learn_delta", c.learn_delta},
           {"observe_uav_position", c.observe_uav_position}};
}

ScenarioConfig desk_scenario() {
  ScenarioConfig c;
  c.num_users = 2;
  c.num_sat_antennas = 8;
  c.num_ris_elements = 8;
  c.ref_gain_sat_user = 3e-14;
  c.ref_gain_sat_uav = 1e-13;
  c.ref_gain_uav_user = 5e-2;
  return c;
}

}  // namespace skyris
