#include "skyris/power.hpp"

#include <cmath>

#include "skyris/errors.hpp"
#include "skyris/units.hpp"

namespace skyris::power {

double bdaris_power(double p_out, int m, double theta_ris, double p_d, double p_dc) {
  if (m < 0 || m % 2 != 0) throw StructuralError("bdaris_power: element count must be even");
  if (!(p_out >= 0.0) || !(p_d >= 0.0) || !(p_dc >= 0.0)) throw DomainError("bdaris_power: negative power");
  if (!(theta_ris >= 1.0)) throw DomainError("bdaris_power: amplifier factor must be at least 1");
  return theta_ris * p_out + 0.5 * m * (p_d + p_dc);
}

double ris_power(RisMode mode, double p_out, int m, double theta_ris, double p_d, double p_dc) {
  switch (mode) {
    case RisMode::bd_active:
      return bdaris_power(p_out, m, theta_ris, p_d, p_dc);
    case RisMode::diag_active:
      // one amplifier and one phase shifter per element
      return bdaris_power(p_out, 2 * m, theta_ris, p_d, p_dc);
    case RisMode::diag_passive:
      if (m < 0 || m % 2 != 0) throw StructuralError("ris_power: element count must be even");
      return m * p_d;
  }
  return 0.0;
}

double blade_profile_power(const HoverParams& hp) {
  return hp.profile_drag / 8.0 * hp.air_density * hp.rotor_solidity * hp.disc_area *
         std::pow(hp.angular_velocity, 3) * std::pow(hp.rotor_radius, 3);
}

double induced_power(const HoverParams& hp) {
  return (1.0 + hp.induced_correction) * std::pow(hp.weight, 1.5) / std::sqrt(2.0 * hp.air_density * hp.disc_area);
}

double hover_power(const HoverParams& hp) {
  for (double v : {hp.rotor_solidity, hp.air_density, hp.profile_drag, hp.disc_area, hp.angular_velocity,
                   hp.rotor_radius})
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("hover_power: parameters must be positive");
  if (!(hp.weight >= 0.0) || !(hp.induced_correction >= 0.0))
    throw DomainError("hover_power: weight and induced correction must be non-negative");
  return blade_profile_power(hp) + induced_power(hp);
}

bool disc_area_consistent(const HoverParams& hp) {
  const double ref = units::pi * hp.rotor_radius * hp.rotor_radius;
  return std::abs(hp.disc_area - ref) <= 0.01 * ref;
}

PowerBreakdown total_power(const RsmaAction& act, double p_s, double p_out, const ScenarioConfig& cfg) {
  PowerBreakdown pb;
  pb.p_sat_alloc = p_s * act.power_fraction();
  pb.p_bdaris = ris_power(cfg.ris_mode, p_out, cfg.num_ris_elements, cfg.theta_ris, cfg.p_circuit(), cfg.p_dc());
  pb.p_proc = cfg.p_proc;
  pb.p_uav_hover = hover_power(cfg.hover);
  pb.p_total = pb.p_sat_alloc + pb.p_bdaris + pb.p_proc + pb.p_uav_hover;
  return pb;
}

}  // namespace skyris::power
