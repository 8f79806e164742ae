#pragma once

#include "skyris/action.hpp"
#include "skyris/config.hpp"

namespace skyris::power {

struct PowerBreakdown {
  double p_sat_alloc = 0.0;
  double p_bdaris = 0.0;
  double p_proc = 0.0;
  double p_uav_hover = 0.0;
  double p_total = 0.0;
};

// theta P_out + (m/2)(p_d + p_dc)
double bdaris_power(double p_out, int m, double theta_ris, double p_d, double p_dc);

// Static power of the surface for the configured mode, plus amplifier cost.
double ris_power(RisMode mode, double p_out, int m, double theta_ris, double p_d, double p_dc);

double blade_profile_power(const HoverParams& hp);
double induced_power(const HoverParams& hp);
double hover_power(const HoverParams& hp);

// True when A is within 1% of pi R^2.
bool disc_area_consistent(const HoverParams& hp);

PowerBreakdown total_power(const RsmaAction& act, double p_s, double p_out, const ScenarioConfig& cfg);

}  // namespace skyris::power
