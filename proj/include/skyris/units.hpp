#pragma once

namespace skyris::units {

inline constexpr double pi = 3.14159265358979323846;

double dbm_to_watt(double dbm);
double watt_to_dbm(double watt);
double db_to_linear(double db);
double linear_to_db(double linear);
constexpr double deg_to_rad(double deg) { return deg * pi / 180.0; }

}  // namespace skyris::units
