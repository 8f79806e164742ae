#include "skyris/units.hpp"

#include <cmath>

#include "skyris/errors.hpp"

namespace skyris {

SchemaError::SchemaError(std::vector<std::string> keys, const std::string& what)
    : std::runtime_error(what), keys_(std::move(keys)) {}

namespace units {

double dbm_to_watt(double dbm) { return std::pow(10.0, dbm / 10.0 - 3.0); }

double watt_to_dbm(double watt) {
  if (!(watt > 0.0)) throw DomainError("watt_to_dbm: power must be positive");
  return 10.0 * std::log10(watt) + 30.0;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) {
  if (!(linear > 0.0)) throw DomainError("linear_to_db: value must be positive");
  return 10.0 * std::log10(linear);
}

}  // namespace units
}  // namespace skyris
