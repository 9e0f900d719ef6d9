#include "omk/thermal.hpp"

#include <cmath>
#include <limits>

#include "omk/error.hpp"

namespace omk {

double bose_occupancy(double energy, double temperature) {
  if (!(energy > 0.0)) fail(ErrorCode::domain, "bose_occupancy: energy must be positive");
  if (temperature < 0.0) fail(ErrorCode::domain, "bose_occupancy: negative temperature");
  if (temperature == 0.0) return 0.0;
  return 1.0 / std::expm1(energy / temperature);
}

Temperature bose_temperature(double energy, double occupancy) {
  if (!(energy > 0.0)) fail(ErrorCode::domain, "bose_temperature: energy must be positive");
  if (occupancy < 0.0 || std::isnan(occupancy))
    fail(ErrorCode::domain, "bose_temperature: occupancy must be nonnegative");
  if (occupancy == 0.0) return {0.0, false};
  if (occupancy > kOccupancyCap || std::isinf(occupancy))
    return {energy / std::log1p(1.0 / kOccupancyCap), true};
  return {energy / std::log1p(1.0 / occupancy), false};
}

}  // namespace omk
