#pragma once

namespace omk {

// Bose occupancy at energy E and temperature T (k_B = 1). T = 0 gives 0.
double bose_occupancy(double energy, double temperature);

struct Temperature {
  double value = 0.0;
  bool capped = false;  // occupancy too large to invert; value is the cap
};

// Inverse of bose_occupancy in T. n = 0 maps to T = 0 exactly.
Temperature bose_temperature(double energy, double occupancy);

inline constexpr double kOccupancyCap = 1e6;

}  // namespace omk
