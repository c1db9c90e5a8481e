#pragma once

#include <cmath>
#include <numbers>

namespace mgtr {

inline constexpr double kBoltzmann = 1.380649e-23;       // J/K
inline constexpr double kElementaryCharge = 1.602176634e-19;  // C
inline constexpr double kDefaultTemperature = 300.0;     // K
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double thermal_voltage(double temperature_k) {
  return kBoltzmann * temperature_k / kElementaryCharge;
}

inline double watts_to_dbm(double p_w) { return 10.0 * std::log10(p_w / 1e-3); }
inline double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

/// Available power of a source with open-circuit amplitude `amplitude` and
/// resistance `r`: A^2 / (8 r).
inline double available_power(double amplitude, double r) {
  return amplitude * amplitude / (8.0 * r);
}
inline double amplitude_for_available_power(double p_w, double r) {
  return std::sqrt(8.0 * r * p_w);
}

}  // namespace mgtr
