#pragma once

// Smooth MOSFET drain-current model with analytic derivatives.
//
// The channel current interpolates weak and strong inversion with
//   I = I_spec * ln^2(1 + exp(x/2)) * tanh(v_ds / v_dsat),
//   x = (v_gs - v_th) / (n U_T),  I_spec = 2 n^2 U_T^2 k' W/L,
//   v_dsat = 2 n U_T ln(1 + exp(x/2)) + 4 U_T,
// which tends to (k'/2)(W/L)(v_gs - v_th)^2 in strong inversion, decays
// exponentially below threshold and is C-infinity in v_gs.
//
// Voltages use a magnitude convention: for PMOS, v_gs/v_ds/v_sb are the
// source-referred magnitudes, so both polarities share one formula.

#include <cmath>

#include "mgtr/jet.hpp"
#include "mgtr/units.hpp"

namespace mgtr {

enum class Polarity { nmos, pmos };

/// Which current law a card follows. `linear_test` is a first-order law
/// (I = k' W/L * 1 V * (v_gs - v_th)) used to exercise downstream code with a
/// distortion-free device.
enum class CurrentLaw { charge_sheet, linear_test };

struct MosfetParams {
  Polarity polarity = Polarity::nmos;
  double v_t0 = 0.4;          // V
  double k_prime = 200e-6;    // A/V^2
  double w = 10e-6;           // m
  double l = 0.1e-6;          // m
  double gamma_body = 0.4;    // sqrt(V)
  double phi2b = 0.7;         // V
  double n_slope = 1.3;
  double c_gs = 100e-15;      // F
  double c_gd = 20e-15;       // F
  double gamma_noise = 2.0 / 3.0;
  CurrentLaw law = CurrentLaw::charge_sheet;

  double aspect() const { return w / l; }

  /// Throws DomainError listing every violated invariant.
  void validate() const;

  bool operator==(const MosfetParams&) const = default;
};

struct TerminalVoltages {
  double v_gs = 0.0;
  double v_ds = 0.0;
  double v_sb = 0.0;

  bool operator==(const TerminalVoltages&) const = default;
};

/// Quiescent current and the weak-nonlinearity expansion around it:
/// i = i_dc + a1 v + a2 v^2 + a3 v^3.
struct PowerSeries {
  double i_dc = 0.0;
  double gm = 0.0;   // dI/dv_gs
  double gm1 = 0.0;  // d2I/dv_gs2
  double gm2 = 0.0;  // d3I/dv_gs3
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;

  static PowerSeries from_derivatives(double i_dc, double gm, double gm1, double gm2);

  bool operator==(const PowerSeries&) const = default;
};

double threshold_voltage(const MosfetParams& p, double v_sb);

double drain_current(const MosfetParams& p, const TerminalVoltages& v,
                     double temperature_k = kDefaultTemperature);

PowerSeries transconductance_series(const MosfetParams& p, const TerminalVoltages& v,
                                    double temperature_k = kDefaultTemperature);

/// Channel resistance in deep triode: L / (k' W (v_gs - v_th - v_ds)).
/// Throws NotInTriodeError when the overdrive is not positive.
double triode_resistance(const MosfetParams& p, const TerminalVoltages& v);

namespace detail {

// The current law, generic over the scalar so the same expression is
// evaluated in double, long double or Jet3 arithmetic.
template <typename S>
S channel_current(const MosfetParams& p, const S& v_gs, double v_ds, double v_th,
                  double temperature_k) {
  using std::tanh;
  const double u_t = thermal_voltage(temperature_k);
  const double n_ut = p.n_slope * u_t;
  if (p.law == CurrentLaw::linear_test) {
    return (p.k_prime * p.aspect()) * (v_gs - v_th);
  }
  const double i_spec = 2.0 * p.n_slope * p.n_slope * u_t * u_t * p.k_prime * p.aspect();
  const S u = softplus((v_gs - v_th) / (2.0 * n_ut));
  const S v_dsat = (2.0 * n_ut) * u + 4.0 * u_t;
  return i_spec * (u * u) * tanh(v_ds / v_dsat);
}

}  // namespace detail

/// Extended-precision evaluation of drain_current for verification.
long double drain_current_extended(const MosfetParams& p, long double v_gs, double v_ds,
                                   double v_sb, double temperature_k = kDefaultTemperature);

}  // namespace mgtr
