#pragma once

// Closed-form small-signal metrics: Volterra-series IIP3, voltage gain and
// noise figure of the MGTR stage.
//
// g1/g2/g3 of the intermodulation kernel are the Taylor coefficients a1/a2/a3
// of the device power series (a2 = g_m'/2, a3 = g_m''/6).

#include <complex>
#include <optional>

#include "mgtr/device_model.hpp"

namespace mgtr {

using Complex = std::complex<double>;

enum class LoadKind {
  cascode,   ///< drain node sees the cascode source, Z2 = 1/gm_LT
  inductive  ///< drain node sees the load directly, Z2 = j w L2
};

struct DeviceCaps {
  double c_gs = 0.0;
  double c_gd = 0.0;
};

struct ImpedanceEnv {
  double r_s = 50.0;   // Ohm
  double l1 = 0.0;     // H, gate series matching inductor
  double l2 = 0.0;     // H, load inductor
  LoadKind load = LoadKind::cascode;
  double gm_lt = 0.0;  // S, cascode transconductance (cascode load only)
  double h_mag = 1.0;
  double a1_mag = 1.0;

  Complex z_s(double omega) const { return {r_s, omega * l1}; }
  Complex z1(double omega) const { return {r_s, omega * l1}; }
  Complex z2(double omega) const;
  Complex z_out(double omega) const { return {0.0, omega * l2}; }

  /// Throws DomainError on a violated invariant.
  void validate() const;
};

struct NoiseModel {
  double temperature_k = 300.0;
  double gamma_noise = 2.0 / 3.0;
  double r_s = 50.0;
};

/// Frequency-shaped feedback admittance
///   gm (1 + 2jw c_gs z1 + 2jw c_gd z2) / (1 + w_T c_gd z2),  w_T = gm/(c_gs + c_gd).
/// With no capacitance the w_T term is dropped (memoryless limit).
Complex g_omega(const PowerSeries& s, const DeviceCaps& caps, Complex z1, Complex z2,
                double omega);

/// Second-order feedback term (2 a2^2/3)[2/(a1 + g(dw)) + 1/(a1 + g(2w))].
/// g(dw) is the feedback admittance evaluated at the difference frequency and
/// g(2w) at twice the fundamental; `omega` is the fundamental.
Complex g_ob(const PowerSeries& s, const DeviceCaps& caps, const ImpedanceEnv& env,
             double delta_omega, double omega);

/// a3 - g_ob.
Complex eps_term(const PowerSeries& s, const DeviceCaps& caps, const ImpedanceEnv& env,
                 double delta_omega, double omega);

struct Iip3Estimate {
  double dbm = 0.0;              ///< a1-normalized, available-power referred
  double dbm_unnormalized = 0.0; ///< the intercept formula without the a1 factor
  bool infinite = false;
  Complex eps{};
};

/// IIP3 for the lower product 2 f_a - f_b.
Iip3Estimate volterra_iip3(const PowerSeries& s, const DeviceCaps& caps, const ImpedanceEnv& env,
                           double f_a, double f_b);

double cascode_z2(double gm_lt);

/// 20 log10(gm |z_out|); -inf when |z_out| = 0.
double voltage_gain(double gm, Complex z_out);

/// Parallel MT/ST noise figure with the cascode contribution, in dB. Passing
/// no ST transconductance drops the ST term.
double noise_figure_full(double mt_eff, std::optional<double> st_eff, double gm_lt,
                         const NoiseModel& model);

/// 10 log10(1 + gamma / (r_s mt_eff)).
double noise_figure_approx(double mt_eff, const NoiseModel& model);

}  // namespace mgtr
