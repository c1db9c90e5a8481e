#include "mgtr/rf_analysis.hpp"

#include <cmath>
#include <limits>

#include "mgtr/errors.hpp"
#include "mgtr/units.hpp"

namespace mgtr {

Complex ImpedanceEnv::z2(double omega) const {
  if (load == LoadKind::cascode) return {cascode_z2(gm_lt), 0.0};
  return {0.0, omega * l2};
}

void ImpedanceEnv::validate() const {
  if (!(r_s > 0)) throw DomainError("impedance env: r_s must be > 0");
  if (!(l1 >= 0) || !(l2 >= 0)) throw DomainError("impedance env: inductances must be >= 0");
  if (!(h_mag > 0) || !(a1_mag > 0)) throw DomainError("impedance env: transfer magnitudes must be > 0");
  if (load == LoadKind::cascode && !(gm_lt > 0)) throw DomainError("impedance env: cascode gm_lt must be > 0");
}

Complex g_omega(const PowerSeries& s, const DeviceCaps& caps, Complex z1, Complex z2,
                double omega) {
  if (omega < 0) throw DomainError("g_omega: omega must be >= 0");
  const Complex j{0.0, 1.0};
  const Complex num = 1.0 + 2.0 * j * omega * caps.c_gs * z1 + 2.0 * j * omega * caps.c_gd * z2;
  const double c_total = caps.c_gs + caps.c_gd;
  Complex den = 1.0;
  if (c_total > 0) {
    if (!(s.gm > 0)) throw DomainError("g_omega: gm must be > 0 to define w_T");
    const double omega_t = s.gm / c_total;
    den += omega_t * caps.c_gd * z2;
  }
  return s.gm * num / den;
}

Complex g_ob(const PowerSeries& s, const DeviceCaps& caps, const ImpedanceEnv& env,
             double delta_omega, double omega) {
  if (s.a2 == 0.0) return 0.0;
  // g(.) at frequency F uses the "2jw" factor with w = F/2. The impedances
  // seen at 2w are reused at the difference frequency.
  const Complex z1 = env.z1(2.0 * omega);
  const Complex z2 = env.z2(2.0 * omega);
  const Complex g_lo = g_omega(s, caps, z1, z2, 0.5 * delta_omega);
  const Complex g_hi = g_omega(s, caps, z1, z2, omega);
  const Complex d_lo = s.a1 + g_lo;
  const Complex d_hi = s.a1 + g_hi;
  if (std::abs(d_lo) == 0.0) throw SingularityError("g_ob: a1 + g(dw) vanishes");
  if (std::abs(d_hi) == 0.0) throw SingularityError("g_ob: a1 + g(2w) vanishes");
  return (2.0 * s.a2 * s.a2 / 3.0) * (2.0 / d_lo + 1.0 / d_hi);
}

Complex eps_term(const PowerSeries& s, const DeviceCaps& caps, const ImpedanceEnv& env,
                 double delta_omega, double omega) {
  return s.a3 - g_ob(s, caps, env, delta_omega, omega);
}

Iip3Estimate volterra_iip3(const PowerSeries& s, const DeviceCaps& caps, const ImpedanceEnv& env,
                           double f_a, double f_b) {
  if (!(f_a > 0) || !(f_b > 0) || f_a == f_b)
    throw DomainError("volterra_iip3: tones must be positive and distinct");
  const double omega = kTwoPi * f_a;
  const double delta = kTwoPi * std::abs(f_b - f_a);
  Iip3Estimate out;
  out.eps = eps_term(s, caps, env, delta, omega);
  const double mag = std::abs(out.eps);
  const double denom =
      6.0 * env.z_s(omega).real() * env.h_mag * std::pow(env.a1_mag, 3) * mag;
  if (mag == 0.0) {
    out.infinite = true;
    out.dbm = out.dbm_unnormalized = std::numeric_limits<double>::infinity();
    return out;
  }
  out.dbm = watts_to_dbm(s.a1 / denom);
  out.dbm_unnormalized = watts_to_dbm(1.0 / denom);
  return out;
}

double cascode_z2(double gm_lt) {
  if (!(gm_lt > 0)) throw DomainError("cascode_z2: gm_lt must be > 0");
  return 1.0 / gm_lt;
}

double voltage_gain(double gm, Complex z_out) {
  if (!(gm > 0)) throw DomainError("voltage_gain: gm must be > 0");
  const double m = std::abs(z_out);
  if (m == 0.0) return -std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(gm * m);
}

namespace {
double branch_noise(double g_eff, double gm_lt) {
  return 1.0 / g_eff + gm_lt / (g_eff * g_eff);
}
}  // namespace

double noise_figure_full(double mt_eff, std::optional<double> st_eff, double gm_lt,
                         const NoiseModel& model) {
  if (!(mt_eff > 0)) throw DomainError("noise_figure_full: mt_eff must be > 0");
  if (st_eff && !(*st_eff > 0)) throw DomainError("noise_figure_full: st_eff must be > 0");
  if (!(gm_lt >= 0)) throw DomainError("noise_figure_full: gm_lt must be >= 0");
  if (!(model.r_s > 0) || !(model.temperature_k > 0))
    throw DomainError("noise_figure_full: r_s and temperature must be > 0");
  const double four_kt = 4.0 * kBoltzmann * model.temperature_k;
  double sum = branch_noise(mt_eff, gm_lt) / (four_kt * model.r_s);
  if (st_eff) sum += branch_noise(*st_eff, gm_lt) / (four_kt * model.r_s);
  const double f = 1.0 + four_kt * model.gamma_noise * sum;
  return 10.0 * std::log10(f);
}

double noise_figure_approx(double mt_eff, const NoiseModel& model) {
  if (!(mt_eff > 0)) throw DomainError("noise_figure_approx: mt_eff must be > 0");
  return 10.0 * std::log10(1.0 + model.gamma_noise / (model.r_s * mt_eff));
}

}  // namespace mgtr
