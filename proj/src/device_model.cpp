#include "mgtr/device_model.hpp"

#include <sstream>
#include <string>
#include <vector>

#include "mgtr/errors.hpp"

namespace mgtr {

void MosfetParams::validate() const {
  std::vector<std::string> bad;
  if (!(w > 0)) bad.emplace_back("w must be > 0");
  if (!(l > 0)) bad.emplace_back("l must be > 0");
  if (!(k_prime > 0)) bad.emplace_back("k_prime must be > 0");
  if (!(phi2b > 0)) bad.emplace_back("phi2b must be > 0");
  if (!(gamma_body >= 0)) bad.emplace_back("gamma_body must be >= 0");
  if (!(n_slope >= 1)) bad.emplace_back("n_slope must be >= 1");
  if (!(c_gs >= 0)) bad.emplace_back("c_gs must be >= 0");
  if (!(c_gd >= 0)) bad.emplace_back("c_gd must be >= 0");
  if (!(gamma_noise > 0)) bad.emplace_back("gamma_noise must be > 0");
  if (bad.empty()) return;
  std::ostringstream os;
  os << "invalid MOSFET card:";
  for (const auto& b : bad) os << ' ' << b << ';';
  throw DomainError(os.str());
}

PowerSeries PowerSeries::from_derivatives(double i_dc, double gm, double gm1, double gm2) {
  PowerSeries s;
  s.i_dc = i_dc;
  s.gm = gm;
  s.gm1 = gm1;
  s.gm2 = gm2;
  s.a1 = gm;
  s.a2 = gm1 / 2.0;
  s.a3 = gm2 / 6.0;
  return s;
}

double threshold_voltage(const MosfetParams& p, double v_sb) {
  if (v_sb < 0) throw DomainError("threshold_voltage: forward body bias (v_sb < 0) is not modeled");
  return p.v_t0 + p.gamma_body * (std::sqrt(v_sb + p.phi2b) - std::sqrt(p.phi2b));
}

double drain_current(const MosfetParams& p, const TerminalVoltages& v, double temperature_k) {
  const double v_th = threshold_voltage(p, v.v_sb);
  return detail::channel_current(p, v.v_gs, v.v_ds, v_th, temperature_k);
}

long double drain_current_extended(const MosfetParams& p, long double v_gs, double v_ds,
                                   double v_sb, double temperature_k) {
  const double v_th = threshold_voltage(p, v_sb);
  return detail::channel_current(p, v_gs, v_ds, v_th, temperature_k);
}

PowerSeries transconductance_series(const MosfetParams& p, const TerminalVoltages& v,
                                    double temperature_k) {
  const double v_th = threshold_voltage(p, v.v_sb);
  const auto j = detail::channel_current(p, Jet3<double>::variable(v.v_gs), v.v_ds, v_th,
                                         temperature_k);
  return PowerSeries::from_derivatives(j.v, j.d1, j.d2, j.d3);
}

double triode_resistance(const MosfetParams& p, const TerminalVoltages& v) {
  const double overdrive = v.v_gs - threshold_voltage(p, v.v_sb) - v.v_ds;
  if (!(overdrive > 0)) {
    std::ostringstream os;
    os << "not in triode: v_gs - v_th - v_ds = " << overdrive << " V";
    throw NotInTriodeError("", os.str());
  }
  return p.l / (p.k_prime * p.w * overdrive);
}

}  // namespace mgtr
