#pragma once

// Independent reference computations used by the unit and acceptance tests.

#include <boost/multiprecision/float128.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "mgtr/bias_network.hpp"
#include "mgtr/design.hpp"
#include "mgtr/device_model.hpp"
#include "mgtr/rf_analysis.hpp"

namespace oracle {

using Quad = boost::multiprecision::float128;

struct Derivs {
  double gm = 0, gm1 = 0, gm2 = 0;
};

inline Quad quad_current(const mgtr::MosfetParams& p, Quad v_gs, double v_ds, double v_sb,
                         double temperature_k = 300.0) {
  return mgtr::detail::channel_current(p, v_gs, v_ds, mgtr::threshold_voltage(p, v_sb),
                                       temperature_k);
}

/// Central differences at step h and h/2 combined by one Richardson level,
/// evaluated in quadruple precision so rounding stays far below the
/// truncation error even for the third derivative.
inline Derivs richardson(const mgtr::MosfetParams& p, const mgtr::TerminalVoltages& v,
                         double temperature_k = 300.0, double h = 1e-5) {
  const Quad x0 = v.v_gs;
  auto f = [&](Quad dx) { return quad_current(p, x0 + dx, v.v_ds, v.v_sb, temperature_k); };
  auto stencil = [&](Quad s) {
    const Quad f0 = f(0), fp = f(s), fm = f(-s), f2p = f(2 * s), f2m = f(-2 * s);
    return std::array<Quad, 3>{(fp - fm) / (2 * s), (fp - 2 * f0 + fm) / (s * s),
                               (f2p - 2 * fp + 2 * fm - f2m) / (2 * s * s * s)};
  };
  const auto a = stencil(Quad(h));
  const auto b = stencil(Quad(h) / 2);
  Derivs d;
  d.gm = static_cast<double>((4 * b[0] - a[0]) / 3);
  d.gm1 = static_cast<double>((4 * b[1] - a[1]) / 3);
  d.gm2 = static_cast<double>((4 * b[2] - a[2]) / 3);
  return d;
}

inline bool close(double got, double ref, double rel, double abs_floor) {
  return std::abs(got - ref) <= std::max(rel * std::abs(ref), abs_floor);
}

/// Branch current by plain bisection: the residual i - I_dev(i) is
/// monotone in i over [0, I_dev(v_gs = v_dd - v_b)].
inline double bisect_branch(const mgtr::MosfetParams& dev, const mgtr::ControlTransistor& ct,
                            const mgtr::BiasNetwork& net, double temperature_k = 300.0,
                            double tol = 1e-12) {
  const auto& c = ct.card;
  // Source node for a given current, again by bisection on v + i r(v) = v_dd.
  auto v_source = [&](double i) {
    auto r = [&](double v) {
      const double v_sb = ct.bulk_tie == mgtr::BulkTie::vss ? std::max(v, 0.0) : 0.0;
      const double vth = c.v_t0 + c.gamma_body * (std::sqrt(v_sb + c.phi2b) - std::sqrt(c.phi2b));
      const double od = (net.v_ctrl - v) - vth - (net.v_dd - v);
      return od > 0 ? c.l / (c.k_prime * c.w * od) : INFINITY;
    };
    double lo = -10.0, hi = net.v_dd;
    for (int k = 0; k < 400; ++k) {
      const double mid = 0.5 * (lo + hi);
      (mid + i * r(mid) > net.v_dd ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
  };
  auto current_at = [&](double vs) {
    return mgtr::drain_current(dev, {vs - net.v_b, vs - net.v_cas, 0.0}, temperature_k);
  };
  double lo = 0.0, hi = current_at(net.v_dd);
  while (hi - lo > tol * hi) {
    const double mid = 0.5 * (lo + hi);
    (mid - current_at(v_source(mid)) > 0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

using CLD = std::complex<long double>;

inline CLD g_omega(long double gm, long double cgs, long double cgd, CLD z1, CLD z2,
                   long double w) {
  const CLD j(0, 1);
  const long double ct = cgs + cgd;
  const CLD den = ct > 0 ? CLD(1) + (gm / ct) * cgd * z2 : CLD(1);
  return gm * (CLD(1) + 2.0L * j * w * cgs * z1 + 2.0L * j * w * cgd * z2) / den;
}

/// Intermodulation error term a3 - (2 a2^2/3)(2/(a1+g(dw)) + 1/(a1+g(2w))).
inline CLD eps(long double a1, long double a2, long double a3, long double cgs, long double cgd,
               CLD z1, CLD z2, long double w, long double dw) {
  const CLD glo = g_omega(a1, cgs, cgd, z1, z2, dw / 2);
  const CLD ghi = g_omega(a1, cgs, cgd, z1, z2, w);
  return CLD(a3) - (2.0L * a2 * a2 / 3.0L) * (2.0L / (a1 + glo) + 1.0L / (a1 + ghi));
}

/// Available-power IIP3 of a memoryless cubic, dBm.
inline double memoryless_iip3_dbm(double a1, double a3, double r_s) {
  const long double a2_iip3 = 4.0L / 3.0L * std::abs(a1 / a3);
  return static_cast<double>(10.0L * std::log10(a2_iip3 / (8.0L * r_s) / 1e-3L));
}

/// Random perturbation of the default design that stays biasable.
inline mgtr::LnaDesign random_design(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  mgtr::LnaDesign d = mgtr::default_design();
  d.mt.w *= 0.5 + u(rng);
  d.st.w *= 0.5 + u(rng);
  d.bias.v_b = 0.3 + 0.3 * u(rng);
  d.bias.v_cas = 0.4 + 0.4 * u(rng);
  mgtr::set_ct_ratio(d.bias.ct_mt, std::exp(std::log(30.0) + u(rng) * std::log(300.0)));
  mgtr::set_ct_ratio(d.bias.ct_st, std::exp(std::log(1e-3) + u(rng) * std::log(1e3)));
  d.bias.ct_st.bulk_tie = u(rng) < 0.5 ? mgtr::BulkTie::vss : mgtr::BulkTie::source;
  return d;
}

}  // namespace oracle
