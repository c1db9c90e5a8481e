#include "mgtr/bias_network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mgtr/errors.hpp"

namespace mgtr {

const char* to_string(Branch b) { return b == Branch::mt ? "MT" : "ST"; }

namespace {

double ct_overdrive(const ControlTransistor& ct, const BiasNetwork& net, double v_source) {
  const double v_sb = ct.bulk_tie == BulkTie::vss ? std::max(v_source, 0.0) : 0.0;
  // v_gs - v_th - v_ds with v_gs = v_ctrl - v_s and v_ds = v_dd - v_s.
  return net.v_ctrl - net.v_dd - threshold_voltage(ct.card, v_sb);
}

}  // namespace

double ct_resistance(const ControlTransistor& ct, const BiasNetwork& net, double v_source,
                     Branch branch) {
  const double od = ct_overdrive(ct, net, v_source);
  if (!(od > 0)) {
    std::ostringstream os;
    os << to_string(branch) << " control transistor not in triode (overdrive " << od
       << " V at source node " << v_source << " V)";
    throw NotInTriodeError(to_string(branch), os.str());
  }
  return ct.card.l / (ct.card.k_prime * ct.card.w * od);
}

double source_node_voltage(const ControlTransistor& ct, const BiasNetwork& net, double i_d,
                           Branch branch) {
  if (!(i_d > 0)) return net.v_dd;
  if (ct.bulk_tie == BulkTie::source) return net.v_dd - i_d * ct_resistance(ct, net, net.v_dd, branch);

  // phi(v) = v + i r(v) - v_dd is increasing in v; r is infinite where the
  // CT leaves triode, which only happens above the root.
  auto phi = [&](double v) {
    const double od = ct_overdrive(ct, net, v);
    if (!(od > 0)) return std::numeric_limits<double>::infinity();
    return v + i_d * ct.card.l / (ct.card.k_prime * ct.card.w * od) - net.v_dd;
  };
  // Below v = 0 the body bias saturates at zero, so r is constant there.
  double lo = net.v_dd - i_d * ct.card.l / (ct.card.k_prime * ct.card.w *
                                         std::max(ct_overdrive(ct, net, 0.0), 1e-300));
  lo = std::min(lo, 0.0);
  if (!std::isfinite(lo) || lo < -1e6) {
    throw NotInTriodeError(to_string(branch), std::string(to_string(branch)) +
                                                  " control transistor not in triode at any source voltage");
  }
  double hi = net.v_dd;
  if (phi(lo) > 0) return lo;
  for (int k = 0; k < 200 && hi - lo > 4 * std::numeric_limits<double>::epsilon() * net.v_dd; ++k) {
    const double mid = 0.5 * (lo + hi);
    (phi(mid) > 0 ? hi : lo) = mid;
  }
  const double v = 0.5 * (lo + hi);
  ct_resistance(ct, net, v, branch);  // throws if the root is not in triode
  return v;
}

double device_current_at_source(const MosfetParams& dev, const BiasNetwork& net,
                                double v_source, double temperature_k) {
  TerminalVoltages v{v_source - net.v_b, v_source - net.v_cas, 0.0};
  return drain_current(dev, v, temperature_k);
}

BranchOperatingPoint solve_branch(const MosfetParams& dev, const ControlTransistor& ct,
                                  const BiasNetwork& net, Branch branch, double temperature_k,
                                  const SolverOptions& opts) {
  auto image = [&](double i) {
    return device_current_at_source(dev, net, source_node_voltage(ct, net, i, branch),
                                    temperature_k);
  };

  int evals = 0;
  auto fail = [&](const char* how) {
    std::ostringstream os;
    os << to_string(branch) << " bias did not converge in " << opts.max_iterations
       << " iterations (" << how << ")";
    throw ConvergenceError(to_string(branch), os.str());
  };

  const double i_max = image(0.0);
  ++evals;
  double i = 0.0;
  bool bracketed = false;

  if (i_max > 0) {
    // g(i) = i - image(i) is increasing; [0, i_max] brackets the root.
    double lo = 0.0, hi = i_max;
    double g_lo = -i_max, g_hi = std::numeric_limits<double>::quiet_NaN();
    bool converged = false;

    double prev_step = std::numeric_limits<double>::infinity();
    int growing = 0;
    i = 0.0;
    double f = i_max;
    const int damped_budget = std::max(1, std::min(opts.max_iterations / 4, 50));
    while (evals < damped_budget) {
      const double next = (1.0 - opts.damping) * i + opts.damping * f;
      const double step = std::abs(next - i);
      i = next;
      f = image(i);
      ++evals;
      const double g = i - f;
      if (g <= 0) { lo = i; g_lo = g; } else { hi = i; g_hi = g; }
      if (std::abs(g) <= opts.rel_tol * std::abs(i) || step <= opts.rel_tol * std::abs(i)) {
        converged = true;
        break;
      }
      growing = step >= prev_step ? growing + 1 : 0;
      prev_step = step;
      if (growing >= 2) break;
    }

    if (!converged) {
      bracketed = true;
      if (std::isnan(g_hi)) g_hi = i_max - (++evals, image(i_max));
      // Illinois-modified regula falsi on [lo, hi].
      int side = 0;
      while (true) {
        if (evals >= opts.max_iterations) fail("bracketing stage");
        double x = (g_hi - g_lo) != 0 ? hi - g_hi * (hi - lo) / (g_hi - g_lo) : 0.5 * (lo + hi);
        if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
        const double g = x - image(x);
        ++evals;
        i = x;
        if (std::abs(g) <= opts.rel_tol * std::abs(x) ||
            hi - lo <= 4 * std::numeric_limits<double>::epsilon() * hi)
          break;
        if (g <= 0) {
          lo = x; g_lo = g;
          if (side == -1) g_hi *= 0.5;
          side = -1;
        } else {
          hi = x; g_hi = g;
          if (side == 1) g_lo *= 0.5;
          side = 1;
        }
      }
    }
  }

  BranchOperatingPoint op;
  op.device = branch;
  op.i_d = std::max(i, 0.0);
  op.v_source = source_node_voltage(ct, net, op.i_d, branch);
  op.r_ct = ct_resistance(ct, net, op.v_source, branch);
  op.voltages = {op.v_source - net.v_b, op.v_source - net.v_cas, 0.0};
  op.series = transconductance_series(dev, op.voltages, temperature_k);
  op.iterations = evals;
  op.bracketed = bracketed;
  return op;
}

OperatingPoints solve_self_bias(const LnaDesign& design) {
  SolverOptions opts;
  opts.max_iterations = design.analysis.bias_max_iter;
  OperatingPoints ops;
  ops.mt = solve_branch(design.mt, design.bias.ct_mt, design.bias, Branch::mt,
                        design.temperature_k, opts);
  ops.st_active = design.st_active();
  if (ops.st_active) {
    ops.st = solve_branch(design.st, design.bias.ct_st, design.bias, Branch::st,
                          design.temperature_k, opts);
  } else {
    ops.st.device = Branch::st;
  }
  return ops;
}

CascodeOperatingPoint solve_cascode(const LnaDesign& design, double i_total) {
  CascodeOperatingPoint c;
  c.i_d = i_total;
  const double v_ds = design.bias.v_cas;
  auto current = [&](double v_gs) {
    return drain_current(design.lt, {v_gs, v_ds, 0.0}, design.temperature_k);
  };
  double lo = design.lt.v_t0 - 2.0, hi = design.lt.v_t0 + 0.5;
  while (current(hi) < i_total && hi < 100.0) hi += 0.5;
  for (int k = 0; k < 200 && hi - lo > 1e-15; ++k) {
    const double mid = 0.5 * (lo + hi);
    (current(mid) < i_total ? lo : hi) = mid;
  }
  c.voltages = {0.5 * (lo + hi), v_ds, 0.0};
  c.v_gate = design.bias.v_cas - c.voltages.v_gs;
  c.series = transconductance_series(design.lt, c.voltages, design.temperature_k);
  const double u_t = thermal_voltage(design.temperature_k);
  const double n_ut = design.lt.n_slope * u_t;
  const double v_dsat = 2.0 * n_ut * softplus((c.voltages.v_gs - design.lt.v_t0) / (2.0 * n_ut)) + 4.0 * u_t;
  c.saturated = v_ds >= 2.0 * v_dsat;
  return c;
}

double effective_gm(double gm_dev, double gm_ct) {
  if (!(gm_ct > 0)) throw DomainError("effective_gm: gm_ct must be > 0");
  if (!(gm_dev >= 0)) throw DomainError("effective_gm: gm_dev must be >= 0");
  return gm_dev / (1.0 + gm_dev / gm_ct);
}

double ct_size_for_target(double target_r, const TerminalVoltages& ct_bias,
                          const MosfetParams& card, BulkTie tie) {
  if (!(target_r > 0)) throw DomainError("ct_size_for_target: target_r must be > 0");
  const double v_sb = tie == BulkTie::vss ? ct_bias.v_sb : 0.0;
  const double od = ct_bias.v_gs - threshold_voltage(card, v_sb) - ct_bias.v_ds;
  if (!(od > 0)) throw NotInTriodeError("", "ct_size_for_target: control transistor not in triode");
  return 1.0 / (card.k_prime * target_r * od);
}

double compute_power(const LnaDesign& design, const OperatingPoints& ops) {
  double i = ops.mt.i_d;
  if (ops.st_active) i += ops.st.i_d;
  return design.bias.v_dd * i;
}

}  // namespace mgtr
