#pragma once

#include <string>

#include "mgtr/design.hpp"
#include "mgtr/device_model.hpp"

namespace mgtr {

enum class Branch { mt, st };
const char* to_string(Branch b);

struct SolverOptions {
  int max_iterations = 200;
  double damping = 0.5;
  double rel_tol = 1e-12;
};

struct BranchOperatingPoint {
  Branch device = Branch::mt;
  TerminalVoltages voltages;  ///< of the input transistor
  double i_d = 0.0;
  double r_ct = 0.0;
  double v_source = 0.0;  ///< absolute source-node voltage
  PowerSeries series;
  int iterations = 0;
  bool bracketed = false;  ///< fell back from damped iteration to the bracketing solver
};

struct OperatingPoints {
  BranchOperatingPoint mt;
  BranchOperatingPoint st;
  bool st_active = false;
};

struct CascodeOperatingPoint {
  double i_d = 0.0;
  TerminalVoltages voltages;
  double v_gate = 0.0;  ///< absolute gate voltage required by the cascode
  PowerSeries series;
  bool saturated = false;
};

/// Resistance of a control transistor whose source sits at `v_source`.
/// Throws NotInTriodeError (with `branch`) when the overdrive is not positive.
double ct_resistance(const ControlTransistor& ct, const BiasNetwork& net, double v_source,
                     Branch branch);

/// Source-node voltage for branch current `i_d`: v_s + i_d r(v_s) = v_dd.
double source_node_voltage(const ControlTransistor& ct, const BiasNetwork& net, double i_d,
                           Branch branch);

/// Current the input transistor draws with its source at `v_source`.
double device_current_at_source(const MosfetParams& dev, const BiasNetwork& net,
                                double v_source, double temperature_k);

BranchOperatingPoint solve_branch(const MosfetParams& dev, const ControlTransistor& ct,
                                  const BiasNetwork& net, Branch branch, double temperature_k,
                                  const SolverOptions& opts = {});

/// Solves both branches. In single-gate mode the ST point is all zero.
OperatingPoints solve_self_bias(const LnaDesign& design);

/// Cascode bias carrying `i_total` with drain at DC ground.
CascodeOperatingPoint solve_cascode(const LnaDesign& design, double i_total);

/// gm_dev / (1 + gm_dev / gm_ct).
double effective_gm(double gm_dev, double gm_ct);

/// CT W/L giving `target_r` at `ct_bias` (v_sb ignored for a source tie).
double ct_size_for_target(double target_r, const TerminalVoltages& ct_bias,
                          const MosfetParams& card, BulkTie tie);

/// v_dd times the sum of the MT and ST branch currents.
double compute_power(const LnaDesign& design, const OperatingPoints& ops);

}  // namespace mgtr
