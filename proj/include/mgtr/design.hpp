#pragma once

#include <string>
#include <vector>

#include "mgtr/device_model.hpp"
#include "mgtr/rf_analysis.hpp"

namespace mgtr {

enum class BulkTie { source, vss };
enum class Mode { mgtr, single_gate };

/// NMOS resistor device between V_DD and an input transistor's source.
struct ControlTransistor {
  MosfetParams card;
  BulkTie bulk_tie = BulkTie::source;

  bool operator==(const ControlTransistor&) const = default;
};

/// Self-biasing network. MT and ST (PMOS) share the gate bias v_b; each
/// source connects to v_dd through its own control transistor whose gate
/// sits at v_ctrl. The MT and ST drains join at the cascode source node,
/// held at v_cas by the cascode gate rail.
struct BiasNetwork {
  double v_dd = 2.0;
  double v_b = 0.4;
  double v_ctrl = 3.0;
  double v_cas = 0.6;
  ControlTransistor ct_mt;
  ControlTransistor ct_st;

  bool operator==(const BiasNetwork&) const = default;
};

/// Bounds (inclusive, W/L) for the sweet-spot search.
struct SearchBox {
  double ct_mt_min = 10.0;
  double ct_mt_max = 10000.0;
  double ct_st_min = 1e-3;
  double ct_st_max = 10.0;

  bool operator==(const SearchBox&) const = default;
};

struct AnalysisSettings {
  double f_center_hz = 2.1e9;
  double tone_spacing_hz = 5e6;
  std::vector<double> pin_dbm;
  std::vector<double> freqs_hz;
  double window_half_width_v = 0.05;
  int window_points = 21;
  int bias_max_iter = 200;
  SearchBox search;
  bool free_ct_mt = false;
  bool free_ct_st = true;

  bool operator==(const AnalysisSettings&) const = default;
};

struct LnaDesign {
  std::string label;
  Mode mode = Mode::mgtr;
  MosfetParams mt;
  MosfetParams st;
  MosfetParams lt;
  BiasNetwork bias;
  double l1_h = 0.0;
  double l2_h = 0.0;
  double r_s = 50.0;
  double temperature_k = 300.0;
  AnalysisSettings analysis;

  /// ST participates only in MGTR mode with a nonzero width.
  bool st_active() const { return mode == Mode::mgtr && st.w > 0; }

  /// Throws ConfigError listing every invariant violation.
  void validate() const;

  bool operator==(const LnaDesign&) const = default;
};

std::vector<double> default_pin_sweep();
std::vector<double> default_band();

/// Shipped design. The MGTR and single-gate variants differ only in `mode`.
LnaDesign default_design(Mode mode = Mode::mgtr);

/// Sets a control transistor's width so its W/L equals `ratio`.
void set_ct_ratio(ControlTransistor& ct, double ratio);
double ct_ratio(const ControlTransistor& ct);

const char* to_string(Mode m);
const char* to_string(BulkTie t);
const char* to_string(Polarity p);

}  // namespace mgtr
