#pragma once

// gm'' superposition of the main and second transistors and the search for
// the control-transistor sizing that flattens the composite around V_B.

#include <string>
#include <vector>

#include "mgtr/bias_network.hpp"
#include "mgtr/design.hpp"

namespace mgtr {

/// Coefficient-wise sum of two parallel devices.
PowerSeries composite_series(const PowerSeries& mt, const PowerSeries& st);

struct Window {
  double lo = 0.0;
  double hi = 0.0;
  int points = 21;

  std::vector<double> grid() const;

  bool operator==(const Window&) const = default;
};

/// V_B +/- the configured half width.
Window default_window(const LnaDesign& design);

struct Knobs {
  bool ct_mt = false;
  bool ct_st = true;
};

struct CancellationResult {
  double ct_st_wl = 0.0;
  double ct_mt_wl = 0.0;
  double residual = 0.0;  ///< max |gm2_MT + gm2_ST| over the window, A/V^3
  double baseline = 0.0;  ///< max |gm2_MT| alone at the chosen ct_mt_wl
  Window window;
  bool st_disabled = false;  ///< no ST sizing beat the MT-alone baseline
  int evaluations = 0;
  std::vector<std::string> diagnostics;  ///< discarded candidates

  bool operator==(const CancellationResult&) const = default;
};

/// gm2 of one branch at each gate bias of `window`.
/// Throws whatever the bias solver throws.
std::vector<double> branch_gm2(const LnaDesign& design, Branch branch, double ct_ratio,
                               const std::vector<double>& v_grid);

double window_max_abs(const std::vector<double>& a, const std::vector<double>* b = nullptr);

/// Coarse log grid over the free CT ratios, then a simplex refinement in
/// log space. Ties go to the smaller ST ratio.
CancellationResult find_sweet_spot(const LnaDesign& design, const Window& window, Knobs knobs);

/// Brute force over an n x n log grid spanning the search box (a free knob
/// only varies when selected; fixed knobs keep the design value).
CancellationResult exhaustive_sweet_spot(const LnaDesign& design, const Window& window,
                                         Knobs knobs, int n = 200);

/// Copy of `design` with the CT ratios of `r` applied (ST zeroed when disabled).
LnaDesign apply_cancellation(const LnaDesign& design, const CancellationResult& r);

struct Gm2Row {
  double v_b = 0.0;
  double gm2_mt = 0.0;
  double gm2_st = 0.0;
  double gm2_sum = 0.0;
  std::string error;  ///< empty when the point solved
};

std::vector<Gm2Row> gm2_profile(const LnaDesign& design, const std::vector<double>& v_grid);

}  // namespace mgtr
