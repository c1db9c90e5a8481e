#pragma once

// Time-domain two-tone test on a coherent sampling grid.
//
// The drive is v(t) = A (cos 2 pi f1 t + cos 2 pi f2 t) with A taken from the
// available input power into r_ref. The record spans an integer number of
// beat periods, so both tones and every intermodulation product land on
// exact DFT bins and no window is needed.

#include <optional>
#include <variant>
#include <vector>

#include "mgtr/design.hpp"

namespace mgtr {

struct PolynomialNonlinearity {
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
};

/// Large-signal MT (+ ST) drain current about the solved bias. Source and
/// drain nodes stay at their DC values.
struct FullDeviceNonlinearity {
  LnaDesign design;
};

using Nonlinearity = std::variant<PolynomialNonlinearity, FullDeviceNonlinearity>;

struct TwoToneSpec {
  double f1 = 2.0975e9;
  double f2 = 2.1025e9;
  std::vector<double> pin_dbm_sweep;
  double r_ref = 50.0;
  int cycles = 8;              ///< beat periods in the record
  int samples_per_period = 64; ///< per period of the highest IMD3 line
  double max_snap_hz = 1e4;    ///< largest tolerated move onto the coherent grid
  double transimpedance_ohm = 1.0;  ///< |Z_out| turning output current into voltage
  Nonlinearity nonlinearity = PolynomialNonlinearity{};
};

/// Frequencies after snapping onto the coherent grid.
struct CoherentGrid {
  double f1 = 0.0;
  double f2 = 0.0;
  double sample_rate = 0.0;
  long n_samples = 0;
  long k1 = 0;
  long k2 = 0;
  double snap_hz = 0.0;  ///< largest |requested - snapped| of the two tones
};

CoherentGrid coherent_grid(const TwoToneSpec& spec);

/// Levels are dBm of the output voltage delivered under the available-power
/// convention into r_ref; every line is clamped to at least the numeric floor.
struct SpectrumResult {
  double pin_dbm = 0.0;
  double p_fund = 0.0;
  double p_fund_hi = 0.0;  ///< level at f2
  double p_imd3_lo = 0.0;  ///< level at 2 f1 - f2
  double p_imd3_hi = 0.0;  ///< level at 2 f2 - f1
  double imd3_dbc = 0.0;   ///< p_imd3_lo - p_fund
  double numeric_floor = 0.0;
  double amp_fund = 0.0;     ///< output current amplitude at f1, A
  double amp_imd3_lo = 0.0;  ///< output current amplitude at 2 f1 - f2, A
  double parseval_residual = 0.0;
};

/// Output current samples for one input power (exposed for inspection).
std::vector<double> two_tone_waveform(const TwoToneSpec& spec, const CoherentGrid& grid,
                                      double pin_dbm);

/// One result per swept power, ordered as `spec.pin_dbm_sweep`. Power points
/// run concurrently.
std::vector<SpectrumResult> simulate_two_tone(const TwoToneSpec& spec);

/// Spectral analysis of an arbitrary coherent record (amplitudes 2|X_k|/N).
struct LineSpectrum {
  std::vector<double> amplitude;  ///< one-sided, bins 0..N/2
  double time_power = 0.0;        ///< mean square of the record
  double spectral_power = 0.0;    ///< same from the spectrum
};

LineSpectrum line_spectrum(const std::vector<double>& samples);

struct SweepFit {
  double iip3_dbm = 0.0;
  double gain_db = 0.0;
  double imd3_intercept = 0.0;  ///< C in p_imd3 = 3 pin + C
  double imd3_free_slope = 0.0; ///< unconstrained least-squares slope over the region
  double fund_free_slope = 0.0;
  std::vector<double> qualifying_pin;
};

/// Fixed slope-1 and slope-3 fits over the points whose fundamental is within
/// 0.1 dB of the small-signal gain and whose IMD3 clears the floor.
SweepFit fit_sweep(const std::vector<SpectrumResult>& sweep, double floor_margin_db = 20.0);

double extract_iip3(const std::vector<SpectrumResult>& sweep);
double gain_from_sweep(const std::vector<SpectrumResult>& sweep);

/// Two-tone spec for a design at center frequency `f_hz`: tones at
/// f_hz -/+ spacing/2, the design's sweep and |Z_out| = 2 pi f L2.
TwoToneSpec design_two_tone_spec(const LnaDesign& design, double f_hz);

}  // namespace mgtr
