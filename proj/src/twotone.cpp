#include "mgtr/twotone.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <future>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>

#include "mgtr/bias_network.hpp"
#include "mgtr/errors.hpp"
#include "mgtr/units.hpp"

namespace mgtr {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

double level_dbm(double amp_a, double z_ohm, double r_ref) {
  return watts_to_dbm(available_power(amp_a * z_ohm, r_ref));
}

// Drain current about the operating point, as a function of the gate swing.
struct DeviceEval {
  MosfetParams mt, st;
  TerminalVoltages v_mt, v_st;
  double i0 = 0.0;
  bool st_on = false;
  double temperature_k = kDefaultTemperature;

  explicit DeviceEval(const LnaDesign& d) : mt(d.mt), st(d.st), temperature_k(d.temperature_k) {
    const OperatingPoints ops = solve_self_bias(d);
    v_mt = ops.mt.voltages;
    v_st = ops.st.voltages;
    st_on = ops.st_active;
    i0 = current(0.0);
  }

  double current(double v) const {
    double i = drain_current(mt, {v_mt.v_gs + v, v_mt.v_ds, v_mt.v_sb}, temperature_k);
    if (st_on) i += drain_current(st, {v_st.v_gs + v, v_st.v_ds, v_st.v_sb}, temperature_k);
    return i;
  }
};

}  // namespace

CoherentGrid coherent_grid(const TwoToneSpec& spec) {
  std::vector<std::string> issues;
  if (!(spec.f1 > 0) || !(spec.f2 > 0)) issues.push_back("two-tone: tone frequencies must be > 0");
  if (spec.f1 == spec.f2) issues.push_back("two-tone: f1 and f2 must differ");
  if (spec.cycles < 1) issues.push_back("two-tone: cycles must be >= 1");
  if (spec.samples_per_period < 8) issues.push_back("two-tone: samples_per_period must be >= 8");
  if (!(spec.r_ref > 0)) issues.push_back("two-tone: r_ref must be > 0");
  if (!issues.empty()) throw ConfigError(issues);

  const double lo = std::min(spec.f1, spec.f2), hi = std::max(spec.f1, spec.f2);
  const double bin = (hi - lo) / spec.cycles;
  CoherentGrid g;
  g.k1 = std::lround(lo / bin);
  g.k2 = g.k1 + spec.cycles;
  if (g.k1 < 1 || 2 * g.k1 <= g.k2) {
    throw ConfigError({"two-tone: tone spacing too wide for a coherent record (2 f1 - f2 must stay positive)"});
  }
  g.f1 = g.k1 * bin;
  g.f2 = g.k2 * bin;
  g.snap_hz = std::max(std::abs(g.f1 - lo), std::abs(g.f2 - hi));
  if (g.snap_hz > spec.max_snap_hz) {
    std::ostringstream os;
    os << "two-tone: snapping onto the coherent grid moves a tone by " << g.snap_hz
       << " Hz, above the " << spec.max_snap_hz << " Hz tolerance";
    throw ConfigError({os.str()});
  }
  if (spec.f1 > spec.f2) {
    std::swap(g.f1, g.f2);
    std::swap(g.k1, g.k2);
  }
  const long k_top = 2 * std::max(g.k1, g.k2) - std::min(g.k1, g.k2);
  g.n_samples = static_cast<long>(spec.samples_per_period) * k_top;
  g.sample_rate = g.n_samples * bin;
  return g;
}

std::vector<double> two_tone_waveform(const TwoToneSpec& spec, const CoherentGrid& grid,
                                      double pin_dbm) {
  const double a = amplitude_for_available_power(dbm_to_watts(pin_dbm), spec.r_ref);
  const long n = grid.n_samples;
  std::vector<double> v(n);
  for (long t = 0; t < n; ++t) {
    // Reduce the phase index exactly before scaling so long records keep
    // full precision.
    const double p1 = static_cast<double>((grid.k1 * t) % n) / n;
    const double p2 = static_cast<double>((grid.k2 * t) % n) / n;
    v[t] = a * (std::cos(kTwoPi * p1) + std::cos(kTwoPi * p2));
  }
  std::visit(
      [&](const auto& nl) {
        using T = std::decay_t<decltype(nl)>;
        if constexpr (std::is_same_v<T, PolynomialNonlinearity>) {
          for (auto& x : v) x = x * (nl.a1 + x * (nl.a2 + x * nl.a3));
        } else {
          const DeviceEval dev(nl.design);
          for (auto& x : v) x = dev.current(x) - dev.i0;
        }
      },
      spec.nonlinearity);
  return v;
}

LineSpectrum line_spectrum(const std::vector<double>& samples) {
  const int n = static_cast<int>(samples.size());
  const int m = n / 2 + 1;
  std::vector<double> in(samples);
  fftw_complex* out = fftw_alloc_complex(m);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(n, in.data(), out, FFTW_ESTIMATE);
  }
  fftw_execute(plan);

  LineSpectrum s;
  s.amplitude.resize(m);
  long double spec_power = 0;
  for (int k = 0; k < m; ++k) {
    const double mag = std::hypot(out[k][0], out[k][1]);
    const bool edge = k == 0 || (n % 2 == 0 && k == n / 2);
    s.amplitude[k] = (edge ? 1.0 : 2.0) * mag / n;
    const long double p = static_cast<long double>(mag) * mag / (static_cast<long double>(n) * n);
    spec_power += edge ? p : 2 * p;
  }
  long double time_power = 0;
  for (double x : samples) time_power += static_cast<long double>(x) * x;
  s.time_power = static_cast<double>(time_power / n);
  s.spectral_power = static_cast<double>(spec_power);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(out);
  return s;
}

namespace {

SpectrumResult analyse(const TwoToneSpec& spec, const CoherentGrid& g, double pin_dbm) {
  const auto samples = two_tone_waveform(spec, g, pin_dbm);
  const LineSpectrum ls = line_spectrum(samples);

  // Every product of the two tones sits on a multiple of gcd(k1, k2); the
  // remaining bins hold only rounding noise.
  const long step = std::gcd(g.k1, g.k2);
  double floor_amp = 0.0;
  for (std::size_t k = 1; k < ls.amplitude.size(); ++k)
    if (static_cast<long>(k) % step != 0) floor_amp = std::max(floor_amp, ls.amplitude[k]);
  floor_amp = std::max(floor_amp, std::numeric_limits<double>::denorm_min());

  const double z = spec.transimpedance_ohm;
  SpectrumResult r;
  r.pin_dbm = pin_dbm;
  r.numeric_floor = level_dbm(floor_amp, z, spec.r_ref);
  auto line = [&](long k) { return std::max(level_dbm(ls.amplitude[k], z, spec.r_ref), r.numeric_floor); };
  const long lo = std::min(g.k1, g.k2), hi = std::max(g.k1, g.k2);
  r.amp_fund = ls.amplitude[g.k1];
  r.amp_imd3_lo = ls.amplitude[2 * lo - hi];
  r.p_fund = line(g.k1);
  r.p_fund_hi = line(g.k2);
  r.p_imd3_lo = line(2 * lo - hi);
  r.p_imd3_hi = line(2 * hi - lo);
  r.imd3_dbc = r.p_imd3_lo - r.p_fund;
  r.parseval_residual = ls.time_power > 0
                            ? std::abs(ls.time_power - ls.spectral_power) / ls.time_power
                            : std::abs(ls.spectral_power);
  return r;
}

}  // namespace

std::vector<SpectrumResult> simulate_two_tone(const TwoToneSpec& spec) {
  const CoherentGrid g = coherent_grid(spec);
  std::vector<std::future<SpectrumResult>> jobs;
  jobs.reserve(spec.pin_dbm_sweep.size());
  for (double p : spec.pin_dbm_sweep)
    jobs.push_back(std::async(std::launch::async, [&spec, &g, p] { return analyse(spec, g, p); }));
  std::vector<SpectrumResult> out;
  out.reserve(jobs.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

namespace {

double free_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  return sxx > 0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

SweepFit fit_sweep(const std::vector<SpectrumResult>& sweep, double floor_margin_db) {
  if (sweep.empty()) throw SweepRangeError("sweep range unusable: no sweep points");
  std::vector<const SpectrumResult*> pts;
  for (const auto& s : sweep) pts.push_back(&s);
  std::sort(pts.begin(), pts.end(), [](auto a, auto b) { return a->pin_dbm < b->pin_dbm; });
  const double g0 = pts.front()->p_fund - pts.front()->pin_dbm;

  SweepFit fit;
  std::vector<double> x, yf, yi;
  int compressed = 0, floored = 0;
  for (const auto* s : pts) {
    const bool linear = std::abs(s->p_fund - s->pin_dbm - g0) < 0.1;
    const bool visible = s->p_imd3_lo > s->numeric_floor + floor_margin_db;
    if (!linear) ++compressed;
    if (!visible) ++floored;
    if (linear && visible) {
      x.push_back(s->pin_dbm);
      yf.push_back(s->p_fund);
      yi.push_back(s->p_imd3_lo);
    }
  }
  if (x.size() < 4) {
    std::ostringstream os;
    os << "sweep range unusable: " << x.size() << " qualifying points (need 4); " << compressed
       << " compressed, " << floored << " IMD3 at the numeric floor, over pin "
       << pts.front()->pin_dbm << " .. " << pts.back()->pin_dbm << " dBm";
    throw SweepRangeError(os.str());
  }
  double g = 0, c = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    g += yf[k] - x[k];
    c += yi[k] - 3.0 * x[k];
  }
  g /= x.size();
  c /= x.size();
  fit.gain_db = g;
  fit.imd3_intercept = c;
  fit.iip3_dbm = 0.5 * (g - c);
  fit.imd3_free_slope = free_slope(x, yi);
  fit.fund_free_slope = free_slope(x, yf);
  fit.qualifying_pin = x;
  return fit;
}

double extract_iip3(const std::vector<SpectrumResult>& sweep) { return fit_sweep(sweep).iip3_dbm; }

double gain_from_sweep(const std::vector<SpectrumResult>& sweep) {
  if (sweep.empty()) throw SweepRangeError("sweep range unusable: no sweep points");
  std::vector<const SpectrumResult*> pts;
  for (const auto& s : sweep) pts.push_back(&s);
  std::sort(pts.begin(), pts.end(), [](auto a, auto b) { return a->pin_dbm < b->pin_dbm; });
  const double g0 = pts.front()->p_fund - pts.front()->pin_dbm;
  double sum = 0;
  int n = 0;
  for (const auto* s : pts) {
    const double gk = s->p_fund - s->pin_dbm;
    if (std::abs(gk - g0) < 0.1) {
      sum += gk;
      ++n;
    }
  }
  return sum / n;
}

TwoToneSpec design_two_tone_spec(const LnaDesign& design, double f_hz) {
  TwoToneSpec s;
  s.f1 = f_hz - 0.5 * design.analysis.tone_spacing_hz;
  s.f2 = f_hz + 0.5 * design.analysis.tone_spacing_hz;
  s.pin_dbm_sweep = design.analysis.pin_dbm.empty() ? default_pin_sweep() : design.analysis.pin_dbm;
  s.r_ref = design.r_s;
  s.transimpedance_ohm = kTwoPi * f_hz * design.l2_h;
  s.nonlinearity = FullDeviceNonlinearity{design};
  return s;
}

}  // namespace mgtr
