#include "mgtr/design.hpp"

#include <cmath>
#include <sstream>

#include "mgtr/errors.hpp"

namespace mgtr {

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
  std::ostringstream os;
  os << "invalid configuration";
  for (const auto& s : issues) os << "\n  - " << s;
  return os.str();
}

void check_card(const MosfetParams& p, const std::string& name, std::vector<std::string>& out) {
  try {
    p.validate();
  } catch (const DomainError& e) {
    out.push_back(name + ": " + e.what());
  }
}

// Cards are built from micrometre values the same way a config document is
// read, so the shipped design and its JSON form agree bitwise.
MosfetParams card(Polarity pol, double w_um, double l_um) {
  MosfetParams p;
  p.polarity = pol;
  p.k_prime = 200.0 * 1e-6;
  p.w = w_um * 1e-6;
  p.l = l_um * 1e-6;
  p.c_gs = 100.0 * 1e-15;
  p.c_gd = 20.0 * 1e-15;
  return p;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

void LnaDesign::validate() const {
  std::vector<std::string> issues;
  check_card(mt, "devices.mt", issues);
  if (mode == Mode::mgtr && st.w != 0) check_card(st, "devices.st", issues);
  if (mode == Mode::mgtr && st.w < 0) issues.push_back("devices.st: w must be >= 0");
  check_card(lt, "devices.lt", issues);
  check_card(bias.ct_mt.card, "devices.ct_mt", issues);
  if (st_active()) check_card(bias.ct_st.card, "devices.ct_st", issues);

  if (!(bias.v_dd > 0)) issues.push_back("bias.vdd_v: must be > 0");
  if (!(bias.v_b > 0 && bias.v_b < bias.v_dd)) issues.push_back("bias.vb_v: must satisfy 0 < vb < vdd");
  if (!(bias.v_cas >= 0 && bias.v_cas < bias.v_dd)) issues.push_back("bias.vcas_v: must satisfy 0 <= vcas < vdd");
  if (!std::isfinite(bias.v_ctrl)) issues.push_back("bias.vctrl_v: must be finite");
  if (!(l1_h >= 0)) issues.push_back("passives.l1_nh: must be >= 0");
  if (!(l2_h >= 0)) issues.push_back("passives.l2_nh: must be >= 0");
  if (!(r_s > 0)) issues.push_back("env.rs_ohm: must be > 0");
  if (!(temperature_k > 0)) issues.push_back("env.temp_k: must be > 0");

  const auto& a = analysis;
  if (!(a.f_center_hz > 0)) issues.push_back("analysis.f_center_ghz: must be > 0");
  if (!(a.tone_spacing_hz > 0)) issues.push_back("analysis.tone_spacing_mhz: must be > 0");
  if (!(a.tone_spacing_hz < a.f_center_hz)) issues.push_back("analysis.tone_spacing_mhz: must be below the center frequency");
  for (double f : a.freqs_hz)
    if (!(f > a.tone_spacing_hz)) { issues.push_back("analysis.freqs_ghz: every frequency must exceed the tone spacing"); break; }
  if (!(a.window_half_width_v >= 0)) issues.push_back("analysis.window_mv: must be >= 0");
  if (a.window_points < 1) issues.push_back("analysis.window_points: must be >= 1");
  if (a.bias_max_iter < 1) issues.push_back("analysis.bias_max_iter: must be >= 1");
  const auto& b = a.search;
  if (!(b.ct_mt_min > 0 && b.ct_mt_min <= b.ct_mt_max)) issues.push_back("analysis.search: ct_mt bounds must satisfy 0 < min <= max");
  if (!(b.ct_st_min > 0 && b.ct_st_min <= b.ct_st_max)) issues.push_back("analysis.search: ct_st bounds must satisfy 0 < min <= max");
  if (!issues.empty()) throw ConfigError(std::move(issues));
}

std::vector<double> default_pin_sweep() {
  std::vector<double> v;
  for (int p = -40; p <= -10; ++p) v.push_back(p);
  return v;
}

std::vector<double> default_band() { return {0.9e9, 1.2e9, 1.5e9, 1.8e9, 2.1e9, 2.4e9}; }

LnaDesign default_design(Mode mode) {
  LnaDesign d;
  d.label = mode == Mode::mgtr ? "mgtr-default" : "single-gate-default";
  d.mode = mode;
  // Values from tools/tune_defaults.
  d.mt = card(Polarity::pmos, 10.0, 0.1);
  d.st = card(Polarity::pmos, 2.5, 0.1);
  d.lt = card(Polarity::pmos, 400.0, 0.1);
  d.lt.c_gs = 0.0;
  d.lt.c_gd = 0.0;
  d.bias.v_dd = 2.0;
  d.bias.v_b = 0.4;
  d.bias.v_ctrl = 3.0;
  d.bias.v_cas = 0.6;
  d.bias.ct_mt = {card(Polarity::nmos, 1000.0, 1.0), BulkTie::source};
  d.bias.ct_st = {card(Polarity::nmos, 0.00801894, 1.0), BulkTie::vss};
  d.l1_h = 0.0;
  d.l2_h = 15.66 * 1e-9;
  d.analysis.pin_dbm = default_pin_sweep();
  d.analysis.freqs_hz = default_band();
  return d;
}

void set_ct_ratio(ControlTransistor& ct, double ratio) {
  if (!(ratio > 0)) throw DomainError("set_ct_ratio: ratio must be > 0");
  ct.card.w = ratio * ct.card.l;
}

double ct_ratio(const ControlTransistor& ct) { return ct.card.aspect(); }

const char* to_string(Mode m) { return m == Mode::mgtr ? "mgtr" : "single"; }
const char* to_string(BulkTie t) { return t == BulkTie::source ? "source" : "vss"; }
const char* to_string(Polarity p) { return p == Polarity::nmos ? "nmos" : "pmos"; }

}  // namespace mgtr
