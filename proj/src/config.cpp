#include "mgtr/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mgtr/errors.hpp"

namespace mgtr {

using nlohmann::json;

namespace {

// A numeric key with its unit scale to SI.
struct NumKey {
  const char* key;
  const char* stem;  // name without the unit suffix; empty for dimensionless keys
  double scale;
};

constexpr NumKey kCardKeys[] = {
    {"vt0_v", "vt0", 1.0},          {"kp_ua_per_v2", "kp", 1e-6},
    {"w_um", "w", 1e-6},            {"l_um", "l", 1e-6},
    {"gamma_body_sqrt_v", "gamma_body", 1.0}, {"phi2b_v", "phi2b", 1.0},
    {"n_slope", "", 1.0},           {"cgs_ff", "cgs", 1e-15},
    {"cgd_ff", "cgd", 1e-15},       {"gamma_noise", "", 1.0},
};

double& card_field(MosfetParams& p, const std::string& key) {
  if (key == "vt0_v") return p.v_t0;
  if (key == "kp_ua_per_v2") return p.k_prime;
  if (key == "w_um") return p.w;
  if (key == "l_um") return p.l;
  if (key == "gamma_body_sqrt_v") return p.gamma_body;
  if (key == "phi2b_v") return p.phi2b;
  if (key == "n_slope") return p.n_slope;
  if (key == "cgs_ff") return p.c_gs;
  if (key == "cgd_ff") return p.c_gd;
  return p.gamma_noise;
}

// Decimal value whose product with `scale` reproduces `si` bitwise when one
// exists nearby; otherwise the closest candidate.
double to_unit(double si, double scale) {
  if (scale == 1.0 || si == 0.0 || !std::isfinite(si)) return si;
  const double guess = si / scale;
  for (int digits = 6; digits <= 16; ++digits) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*g", digits, guess);
    const double c = std::strtod(buf, nullptr);
    if (c * scale == si) return c;
  }
  double best = guess;
  double best_err = std::abs(guess * scale - si);
  double up = guess, down = guess;
  for (int k = 0; k < 64 && best_err != 0.0; ++k) {
    up = std::nextafter(up, INFINITY);
    down = std::nextafter(down, -INFINITY);
    for (double c : {up, down}) {
      const double e = std::abs(c * scale - si);
      if (e < best_err) {
        best = c;
        best_err = e;
      }
    }
  }
  return best;
}

class Reader {
 public:
  std::vector<std::string> issues;
  std::vector<std::string> defaults;

  // Checks that `obj` at `path` is an object with only `allowed` keys.
  // `stems` maps a unit stem to its expected key for suffix diagnostics.
  bool object(const json& obj, const std::string& path, const std::set<std::string>& allowed,
              const std::map<std::string, std::string>& stems = {}) {
    if (!obj.is_object()) {
      issues.push_back(path + ": expected an object");
      return false;
    }
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      const std::string& k = it.key();
      if (allowed.count(k)) continue;
      bool mismatch = false;
      for (const auto& [stem, expected] : stems) {
        if (k.size() > stem.size() + 1 && k.compare(0, stem.size() + 1, stem + "_") == 0) {
          issues.push_back(join(path, k) + ": unit suffix mismatch, expected '" + expected + "'");
          mismatch = true;
          break;
        }
      }
      if (!mismatch) issues.push_back(join(path, k) + ": unknown key");
    }
    return true;
  }

  void number(const json& obj, const std::string& path, const std::string& key, double scale,
              double& out, bool required) {
    const std::string p = join(path, key);
    if (!obj.is_object() || !obj.contains(key)) {
      if (required) {
        issues.push_back(p + ": required field missing");
      } else {
        defaults.push_back(p);
      }
      return;
    }
    const json& v = obj.at(key);
    if (!v.is_number()) {
      issues.push_back(p + ": expected a number");
      return;
    }
    out = v.get<double>() * scale;
  }

  void integer(const json& obj, const std::string& path, const std::string& key, int& out) {
    const std::string p = join(path, key);
    if (!obj.contains(key)) {
      defaults.push_back(p);
      return;
    }
    const json& v = obj.at(key);
    if (!v.is_number_integer()) {
      issues.push_back(p + ": expected an integer");
      return;
    }
    out = v.get<int>();
  }

  void number_list(const json& obj, const std::string& path, const std::string& key, double scale,
                   std::vector<double>& out) {
    const std::string p = join(path, key);
    if (!obj.contains(key)) {
      defaults.push_back(p);
      return;
    }
    const json& v = obj.at(key);
    if (!v.is_array()) {
      issues.push_back(p + ": expected a list of numbers");
      return;
    }
    std::vector<double> vals;
    for (const auto& e : v) {
      if (!e.is_number()) {
        issues.push_back(p + ": expected a list of numbers");
        return;
      }
      vals.push_back(e.get<double>() * scale);
    }
    out = std::move(vals);
  }

  template <typename Enum>
  void choice(const json& obj, const std::string& path, const std::string& key,
              const std::map<std::string, Enum>& options, Enum& out) {
    const std::string p = join(path, key);
    if (!obj.contains(key)) {
      defaults.push_back(p);
      return;
    }
    const json& v = obj.at(key);
    if (v.is_string()) {
      auto it = options.find(v.get<std::string>());
      if (it != options.end()) {
        out = it->second;
        return;
      }
    }
    std::string names;
    for (const auto& [name, value] : options) names += (names.empty() ? "" : ", ") + name;
    issues.push_back(p + ": expected one of " + names);
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }
};

std::set<std::string> card_keys(bool with_tie) {
  std::set<std::string> s{"polarity", "current_law"};
  for (const auto& k : kCardKeys) s.insert(k.key);
  if (with_tie) s.insert("bulk_tie");
  return s;
}

std::map<std::string, std::string> card_stems() {
  std::map<std::string, std::string> m;
  for (const auto& k : kCardKeys)
    if (*k.stem) m[k.stem] = k.key;
  return m;
}

const std::map<std::string, Polarity> kPolarity{{"nmos", Polarity::nmos}, {"pmos", Polarity::pmos}};
const std::map<std::string, CurrentLaw> kLaw{{"charge_sheet", CurrentLaw::charge_sheet},
                                             {"linear_test", CurrentLaw::linear_test}};
const std::map<std::string, BulkTie> kTie{{"source", BulkTie::source}, {"vss", BulkTie::vss}};
const std::map<std::string, Mode> kMode{{"mgtr", Mode::mgtr}, {"single", Mode::single_gate}};

void read_card(Reader& r, const json& devs, const std::string& name, MosfetParams& card,
               BulkTie* tie, bool geometry_required) {
  const std::string path = "devices." + name;
  if (!devs.is_object() || !devs.contains(name)) {
    if (geometry_required) {
      r.issues.push_back(path + ".w_um: required field missing");
      r.issues.push_back(path + ".l_um: required field missing");
    } else {
      r.defaults.push_back(path);
    }
    return;
  }
  const json& c = devs.at(name);
  if (!r.object(c, path, card_keys(tie != nullptr), card_stems())) return;
  r.choice(c, path, "polarity", kPolarity, card.polarity);
  r.choice(c, path, "current_law", kLaw, card.law);
  for (const auto& k : kCardKeys) {
    const bool req = geometry_required && (std::string(k.key) == "w_um" || std::string(k.key) == "l_um");
    r.number(c, path, k.key, k.scale, card_field(card, k.key), req);
  }
  if (tie) r.choice(c, path, "bulk_tie", kTie, *tie);
}

json emit_card(const MosfetParams& p, const BulkTie* tie) {
  json c;
  c["polarity"] = to_string(p.polarity);
  c["current_law"] = p.law == CurrentLaw::charge_sheet ? "charge_sheet" : "linear_test";
  MosfetParams copy = p;
  for (const auto& k : kCardKeys) c[k.key] = to_unit(card_field(copy, k.key), k.scale);
  if (tie) c["bulk_tie"] = to_string(*tie);
  return c;
}

}  // namespace

LoadedDesign load_design(const json& doc) {
  Reader r;
  const std::set<std::string> top{"label", "mode", "devices", "passives", "bias", "env", "analysis"};
  if (!r.object(doc, "", top)) throw ConfigError(r.issues);

  Mode mode = Mode::mgtr;
  r.choice(doc, "", "mode", kMode, mode);
  LnaDesign d = default_design(mode);
  d.mode = mode;
  if (doc.contains("label")) {
    if (doc["label"].is_string()) {
      d.label = doc["label"].get<std::string>();
    } else {
      r.issues.push_back("label: expected a string");
    }
  } else {
    r.defaults.push_back("label");
  }

  const json empty = json::object();
  auto section = [&](const char* name, const std::set<std::string>& keys,
                     const std::map<std::string, std::string>& stems) -> const json& {
    if (!doc.contains(name)) return empty;
    const json& s = doc.at(name);
    return r.object(s, name, keys, stems) ? s : empty;
  };

  const json& devs = section("devices", {"mt", "st", "lt", "ct_mt", "ct_st"}, {});
  if (!doc.contains("devices")) r.issues.push_back("devices: required section missing");
  read_card(r, devs, "mt", d.mt, nullptr, true);
  read_card(r, devs, "st", d.st, nullptr, false);
  read_card(r, devs, "lt", d.lt, nullptr, false);
  read_card(r, devs, "ct_mt", d.bias.ct_mt.card, &d.bias.ct_mt.bulk_tie, false);
  read_card(r, devs, "ct_st", d.bias.ct_st.card, &d.bias.ct_st.bulk_tie, false);

  const json& pas = section("passives", {"l1_nh", "l2_nh"}, {{"l1", "l1_nh"}, {"l2", "l2_nh"}});
  r.number(pas, "passives", "l1_nh", 1e-9, d.l1_h, false);
  r.number(pas, "passives", "l2_nh", 1e-9, d.l2_h, false);

  const json& bias = section("bias", {"vdd_v", "vb_v", "vctrl_v", "vcas_v"},
                             {{"vdd", "vdd_v"}, {"vb", "vb_v"}, {"vctrl", "vctrl_v"}, {"vcas", "vcas_v"}});
  r.number(bias, "bias", "vdd_v", 1.0, d.bias.v_dd, true);
  r.number(bias, "bias", "vb_v", 1.0, d.bias.v_b, true);
  r.number(bias, "bias", "vctrl_v", 1.0, d.bias.v_ctrl, false);
  r.number(bias, "bias", "vcas_v", 1.0, d.bias.v_cas, false);

  const json& env = section("env", {"rs_ohm", "temp_k"}, {{"rs", "rs_ohm"}, {"temp", "temp_k"}});
  r.number(env, "env", "rs_ohm", 1.0, d.r_s, false);
  r.number(env, "env", "temp_k", 1.0, d.temperature_k, false);

  auto& a = d.analysis;
  const json& an = section("analysis",
                           {"f_center_ghz", "tone_spacing_mhz", "pin_dbm", "freqs_ghz", "window_mv",
                            "window_points", "bias_max_iter", "search", "free_knobs"},
                           {{"f_center", "f_center_ghz"}, {"tone_spacing", "tone_spacing_mhz"},
                            {"pin", "pin_dbm"}, {"freqs", "freqs_ghz"}, {"window", "window_mv"}});
  r.number(an, "analysis", "f_center_ghz", 1e9, a.f_center_hz, false);
  r.number(an, "analysis", "tone_spacing_mhz", 1e6, a.tone_spacing_hz, false);
  r.number_list(an, "analysis", "pin_dbm", 1.0, a.pin_dbm);
  r.number_list(an, "analysis", "freqs_ghz", 1e9, a.freqs_hz);
  r.number(an, "analysis", "window_mv", 1e-3, a.window_half_width_v, false);
  r.integer(an, "analysis", "window_points", a.window_points);
  r.integer(an, "analysis", "bias_max_iter", a.bias_max_iter);
  if (an.contains("search")) {
    const json& s = an.at("search");
    if (r.object(s, "analysis.search", {"ct_mt_wl_min", "ct_mt_wl_max", "ct_st_wl_min", "ct_st_wl_max"})) {
      r.number(s, "analysis.search", "ct_mt_wl_min", 1.0, a.search.ct_mt_min, false);
      r.number(s, "analysis.search", "ct_mt_wl_max", 1.0, a.search.ct_mt_max, false);
      r.number(s, "analysis.search", "ct_st_wl_min", 1.0, a.search.ct_st_min, false);
      r.number(s, "analysis.search", "ct_st_wl_max", 1.0, a.search.ct_st_max, false);
    }
  } else {
    r.defaults.push_back("analysis.search");
  }
  if (an.contains("free_knobs")) {
    const json& k = an.at("free_knobs");
    a.free_ct_mt = a.free_ct_st = false;
    bool ok = k.is_array();
    if (ok) {
      for (const auto& e : k) {
        if (e == "ct_mt") a.free_ct_mt = true;
        else if (e == "ct_st") a.free_ct_st = true;
        else ok = false;
      }
    }
    if (!ok) r.issues.push_back("analysis.free_knobs: expected a list drawn from \"ct_mt\", \"ct_st\"");
  } else {
    r.defaults.push_back("analysis.free_knobs");
  }

  if (r.issues.empty()) {
    try {
      d.validate();
    } catch (const ConfigError& e) {
      r.issues.insert(r.issues.end(), e.issues().begin(), e.issues().end());
    }
  }
  if (!r.issues.empty()) throw ConfigError(r.issues);
  return {d, r.defaults};
}

LoadedDesign load_design_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError({"'" + path + "' is not valid JSON: " + e.what()});
  }
  return load_design(doc);
}

json emit(const LnaDesign& d) {
  json doc;
  doc["label"] = d.label;
  doc["mode"] = to_string(d.mode);
  doc["devices"]["mt"] = emit_card(d.mt, nullptr);
  doc["devices"]["st"] = emit_card(d.st, nullptr);
  doc["devices"]["lt"] = emit_card(d.lt, nullptr);
  doc["devices"]["ct_mt"] = emit_card(d.bias.ct_mt.card, &d.bias.ct_mt.bulk_tie);
  doc["devices"]["ct_st"] = emit_card(d.bias.ct_st.card, &d.bias.ct_st.bulk_tie);
  doc["passives"] = {{"l1_nh", to_unit(d.l1_h, 1e-9)}, {"l2_nh", to_unit(d.l2_h, 1e-9)}};
  doc["bias"] = {{"vdd_v", d.bias.v_dd}, {"vb_v", d.bias.v_b}, {"vctrl_v", d.bias.v_ctrl},
                 {"vcas_v", d.bias.v_cas}};
  doc["env"] = {{"rs_ohm", d.r_s}, {"temp_k", d.temperature_k}};
  const auto& a = d.analysis;
  json an;
  an["f_center_ghz"] = to_unit(a.f_center_hz, 1e9);
  an["tone_spacing_mhz"] = to_unit(a.tone_spacing_hz, 1e6);
  an["pin_dbm"] = a.pin_dbm;
  json freqs = json::array();
  for (double f : a.freqs_hz) freqs.push_back(to_unit(f, 1e9));
  an["freqs_ghz"] = freqs;
  an["window_mv"] = to_unit(a.window_half_width_v, 1e-3);
  an["window_points"] = a.window_points;
  an["bias_max_iter"] = a.bias_max_iter;
  an["search"] = {{"ct_mt_wl_min", a.search.ct_mt_min}, {"ct_mt_wl_max", a.search.ct_mt_max},
                  {"ct_st_wl_min", a.search.ct_st_min}, {"ct_st_wl_max", a.search.ct_st_max}};
  json knobs = json::array();
  if (a.free_ct_mt) knobs.push_back("ct_mt");
  if (a.free_ct_st) knobs.push_back("ct_st");
  an["free_knobs"] = knobs;
  doc["analysis"] = an;
  return doc;
}

}  // namespace mgtr
