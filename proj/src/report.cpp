#include "mgtr/report.hpp"

#include <cmath>
#include <functional>
#include <future>
#include <iomanip>
#include <sstream>

#include "mgtr/config.hpp"
#include "mgtr/errors.hpp"
#include "mgtr/rf_analysis.hpp"
#include "mgtr/units.hpp"

namespace mgtr {

using nlohmann::json;

AnalyticPoint analytic_point(const LnaDesign& design, const OperatingPoints& ops,
                             const CascodeOperatingPoint& cascode, double f_hz) {
  const PowerSeries s = composite_series(ops.mt.series, ops.st.series);
  DeviceCaps caps{design.mt.c_gs, design.mt.c_gd};
  if (ops.st_active) {
    caps.c_gs += design.st.c_gs;
    caps.c_gd += design.st.c_gd;
  }
  ImpedanceEnv env;
  env.r_s = design.r_s;
  env.l1 = design.l1_h;
  env.l2 = design.l2_h;
  env.load = LoadKind::cascode;
  env.gm_lt = cascode.series.gm;

  AnalyticPoint p;
  p.gm_lt = env.gm_lt;
  const double half = 0.5 * design.analysis.tone_spacing_hz;
  p.iip3 = volterra_iip3(s, caps, env, f_hz - half, f_hz + half);
  p.gain_db = voltage_gain(s.gm, env.z_out(kTwoPi * f_hz));

  NoiseModel nm{design.temperature_k, design.mt.gamma_noise, design.r_s};
  p.mt_eff = effective_gm(ops.mt.series.gm, 1.0 / ops.mt.r_ct);
  std::optional<double> st_eff;
  if (ops.st_active) {
    p.st_eff = effective_gm(ops.st.series.gm, 1.0 / ops.st.r_ct);
    st_eff = p.st_eff;
  }
  p.nf_db = noise_figure_full(p.mt_eff, st_eff, p.gm_lt, nm);
  p.nf_approx_db = noise_figure_approx(p.mt_eff, nm);
  return p;
}

namespace {

FrequencyRow evaluate_row(const LnaDesign& d, const OperatingPoints& ops,
                          const CascodeOperatingPoint& cas, double f, bool oracle) {
  FrequencyRow row;
  row.f_hz = f;
  try {
    const AnalyticPoint p = analytic_point(d, ops, cas, f);
    row.gain_db = p.gain_db;
    row.nf_db = p.nf_db;
    row.nf_approx_db = p.nf_approx_db;
    row.iip3_dbm_analytic = p.iip3.dbm;
    row.iip3_dbm_unnormalized = p.iip3.dbm_unnormalized;
    if (oracle) {
      const SweepFit fit = fit_sweep(simulate_two_tone(design_two_tone_spec(d, f)));
      row.iip3_dbm_oracle = fit.iip3_dbm;
      row.gain_db_oracle = fit.gain_db;
    }
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

}  // namespace

DesignReport evaluate_design(const LnaDesign& design, const std::vector<double>& freqs_hz,
                             const EvaluateOptions& opts) {
  design.validate();
  DesignReport rep;
  LnaDesign d = design;
  if (opts.sweet_spot && d.st_active()) {
    Knobs knobs{d.analysis.free_ct_mt, d.analysis.free_ct_st};
    if (knobs.ct_mt || knobs.ct_st) {
      rep.cancellation = find_sweet_spot(d, default_window(d), knobs);
      d = apply_cancellation(d, *rep.cancellation);
      if (rep.cancellation->st_disabled) rep.notes.push_back("no ST sizing beat the MT-alone window maximum; ST disabled");
    }
  }
  rep.design = d;
  rep.ops = solve_self_bias(d);
  rep.cascode = solve_cascode(d, rep.ops.mt.i_d + (rep.ops.st_active ? rep.ops.st.i_d : 0.0));
  if (!rep.cascode.saturated) rep.notes.push_back("cascode LT is not saturated at the solved bias");
  rep.power_w = compute_power(d, rep.ops);
  rep.notes.push_back("difference-frequency impedances reuse Z1 and Z2 evaluated at 2w");
  rep.notes.push_back("cascode gate rail set to vcas - vgs(LT) so the LT source sits at vcas");

  // The oracle already runs its power points concurrently.
  for (double f : freqs_hz) rep.rows.push_back(evaluate_row(d, rep.ops, rep.cascode, f, opts.oracle));
  return rep;
}

CompareReport run_compare(const LnaDesign& mgtr, const LnaDesign& single,
                          const std::vector<double>& freqs_hz, const EvaluateOptions& opts) {
  CompareReport c;
  c.mgtr = evaluate_design(mgtr, freqs_hz, opts);
  c.single = evaluate_design(single, freqs_hz, opts);

  const double fc = mgtr.analysis.f_center_hz;
  const CascodeOperatingPoint& cm = c.mgtr.cascode;
  const CascodeOperatingPoint& cs = c.single.cascode;
  const double g_m = analytic_point(c.mgtr.design, c.mgtr.ops, cm, fc).gain_db;
  const double g_s = analytic_point(c.single.design, c.single.ops, cs, fc).gain_db;
  if (std::abs(g_m - g_s) > 0.5) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << "gain mismatch at the center frequency: " << g_m
       << " dB vs " << g_s << " dB (limit 0.5 dB)";
    c.warnings.push_back(os.str());
  }
  for (std::size_t k = 0; k < freqs_hz.size(); ++k) {
    const FrequencyRow& a = c.mgtr.rows[k];
    const FrequencyRow& b = c.single.rows[k];
    DeltaRow d;
    d.f_hz = freqs_hz[k];
    d.d_iip3_analytic_db = a.iip3_dbm_analytic - b.iip3_dbm_analytic;
    d.d_iip3_oracle_db = a.iip3_dbm_oracle - b.iip3_dbm_oracle;
    d.d_nf_db = a.nf_db - b.nf_db;
    d.d_gain_db = a.gain_db - b.gain_db;
    c.deltas.push_back(d);
  }
  return c;
}

namespace {

void collect_paths(const json& j, const std::string& prefix, std::vector<std::string>& out) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string p = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it->is_object()) {
      collect_paths(*it, p, out);
    } else if (it->is_number() && it.key() != "window_points" && it.key() != "bias_max_iter") {
      out.push_back(p);
    }
  }
}

json* resolve(json& doc, const std::string& path) {
  json* cur = &doc;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (!cur->is_object() || !cur->contains(part)) return nullptr;
    cur = &(*cur)[part];
  }
  return cur->is_number() ? cur : nullptr;
}

}  // namespace

std::vector<std::string> sweep_paths() {
  std::vector<std::string> out;
  collect_paths(emit(default_design()), "", out);
  return out;
}

std::vector<SweepRow> sweep(const LnaDesign& design, const std::string& path,
                            const std::vector<double>& values, bool oracle) {
  json base = emit(design);
  const auto valid = sweep_paths();
  if (std::find(valid.begin(), valid.end(), path) == valid.end() || !resolve(base, path)) {
    std::vector<std::string> issues{"sweep: unknown knob path '" + path + "'; valid paths:"};
    for (const auto& p : valid) issues.push_back(p);
    throw ConfigError(issues);
  }
  std::vector<std::future<SweepRow>> jobs;
  for (double v : values) {
    jobs.push_back(std::async(std::launch::async, [&, v] {
      SweepRow row;
      row.value = v;
      json doc = base;
      *resolve(doc, path) = v;
      try {
        const LnaDesign d = load_design(doc).design;
        const OperatingPoints ops = solve_self_bias(d);
        const CascodeOperatingPoint cas =
            solve_cascode(d, ops.mt.i_d + (ops.st_active ? ops.st.i_d : 0.0));
        row.metrics = evaluate_row(d, ops, cas, d.analysis.f_center_hz, oracle);
        row.power_w = compute_power(d, ops);
        row.gm2_sum = composite_series(ops.mt.series, ops.st.series).gm2;
      } catch (const std::exception& e) {
        row.metrics.f_hz = std::numeric_limits<double>::quiet_NaN();
        row.metrics.error = e.what();
      }
      return row;
    }));
  }
  std::vector<SweepRow> rows;
  for (auto& j : jobs) rows.push_back(j.get());
  return rows;
}

// Emission ---------------------------------------------------------------

namespace {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c == '\n' ? ' ' : c;
  }
  return q + "\"";
}

json jnum(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? json("nan") : json(x > 0 ? "inf" : "-inf");
}

}  // namespace

void write_frequency_csv(std::ostream& os, const std::vector<FrequencyRow>& rows) {
  os << "f_hz,gain_db,nf_db,nf_approx_db,iip3_dbm,iip3_dbm_unnormalized,iip3_dbm_oracle,gain_db_oracle,error\n";
  for (const auto& r : rows) {
    os << num(r.f_hz) << ',' << num(r.gain_db) << ',' << num(r.nf_db) << ',' << num(r.nf_approx_db)
       << ',' << num(r.iip3_dbm_analytic) << ',' << num(r.iip3_dbm_unnormalized) << ','
       << num(r.iip3_dbm_oracle) << ',' << num(r.gain_db_oracle) << ',' << quote(r.error) << '\n';
  }
}

void write_compare_csv(std::ostream& os, const CompareReport& r) {
  os << "f_hz,iip3_mgtr_dbm,iip3_single_dbm,d_iip3_db,iip3_oracle_mgtr_dbm,iip3_oracle_single_dbm,"
        "d_iip3_oracle_db,gain_mgtr_db,gain_single_db,d_gain_db,nf_mgtr_db,nf_single_db,d_nf_db\n";
  for (std::size_t k = 0; k < r.deltas.size(); ++k) {
    const auto& a = r.mgtr.rows[k];
    const auto& b = r.single.rows[k];
    const auto& d = r.deltas[k];
    os << num(d.f_hz) << ',' << num(a.iip3_dbm_analytic) << ',' << num(b.iip3_dbm_analytic) << ','
       << num(d.d_iip3_analytic_db) << ',' << num(a.iip3_dbm_oracle) << ',' << num(b.iip3_dbm_oracle)
       << ',' << num(d.d_iip3_oracle_db) << ',' << num(a.gain_db) << ',' << num(b.gain_db) << ','
       << num(d.d_gain_db) << ',' << num(a.nf_db) << ',' << num(b.nf_db) << ',' << num(d.d_nf_db)
       << '\n';
  }
}

void write_sweep_csv(std::ostream& os, const std::string& path, const std::vector<SweepRow>& rows) {
  os << quote(path) << ",f_hz,gain_db,nf_db,nf_approx_db,iip3_dbm,iip3_dbm_unnormalized,"
        "iip3_dbm_oracle,power_w,gm2_sum,error\n";
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    os << num(r.value) << ',' << num(m.f_hz) << ',' << num(m.gain_db) << ',' << num(m.nf_db) << ','
       << num(m.nf_approx_db) << ',' << num(m.iip3_dbm_analytic) << ','
       << num(m.iip3_dbm_unnormalized) << ',' << num(m.iip3_dbm_oracle) << ',' << num(r.power_w)
       << ',' << num(r.gm2_sum) << ',' << quote(m.error) << '\n';
  }
}

void write_gm2_csv(std::ostream& os, const std::vector<Gm2Row>& rows) {
  os << "v_b,gm2_mt,gm2_st,gm2_sum,error\n";
  for (const auto& r : rows)
    os << num(r.v_b) << ',' << num(r.gm2_mt) << ',' << num(r.gm2_st) << ',' << num(r.gm2_sum) << ','
       << quote(r.error) << '\n';
}

void write_twotone_csv(std::ostream& os, const std::vector<SpectrumResult>& rows) {
  os << "pin_dbm,pout_fund_dbm,pout_imd3_dbm,imd3_dbc,pout_imd3_hi_dbm,numeric_floor_dbm,parseval_residual\n";
  for (const auto& r : rows)
    os << num(r.pin_dbm) << ',' << num(r.p_fund) << ',' << num(r.p_imd3_lo) << ',' << num(r.imd3_dbc)
       << ',' << num(r.p_imd3_hi) << ',' << num(r.numeric_floor) << ',' << num(r.parseval_residual)
       << '\n';
}

void write_csv_echo(std::ostream& os, const json& echo) {
  std::istringstream in(echo.dump(2));
  std::string line;
  while (std::getline(in, line)) os << "# " << line << '\n';
}

json to_json(const BranchOperatingPoint& op) {
  return {{"device", to_string(op.device)},
          {"vgs_v", op.voltages.v_gs},
          {"vds_v", op.voltages.v_ds},
          {"vsb_v", op.voltages.v_sb},
          {"vsource_v", op.v_source},
          {"id_a", op.i_d},
          {"r_ct_ohm", op.r_ct},
          {"gm_s", op.series.gm},
          {"gm1_a_per_v2", op.series.gm1},
          {"gm2_a_per_v3", op.series.gm2},
          {"a1", op.series.a1},
          {"a2", op.series.a2},
          {"a3", op.series.a3},
          {"iterations", op.iterations},
          {"bracketed", op.bracketed}};
}

json to_json(const OperatingPoints& ops) {
  json j{{"mt", to_json(ops.mt)}};
  j["st"] = ops.st_active ? to_json(ops.st) : json(nullptr);
  return j;
}

json to_json(const CancellationResult& r) {
  return {{"ct_mt_wl", r.ct_mt_wl},
          {"ct_st_wl", r.ct_st_wl},
          {"residual_a_per_v3", r.residual},
          {"baseline_a_per_v3", r.baseline},
          {"reduction", r.baseline > 0 ? r.residual / r.baseline : 0.0},
          {"window_v", {r.window.lo, r.window.hi}},
          {"window_points", r.window.points},
          {"st_disabled", r.st_disabled},
          {"evaluations", r.evaluations},
          {"diagnostics", r.diagnostics}};
}

json to_json(const FrequencyRow& r) {
  json j{{"f_hz", r.f_hz},
         {"gain_db", jnum(r.gain_db)},
         {"nf_db", jnum(r.nf_db)},
         {"nf_approx_db", jnum(r.nf_approx_db)},
         {"iip3_dbm", jnum(r.iip3_dbm_analytic)},
         {"iip3_dbm_unnormalized", jnum(r.iip3_dbm_unnormalized)},
         {"iip3_dbm_oracle", jnum(r.iip3_dbm_oracle)},
         {"gain_db_oracle", jnum(r.gain_db_oracle)}};
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

json to_json(const DesignReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) rows.push_back(to_json(row));
  json j{{"label", r.design.label},
         {"mode", to_string(r.design.mode)},
         {"rows", rows},
         {"operating_points", to_json(r.ops)},
         {"cascode",
          {{"id_a", r.cascode.i_d},
           {"vgs_v", r.cascode.voltages.v_gs},
           {"gate_v", r.cascode.v_gate},
           {"gm_s", r.cascode.series.gm},
           {"saturated", r.cascode.saturated}}},
         {"power_w", r.power_w},
         {"notes", r.notes}};
  j["cancellation"] = r.cancellation ? to_json(*r.cancellation) : json(nullptr);
  j["analysed_design"] = emit(r.design);
  return j;
}

json to_json(const CompareReport& r) {
  json deltas = json::array();
  for (const auto& d : r.deltas)
    deltas.push_back({{"f_hz", d.f_hz},
                      {"d_iip3_db", jnum(d.d_iip3_analytic_db)},
                      {"d_iip3_oracle_db", jnum(d.d_iip3_oracle_db)},
                      {"d_nf_db", jnum(d.d_nf_db)},
                      {"d_gain_db", jnum(d.d_gain_db)}});
  return {{"mgtr", to_json(r.mgtr)}, {"single", to_json(r.single)}, {"deltas", deltas},
          {"warnings", r.warnings}};
}

json with_provenance(json body, const LnaDesign& design,
                     const std::vector<std::string>& defaults_applied) {
  json j;
  j["tool_version"] = kToolVersion;
  j["config_echo"] = emit(design);
  j["defaults_applied"] = defaults_applied;
  j["result"] = std::move(body);
  return j;
}

}  // namespace mgtr
