// Command-line front end: operating points, derivative curves, sweet-spot
// search, closed-form metrics, two-tone oracle, comparison and sweeps.
//
// Exit codes: 0 success, 2 configuration or validation error, 3 numerical
// non-convergence.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mgtr/config.hpp"
#include "mgtr/errors.hpp"
#include "mgtr/report.hpp"

using namespace mgtr;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct Globals {
  std::string config;
  std::string out;
  std::string format = "csv";
  std::string mode;
};

struct Context {
  LnaDesign design;
  std::vector<std::string> defaults;
};

Context load(const Globals& g) {
  LoadedDesign l = load_design_file(g.config);
  if (g.mode == "mgtr") l.design.mode = Mode::mgtr;
  if (g.mode == "single") l.design.mode = Mode::single_gate;
  l.design.validate();
  return {l.design, l.defaults_applied};
}

std::vector<double> frequencies(const LnaDesign& d, const std::vector<double>& ghz) {
  if (!ghz.empty()) {
    std::vector<double> f;
    for (double x : ghz) f.push_back(x * 1e9);
    return f;
  }
  if (!d.analysis.freqs_hz.empty()) return d.analysis.freqs_hz;
  return {d.analysis.f_center_hz};
}

// Writes either the CSV table (with the config echo appended) or the JSON
// summary to --out or stdout.
void emit_output(const Globals& g, const Context& ctx, const std::function<void(std::ostream&)>& csv,
                 const json& summary) {
  std::ofstream file;
  if (!g.out.empty()) {
    file.open(g.out);
    if (!file) throw ConfigError({"cannot write '" + g.out + "'"});
  }
  std::ostream& os = g.out.empty() ? std::cout : file;
  if (g.format == "json") {
    os << with_provenance(summary, ctx.design, ctx.defaults).dump(2) << '\n';
  } else {
    csv(os);
    json echo{{"tool_version", kToolVersion},
              {"config_echo", emit(ctx.design)},
              {"defaults_applied", ctx.defaults}};
    write_csv_echo(os, echo);
  }
}

EvaluateOptions eval_opts(bool no_search, bool oracle) { return {!no_search, oracle}; }

void write_selected(std::ostream& os, const std::vector<FrequencyRow>& rows, const std::string& which) {
  auto num = [](double x) {
    std::ostringstream s;
    s << std::setprecision(12) << x;
    return s.str();
  };
  if (which == "iip3") os << "f_hz,iip3_dbm,iip3_dbm_unnormalized,error\n";
  if (which == "nf") os << "f_hz,nf_db,nf_approx_db,error\n";
  if (which == "gain") os << "f_hz,gain_db,error\n";
  for (const auto& r : rows) {
    os << num(r.f_hz) << ',';
    if (which == "iip3") os << num(r.iip3_dbm_analytic) << ',' << num(r.iip3_dbm_unnormalized);
    if (which == "nf") os << num(r.nf_db) << ',' << num(r.nf_approx_db);
    if (which == "gain") os << num(r.gain_db);
    os << ',' << r.error << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MGTR low-noise amplifier analysis"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "design document (JSON)")->required();
  app.add_option("--out", g.out, "output file (default stdout)");
  app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--mode", g.mode, "override the design mode")->check(CLI::IsMember({"mgtr", "single"}));

  auto* op = app.add_subcommand("op", "solve the self-biasing network");

  auto* derivs = app.add_subcommand("derivs", "current and gm, gm', gm'' versus v_gs for one device");
  std::string device = "mt";
  double vgs_from = -0.3, vgs_to = 0.6, vds = 1.0;
  int points = 91;
  derivs->add_option("--device", device)->check(CLI::IsMember({"mt", "st", "lt"}));
  derivs->add_option("--from", vgs_from, "start, V relative to v_th");
  derivs->add_option("--to", vgs_to, "end, V relative to v_th");
  derivs->add_option("--points", points)->check(CLI::Range(2, 100000));
  derivs->add_option("--vds", vds, "drain-source voltage magnitude, V");

  auto* sweetspot = app.add_subcommand("sweetspot", "size the CTs for gm'' cancellation");

  std::vector<double> freqs_ghz;
  bool no_search = false;
  auto* iip3 = app.add_subcommand("iip3", "closed-form IIP3 per frequency");
  auto* nf = app.add_subcommand("nf", "noise figure per frequency");
  auto* gain = app.add_subcommand("gain", "voltage gain per frequency");
  for (auto* sc : {iip3, nf, gain}) {
    sc->add_option("--freq-ghz", freqs_ghz, "frequencies (default: analysis.freqs_ghz)");
    sc->add_flag("--no-search", no_search, "use the configured CT sizing as is");
  }

  auto* twotone = app.add_subcommand("twotone", "two-tone oracle sweep at one frequency");
  double f_ghz = 0.0;
  twotone->add_option("--freq-ghz", f_ghz, "center frequency (default: analysis.f_center_ghz)");
  twotone->add_flag("--no-search", no_search, "use the configured CT sizing as is");

  auto* compare = app.add_subcommand("compare", "MGTR versus single-gate comparison");
  std::string single_config;
  compare->add_option("--single-config", single_config, "single-gate design (default: the same document in single mode)");
  compare->add_option("--freq-ghz", freqs_ghz, "frequencies (default: analysis.freqs_ghz)");
  bool no_oracle = false;
  compare->add_flag("--no-oracle", no_oracle, "skip the two-tone oracle");

  auto* sweep_cmd = app.add_subcommand("sweep", "sweep one numeric config field");
  std::string path;
  std::vector<double> values;
  bool with_oracle = false;
  sweep_cmd->add_option("--path", path, "dotted config path, e.g. devices.ct_st.w_um")->required();
  sweep_cmd->add_option("--values", values, "values in the field's own unit")->delimiter(',');
  sweep_cmd->add_flag("--oracle", with_oracle, "also run the two-tone oracle per row");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    const Context ctx = load(g);
    const LnaDesign& d = ctx.design;

    if (*op) {
      const OperatingPoints ops = solve_self_bias(d);
      const CascodeOperatingPoint cas = solve_cascode(d, ops.mt.i_d + (ops.st_active ? ops.st.i_d : 0.0));
      const double p = compute_power(d, ops);
      json j{{"operating_points", to_json(ops)},
             {"cascode", {{"id_a", cas.i_d}, {"vgs_v", cas.voltages.v_gs}, {"gate_v", cas.v_gate},
                          {"gm_s", cas.series.gm}, {"saturated", cas.saturated}}},
             {"power_w", p}};
      emit_output(g, ctx, [&](std::ostream& os) {
        os << "device,vgs_v,vds_v,vsource_v,id_a,r_ct_ohm,gm_s,gm1_a_per_v2,gm2_a_per_v3,iterations\n";
        auto row = [&](const BranchOperatingPoint& b) {
          os << to_string(b.device) << ',' << b.voltages.v_gs << ',' << b.voltages.v_ds << ','
             << b.v_source << ',' << b.i_d << ',' << b.r_ct << ',' << b.series.gm << ','
             << b.series.gm1 << ',' << b.series.gm2 << ',' << b.iterations << '\n';
        };
        os << std::setprecision(12);
        row(ops.mt);
        if (ops.st_active) row(ops.st);
        os << "# power_w," << p << '\n';
      }, j);
    } else if (*derivs) {
      const MosfetParams& card = device == "mt" ? d.mt : device == "st" ? d.st : d.lt;
      json rows = json::array();
      std::ostringstream csv;
      csv << std::setprecision(12) << "vgs_v,id_a,gm_s,gm1_a_per_v2,gm2_a_per_v3\n";
      for (int k = 0; k < points; ++k) {
        const double v = card.v_t0 + vgs_from + (vgs_to - vgs_from) * k / (points - 1);
        const PowerSeries s = transconductance_series(card, {v, vds, 0.0}, d.temperature_k);
        csv << v << ',' << s.i_dc << ',' << s.gm << ',' << s.gm1 << ',' << s.gm2 << '\n';
        rows.push_back({{"vgs_v", v}, {"id_a", s.i_dc}, {"gm_s", s.gm}, {"gm1", s.gm1}, {"gm2", s.gm2}});
      }
      emit_output(g, ctx, [&](std::ostream& os) { os << csv.str(); }, json{{"device", device}, {"rows", rows}});
    } else if (*sweetspot) {
      const Window w = default_window(d);
      const CancellationResult r = find_sweet_spot(d, w, {d.analysis.free_ct_mt, d.analysis.free_ct_st});
      const auto profile = gm2_profile(apply_cancellation(d, r), w.grid());
      json prof = json::array();
      for (const auto& row : profile)
        prof.push_back({{"v_b", row.v_b}, {"gm2_mt", row.gm2_mt}, {"gm2_st", row.gm2_st}, {"gm2_sum", row.gm2_sum}});
      emit_output(g, ctx, [&](std::ostream& os) {
        write_gm2_csv(os, profile);
        os << "# ct_mt_wl," << r.ct_mt_wl << "\n# ct_st_wl," << r.ct_st_wl << "\n# residual_a_per_v3,"
           << r.residual << "\n# baseline_a_per_v3," << r.baseline << '\n';
      }, json{{"cancellation", to_json(r)}, {"profile", prof}});
    } else if (*iip3 || *nf || *gain) {
      const std::string which = *iip3 ? "iip3" : *nf ? "nf" : "gain";
      const DesignReport rep = evaluate_design(d, frequencies(d, freqs_ghz), eval_opts(no_search, false));
      emit_output(g, ctx, [&](std::ostream& os) { write_selected(os, rep.rows, which); }, to_json(rep));
    } else if (*twotone) {
      LnaDesign dd = d;
      if (!no_search && dd.st_active() && (dd.analysis.free_ct_mt || dd.analysis.free_ct_st))
        dd = apply_cancellation(dd, find_sweet_spot(dd, default_window(dd), {dd.analysis.free_ct_mt, dd.analysis.free_ct_st}));
      const double f = f_ghz > 0 ? f_ghz * 1e9 : d.analysis.f_center_hz;
      const auto sweep_rows = simulate_two_tone(design_two_tone_spec(dd, f));
      json summary{{"f_hz", f}};
      try {
        const SweepFit fit = fit_sweep(sweep_rows);
        summary["iip3_dbm"] = fit.iip3_dbm;
        summary["gain_db"] = fit.gain_db;
        summary["imd3_slope_db_per_db"] = fit.imd3_free_slope;
        summary["fund_slope_db_per_db"] = fit.fund_free_slope;
        summary["qualifying_pin_dbm"] = fit.qualifying_pin;
      } catch (const SweepRangeError& e) {
        summary["error"] = e.what();
      }
      emit_output(g, ctx, [&](std::ostream& os) {
        write_twotone_csv(os, sweep_rows);
        if (summary.contains("iip3_dbm")) os << "# iip3_dbm," << summary["iip3_dbm"].get<double>() << "\n# gain_db," << summary["gain_db"].get<double>() << '\n';
      }, summary);
    } else if (*compare) {
      LnaDesign mg = d;
      mg.mode = Mode::mgtr;
      LnaDesign sg = d;
      if (!single_config.empty()) sg = load_design_file(single_config).design;
      sg.mode = Mode::single_gate;
      const CompareReport r = run_compare(mg, sg, frequencies(d, freqs_ghz), {true, !no_oracle});
      for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
      emit_output(g, ctx, [&](std::ostream& os) { write_compare_csv(os, r); }, to_json(r));
    } else if (*sweep_cmd) {
      const auto rows = sweep(d, path, values, with_oracle);
      json jr = json::array();
      for (const auto& r : rows) jr.push_back({{"value", r.value}, {"metrics", to_json(r.metrics)}, {"power_w", r.power_w}, {"gm2_sum", r.gm2_sum}});
      emit_output(g, ctx, [&](std::ostream& os) { write_sweep_csv(os, path, rows); }, json{{"path", path}, {"rows", jr}});
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NotInTriodeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SweepRangeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: non-convergence in branch " << e.branch() << ": " << e.what() << '\n';
    return kExitNumeric;
  } catch (const NoFeasibleCancellation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const SingularityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return 0;
}
