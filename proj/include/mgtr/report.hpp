#pragma once

// Design evaluation, MGTR vs single-gate comparison, parameter sweeps and
// CSV / JSON emission.

#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "mgtr/bias_network.hpp"
#include "mgtr/design.hpp"
#include "mgtr/mgtr_core.hpp"
#include "mgtr/twotone.hpp"

namespace mgtr {

inline constexpr const char* kToolVersion = "1.0.0";

struct FrequencyRow {
  double f_hz = 0.0;
  double gain_db = 0.0;
  double nf_db = 0.0;         ///< full parallel-device expression
  double nf_approx_db = 0.0;  ///< MT-only approximation
  double iip3_dbm_analytic = 0.0;
  double iip3_dbm_unnormalized = 0.0;
  double iip3_dbm_oracle = std::numeric_limits<double>::quiet_NaN();
  double gain_db_oracle = std::numeric_limits<double>::quiet_NaN();
  std::string error;  ///< non-empty when the row could not be completed
};

struct AnalyticPoint {
  double gain_db = 0.0;
  double nf_db = 0.0;
  double nf_approx_db = 0.0;
  Iip3Estimate iip3;
  double mt_eff = 0.0;
  double st_eff = 0.0;
  double gm_lt = 0.0;
};

/// Closed-form metrics of a solved design at center frequency `f_hz`.
AnalyticPoint analytic_point(const LnaDesign& design, const OperatingPoints& ops,
                             const CascodeOperatingPoint& cascode, double f_hz);

struct DesignReport {
  LnaDesign design;  ///< as analysed (sweet-spot sizing applied)
  std::vector<FrequencyRow> rows;
  OperatingPoints ops;
  CascodeOperatingPoint cascode;
  double power_w = 0.0;
  std::optional<CancellationResult> cancellation;
  std::vector<std::string> notes;
  std::vector<std::string> defaults_applied;
};

struct EvaluateOptions {
  bool sweet_spot = true;  ///< size the ST control transistor first (MGTR only)
  bool oracle = true;      ///< run the two-tone oracle per frequency
};

/// Bias solve, optional sweet-spot sizing, analytic metrics and the two-tone
/// oracle at each frequency. Row failures are recorded, not thrown; bias
/// failures of the design itself propagate.
DesignReport evaluate_design(const LnaDesign& design, const std::vector<double>& freqs_hz,
                             const EvaluateOptions& opts = {});

struct DeltaRow {
  double f_hz = 0.0;
  double d_iip3_analytic_db = 0.0;
  double d_iip3_oracle_db = 0.0;
  double d_nf_db = 0.0;
  double d_gain_db = 0.0;
};

struct CompareReport {
  DesignReport mgtr;
  DesignReport single;
  std::vector<DeltaRow> deltas;  ///< mgtr minus single
  std::vector<std::string> warnings;
};

CompareReport run_compare(const LnaDesign& mgtr, const LnaDesign& single,
                          const std::vector<double>& freqs_hz, const EvaluateOptions& opts = {});

/// Numeric fields reachable by `sweep`, as dotted config paths.
std::vector<std::string> sweep_paths();

struct SweepRow {
  double value = 0.0;
  FrequencyRow metrics;
  double power_w = 0.0;
  double gm2_sum = 0.0;  ///< composite gm2 at v_b
};

/// One row per value with the knob at `path` set to that value, evaluated at
/// the design's center frequency.
/// Throws ConfigError listing valid paths when `path` is unknown.
std::vector<SweepRow> sweep(const LnaDesign& design, const std::string& path,
                            const std::vector<double>& values, bool oracle = false);

// Emission ---------------------------------------------------------------

void write_frequency_csv(std::ostream& os, const std::vector<FrequencyRow>& rows);
void write_compare_csv(std::ostream& os, const CompareReport& r);
void write_sweep_csv(std::ostream& os, const std::string& path, const std::vector<SweepRow>& rows);
void write_gm2_csv(std::ostream& os, const std::vector<Gm2Row>& rows);
void write_twotone_csv(std::ostream& os, const std::vector<SpectrumResult>& rows);

/// "# "-prefixed config echo lines appended after a CSV table.
void write_csv_echo(std::ostream& os, const nlohmann::json& echo);

nlohmann::json to_json(const BranchOperatingPoint& op);
nlohmann::json to_json(const OperatingPoints& ops);
nlohmann::json to_json(const CancellationResult& r);
nlohmann::json to_json(const FrequencyRow& r);
nlohmann::json to_json(const DesignReport& r);
nlohmann::json to_json(const CompareReport& r);

/// Wraps `body` with the tool version and the config echo of `design`.
nlohmann::json with_provenance(nlohmann::json body, const LnaDesign& design,
                               const std::vector<std::string>& defaults_applied);

}  // namespace mgtr
