#pragma once

// JSON design documents. Physical fields carry their unit in the key name
// (vdd_v, l2_nh, w_um, ...). Unknown keys are rejected and every violation
// in a document is reported together.

#include <string>
#include <vector>

#include "json.hpp"

#include "mgtr/design.hpp"

namespace mgtr {

struct LoadedDesign {
  LnaDesign design;
  std::vector<std::string> defaults_applied;  ///< dotted paths filled from defaults
};

/// Throws ConfigError with every schema and invariant violation.
LoadedDesign load_design(const nlohmann::json& doc);
LoadedDesign load_design_file(const std::string& path);

/// Complete document for `design`; load_design(emit(d)).design == d.
nlohmann::json emit(const LnaDesign& design);

}  // namespace mgtr
