#pragma once

#include <string>

#include "waiterplan/planner.hpp"

namespace waiterplan {

/// Thrown for malformed scenario files; message carries line/column or the
/// offending key path.
struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Load and validate a versioned JSON scenario. sigma_m / sigma_M may be
/// given as "estimate", in which case they are sampled here (deterministic
/// for the configured seed).
Scenario load_scenario(const std::string& path);
Scenario load_scenario_text(const std::string& text,
                            const std::string& origin = "<string>");

}  // namespace waiterplan
