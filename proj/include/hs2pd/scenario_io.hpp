#ifndef HS2PD_SCENARIO_IO_HPP
#define HS2PD_SCENARIO_IO_HPP

#include "hs2pd/engine.hpp"
#include "hs2pd/scenario.hpp"

#include <stdexcept>
#include <string>

namespace hs2pd {

// Thrown on malformed scenario files; message names the offending field.
struct ScenarioParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Per-agent goal override, used by the oracle harness's path instances.
struct PathGoal {
    int agent_id = 0;
    Position goal;
};

struct ScenarioFile {
    Scenario scenario;
    std::vector<PathGoal> goals; // optional `goals` section
};

// Parses the JSON scenario document. Unknown fields are rejected; task
// times honor an optional params.time_unit of "s" (default) or "min".
ScenarioFile load_scenario_text(const std::string& text, const std::string& name_hint = "");
ScenarioFile load_scenario_file(const std::string& path);

std::string save_scenario_text(const Scenario& s);

// Applies a `section.field=value` override (params only).
void apply_override(Scenario& s, const std::string& spec);

std::string metrics_to_json(const Metrics& m);

} // namespace hs2pd

#endif
