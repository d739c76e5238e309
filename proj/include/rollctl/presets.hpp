#pragma once

#include <string>
#include <vector>

#include "rollctl/sim.hpp"

namespace rollctl {

/// Names of the bundled scenarios; presets/<name>.cfg holds the same setup.
std::vector<std::string> preset_names();

/// Builds a bundled scenario in code. Throws Error for an unknown name.
ScenarioConfig make_preset(const std::string& name);

}  // namespace rollctl
