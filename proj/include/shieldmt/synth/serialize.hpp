#pragma once

#include "json.hpp"
#include "shieldmt/synth/game.hpp"

namespace shieldmt {

nlohmann::ordered_json to_json(const WinningRegion& wr);
nlohmann::ordered_json to_json(const Controller& c);

// Readers validate shape and indices and throw SpecError on bad input.
// The controller reader doubles as the import hook for controllers
// produced by other synthesis backends.
WinningRegion wr_from_json(const nlohmann::json& j);
Controller controller_from_json(const nlohmann::json& j);

}  // namespace shieldmt
