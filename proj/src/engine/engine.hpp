#pragma once

#include <cstdint>

#include "engine/result.hpp"
#include "io/scenario.hpp"

namespace ufls {

// Fixed-step run. Each tick: schedule, loads, voltages, BESS controller,
// then every UFLS device against the frequency just computed. Identical
// (scenario, seed) inputs give bit-identical results.
// Throws SimulationError if any state becomes non-finite.
SimulationResult run(const ScenarioConfig& scenario, std::uint64_t seed);
inline SimulationResult run(const ScenarioConfig& scenario) { return run(scenario, scenario.seed); }

}  // namespace ufls
