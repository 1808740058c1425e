#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bilt/simharness.hpp"
#include "output.hpp"

namespace bilt::app {

/// Expands a simulation config document into one SimulationConfig per grid
/// point, in document order (first grid key outermost).
///
/// Document layout:
///   { "defaults": {settings}, "experiments": [ {"name": s, settings, "grid": {key: [values]}} ] }
/// Settings keys: n, n1, n2, p, model, delta, prop, block_size, kernel,
/// bandwidth, reps, level, seed, fixed_mu2.  A prop below 1 selects the
/// sparse sign-flip signal.  Errors name the offending field path.
std::vector<SimulationConfig> expand_configs(const Json& doc);

/// Reads and expands a config file.
std::vector<SimulationConfig> load_configs(const std::string& path);

/// Seed precedence: explicit flag, then the BILT_SEED environment variable,
/// then the value in the config.  Returns the override applied, if any.
std::optional<std::uint64_t> resolve_seed_override(std::optional<std::uint64_t> flag);

} // namespace bilt::app
