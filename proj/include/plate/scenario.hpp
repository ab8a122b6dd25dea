#pragma once

#include <string>

#include "plate/primal.hpp"

namespace plate::scenario {

/// Smooth clamped bump (value and normal slope vanish on the boundary),
/// scaled so its maximum equals `amp`.
ScalarField bump(const Grid& g, double amp);

/// Transverse-load target: w is a bump, membrane displacements zero.
PrimalState small_load(const Grid& g, double w_amp);

/// In-plane compression target: u_a push the material toward the center so
/// the membrane stress is negative definite over most of the domain, plus a
/// small transverse bump.  Displacements are projected off the checkerboard
/// flat directions so Newton recovery is unique.
PrimalState compressive(const Grid& g, double c, double w_amp);

/// Flat strongly compressed target (w = 0): the transverse load vanishes,
/// leaving pure membrane compression.
PrimalState flat_compressed(const Grid& g, double c);

/// Build a named target; throws ConfigError for unknown names.
PrimalState make_target(const std::string& name, const Grid& g, double c,
                        double w_amp);

}  // namespace plate::scenario
