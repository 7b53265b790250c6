#pragma once

#include "gelgrip/core/types.hpp"

namespace gelgrip::force {

/// Scatters per-marker displacement (after - before, matched by id) onto the
/// nodes of `grid` by inverse-distance weighting over the 4 nearest markers
/// with power 2. A node sitting on a marker takes that marker's value.
/// Throws when fewer than 3 ids match.
DisplacementField interpolate_markers(const MarkerSet& before, const MarkerSet& after,
                                      const GridGeometry& grid);

}  // namespace gelgrip::force
