#pragma once

#include "gelgrip/core/types.hpp"
#include "gelgrip/geometry/integrate.hpp"
#include "gelgrip/geometry/rgb2normal.hpp"

namespace gelgrip::geometry {

/// Mean squared difference (mm^2) after shifting each map so its minimum is 0.
double reconstruction_error(const HeightMap& predicted, const HeightMap& truth);

/// Difference frame -> predicted normals -> integrated heightmap.
HeightMap reconstruct_heightmap(const DiffFrame& diff, const Rgb2NormalModel& model,
                                const HeightIntegrator& integrator);

}  // namespace gelgrip::geometry
