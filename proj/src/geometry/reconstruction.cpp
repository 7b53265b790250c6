#include "gelgrip/geometry/reconstruction.hpp"

#include "gelgrip/core/error.hpp"

namespace gelgrip::geometry {

double reconstruction_error(const HeightMap& predicted, const HeightMap& truth) {
  if (predicted.width() != truth.width() || predicted.height() != truth.height()) {
    throw Error("heightmaps differ in shape");
  }
  const Grid a = predicted.values().array() - predicted.min();
  const Grid b = truth.values().array() - truth.min();
  return (a - b).squaredNorm() / static_cast<double>(a.size());
}

HeightMap reconstruct_heightmap(const DiffFrame& diff, const Rgb2NormalModel& model,
                                const HeightIntegrator& integrator) {
  return integrator.integrate(predict_normals(diff, model), diff.px_per_mm());
}

}  // namespace gelgrip::geometry
