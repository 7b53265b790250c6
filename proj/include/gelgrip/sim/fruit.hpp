#pragma once

#include <string>
#include <string_view>

#include "gelgrip/sim/gel.hpp"

namespace gelgrip::sim {

enum class FruitType { kCherryTomato, kStrawberry, kRaspberry };

std::string_view to_string(FruitType t);
FruitType fruit_type_from_string(std::string_view s);

/// Plant-side mechanics of one fruit.
struct FruitModel {
  FruitType type = FruitType::kCherryTomato;
  double diameter_mm = 28.3;
  double stiffness_n_per_mm = 0.8;   // contact force per mm of squeeze
  double detachment_force_n = 1.0;   // pull needed to break the stem
  double bruise_force_n = 4.0;       // grip force that damages the skin
  double friction = 0.6;             // finger/skin friction coefficient
  double stem_stiffness = 1.0;       // relative stem stiffness (scales pull ramp)
  double shore00 = 0.0;              // replica hardness tag, 0 when unknown

  double radius_mm() const { return 0.5 * diameter_mm; }
  /// Throws on non-positive dimensions or friction.
  void validate() const;
  /// 0 < detachment force < bruise force.
  bool harvestable() const;
};

/// Surface texture used when rendering contact with this fruit type.
FruitSurface fruit_surface(FruitType type, double radius_mm, std::uint64_t texture_seed);

/// Contact stiffness (N/mm) of a silicone replica of the given Shore 00 hardness.
double replica_stiffness(double shore00);

/// Silicone replica used in softness experiments.
FruitModel silicone_replica(FruitType type, double shore00);

}  // namespace gelgrip::sim
