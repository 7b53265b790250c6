#include <cmath>
#include <string>

#include "gelgrip/core/error.hpp"
#include "gelgrip/sim/fruit.hpp"

namespace gelgrip::sim {

std::string_view to_string(FruitType t) {
  switch (t) {
    case FruitType::kCherryTomato: return "cherry_tomato";
    case FruitType::kStrawberry: return "strawberry";
    case FruitType::kRaspberry: return "raspberry";
  }
  return "?";
}

FruitType fruit_type_from_string(std::string_view s) {
  if (s == "cherry_tomato" || s == "tomato") return FruitType::kCherryTomato;
  if (s == "strawberry") return FruitType::kStrawberry;
  if (s == "raspberry") return FruitType::kRaspberry;
  throw Error("unknown fruit type '" + std::string(s) + "'");
}

void FruitModel::validate() const {
  if (!(diameter_mm > 0.0)) throw Error("fruit diameter must be positive");
  if (!(stiffness_n_per_mm > 0.0)) throw Error("fruit stiffness must be positive");
  if (!(friction > 0.0)) throw Error("fruit friction must be positive");
  if (detachment_force_n < 0.0 || bruise_force_n < 0.0) {
    throw Error("fruit forces must be non-negative");
  }
  if (!(stem_stiffness > 0.0)) throw Error("stem stiffness must be positive");
}

bool FruitModel::harvestable() const {
  return detachment_force_n > 0.0 && detachment_force_n < bruise_force_n;
}

FruitSurface fruit_surface(FruitType type, double radius_mm, std::uint64_t texture_seed) {
  FruitSurface f;
  f.radius_mm = radius_mm;
  f.texture_seed = texture_seed;
  switch (type) {
    case FruitType::kCherryTomato:
      break;  // smooth skin
    case FruitType::kStrawberry:
      // raised seeds
      f.bump_density_per_mm2 = 0.25;
      f.bump_amplitude_mm = 0.10;
      f.bump_radius_mm = 0.45;
      break;
    case FruitType::kRaspberry:
      // drupelets
      f.bump_density_per_mm2 = 0.45;
      f.bump_amplitude_mm = 0.12;
      f.bump_radius_mm = 0.5;
      break;
  }
  return f;
}

double replica_stiffness(double shore00) {
  if (!(shore00 > 0.0)) throw Error("Shore 00 hardness must be positive");
  return 0.05 * std::exp(0.05 * shore00);
}

FruitModel silicone_replica(FruitType type, double shore00) {
  FruitModel m;
  m.type = type;
  switch (type) {
    case FruitType::kCherryTomato: m.diameter_mm = 28.3; break;
    case FruitType::kStrawberry: m.diameter_mm = 30.0; break;
    case FruitType::kRaspberry: m.diameter_mm = 22.0; break;
  }
  m.stiffness_n_per_mm = replica_stiffness(shore00);
  m.shore00 = shore00;
  return m;
}

}  // namespace gelgrip::sim
