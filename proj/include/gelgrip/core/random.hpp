#pragma once

#include <cstdint>
#include <random>

namespace gelgrip {

/// Seeded source passed explicitly to every generator; nothing global.
using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi);
double normal(Rng& rng, double mean, double sd);
int uniform_int(Rng& rng, int lo, int hi);  // inclusive

/// Independent stream derived from a base seed and a stream index.
Rng derive_rng(std::uint64_t seed, std::uint64_t stream);

}  // namespace gelgrip
