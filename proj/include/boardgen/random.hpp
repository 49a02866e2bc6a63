#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace boardgen {

using Rng = std::mt19937_64;

/// Mixes a root seed with a component label so that each pipeline stage
/// draws from its own reproducible stream. The label is hashed with FNV-1a
/// and combined with the seed through one splitmix64 round.
std::uint64_t deriveSeed(std::uint64_t root, std::string_view label);

/// deriveSeed with an integer suffix appended to the label ("label/index").
std::uint64_t deriveSeed(std::uint64_t root, std::string_view label, std::uint64_t index);

inline Rng makeRng(std::uint64_t root, std::string_view label) { return Rng{deriveSeed(root, label)}; }

}  // namespace boardgen
