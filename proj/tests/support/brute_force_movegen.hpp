#pragma once

#include <string>
#include <vector>

#include "boardgen/engine.hpp"
#include "boardgen/random.hpp"

namespace boardgen::testing {

/// Naive per-cell, per-direction move enumerator used as an oracle for
/// legalMoves. It shares only the data types with the engine. Each move is
/// returned in a canonical text form; the result is sorted.
std::vector<std::string> bruteForceMoves(const GameState& s, const RuleSet& r);

/// Canonical text of engine moves, sorted, comparable with bruteForceMoves.
std::vector<std::string> canonical(const std::vector<Move>& moves);

/// Random piece soup: each cell occupied with a random density in
/// [0.05, 0.6), owners and types uniform, random side to move.
GameState randomPosition(Rng& rng);

}  // namespace boardgen::testing
