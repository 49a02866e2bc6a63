#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "boardgen/agents.hpp"
#include "boardgen/engine.hpp"
#include "boardgen/genome.hpp"

namespace boardgen {

struct PieceTally {
  Player owner = Player::One;
  int cellChanges = 0;  // C_i
  int life = 0;         // plies until death, or game length for survivors

  friend bool operator==(const PieceTally&, const PieceTally&) = default;
};

/// Summary of one finished game, enough to recompute every metric.
struct MatchRecord {
  std::optional<Chromosome> chromosome;
  std::uint64_t seed = 0;
  std::string agentOne;
  std::string agentTwo;
  Status status;
  int plies = 0;
  std::vector<PieceTally> pieces;
  std::array<int, kCells> cellVisits{};

  std::optional<Player> winner() const {
    if (status.outcome != Outcome::Won) return std::nullopt;
    return status.winner;
  }
  int totalArrivals() const;

  /// One JSON object on a single line.
  std::string toJsonLine() const;
  static MatchRecord fromJsonLine(const std::string& line);

  friend bool operator==(const MatchRecord&, const MatchRecord&) = default;
};

/// Raised when an agent returns a move outside the legal set.
class PlayoutFault : public std::runtime_error {
 public:
  PlayoutFault(Player culprit, const std::string& what) : std::runtime_error(what), culprit_(culprit) {}
  Player culprit() const { return culprit_; }

 private:
  Player culprit_;
};

MatchRecord summarize(const GameState& finalState);

/// Plays from the initial position until the game ends; all randomness is
/// drawn from a generator seeded with `seed`.
MatchRecord playout(const RuleSet& r, const Agent& one, const Agent& two, std::uint64_t seed);

}  // namespace boardgen
