#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "boardgen/agents.hpp"
#include "boardgen/engine.hpp"
#include "boardgen/playout.hpp"
#include "boardgen/random.hpp"

namespace boardgen {

inline constexpr std::array<int, 5> kAnnLayers{64, 91, 40, 10, 1};
inline constexpr double kAnnWeightBound = 2.0;

using BoardInput = std::array<double, kCells>;

/// Fully connected tanh network 64-91-40-10-1. Parameters are stored flat,
/// layer by layer: the weight matrix (row-major, one row per output neuron)
/// followed by the bias vector.
class AnnController {
 public:
  AnnController();  // all parameters zero
  explicit AnnController(std::vector<double> parameters);

  static std::size_t parameterCount();
  /// Parameters uniform in [-scale, scale].
  static AnnController random(Rng& rng, double scale = 0.2);

  std::span<const double> parameters() const { return params_; }
  std::span<double> parameters() { return params_; }

  double forward(const BoardInput& input) const;

  /// Adds N(0, sigma) to every parameter, then clamps to [-2, 2].
  void mutate(Rng& rng, double sigma);

  /// Text dump: a header line with the layer sizes, then one parameter per line.
  std::string dump() const;
  static AnnController load(const std::string& text);

  friend bool operator==(const AnnController&, const AnnController&) = default;

 private:
  std::vector<double> params_;
};

/// Own piece of type t -> +t/6, opponent piece -> -t/6, empty -> 0. The
/// board is read from `pov`'s side: for player Two the 180-degree rotated
/// board, so both players see their home rows first.
BoardInput encodeBoard(const std::array<std::optional<Piece>, kCells>& board, Player pov);

double annForward(const AnnController& a, const GameState& s, Player pov);

/// Picks the child position the network likes best for the side to move;
/// ties go to the first move in generation order.
class AnnAgent final : public Agent {
 public:
  explicit AnnAgent(const AnnController& net) : net_(&net) {}
  std::string_view name() const override { return "ann"; }
  Move chooseMove(const GameState& s, const RuleSet& r, std::span<const Move> legal, Rng& rng) const override;

 private:
  const AnnController* net_;
};

struct CoevolutionConfig {
  int population = 20;
  int opponents = 5;
  double sigma = 0.1;
  int maxIterations = 300;
  /// Seeds the first generation; remaining slots are drawn at random.
  std::vector<AnnController> initialPopulation;
};

struct CoevolutionIteration {
  int iteration = 0;
  int bestRoundRobinScore = 0;
  int bestDefeated = 0;  // opponents the best individual beat in the round robin
  double meanScore = 0.0;
};

struct LearnabilityResult {
  int iterations = 0;
  bool capped = false;
  std::vector<CoevolutionIteration> trace;
};

/// Score of a single game from the viewpoint of one side: win +1, draw 0,
/// loss -2.
int coevolutionScore(const MatchRecord& rec, Player side);

/// Result of a two-game pairing with colours swapped, seen from `a`.
struct PairingResult {
  int wins = 0;
  int losses = 0;
  int score = 0;
  bool beats() const { return wins > losses; }
};
PairingResult playPairing(const RuleSet& r, const AnnController& a, const AnnController& b);

/// Coevolves a population of networks on `r` until the best individual of
/// an iteration beats every other member in a round robin; returns that
/// iteration (1-based) or the cap with `capped` set.
LearnabilityResult coevolveLearnability(const RuleSet& r, const CoevolutionConfig& config, std::uint64_t seed);

}  // namespace boardgen
