#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "boardgen/engine.hpp"
#include "boardgen/random.hpp"

namespace boardgen {

/// A game-playing controller. Implementations must return an element of
/// `legal`; they may keep parameters but no per-game state.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string_view name() const = 0;
  virtual Move chooseMove(const GameState& s, const RuleSet& r, std::span<const Move> legal, Rng& rng) const = 0;
};

/// Shuffles the legal moves; under mandatory capture the first capturing
/// move in shuffled order is taken, otherwise the head of the queue.
class RandomAgent final : public Agent {
 public:
  std::string_view name() const override { return "random"; }
  Move chooseMove(const GameState& s, const RuleSet& r, std::span<const Move> legal, Rng& rng) const override;
};

struct EvaluationWeights {
  std::array<double, kPieceTypes> weight{};  // indexed by type - 1
  double honorBonus = 50.0;

  double of(PieceType t) const { return weight.at(t - 1); }
  static EvaluationWeights fromRules(const RuleSet& r, double honorBonus = 50.0);
};

int directionCount(Movement m);

/// Own weighted material minus the opponent's, from `pov`'s side.
double evaluateBoard(const GameState& s, const RuleSet& r, Player pov);
double evaluateBoard(const GameState& s, const EvaluationWeights& w, Player pov);

/// Fixed-depth min-max over the rule-based evaluation. Depth 1 picks the
/// best immediate child; when every child scores the same, the move that
/// brings the moved piece closest (Chebyshev) to an opponent piece wins.
/// Remaining ties go to the lowest (from, to) pair.
class MinimaxAgent final : public Agent {
 public:
  explicit MinimaxAgent(int depth = 1) : depth_(depth) {}
  std::string_view name() const override { return "minimax"; }
  Move chooseMove(const GameState& s, const RuleSet& r, std::span<const Move> legal, Rng& rng) const override;
  int depth() const { return depth_; }

 private:
  int depth_;
};

/// The selection rule of MinimaxAgent given each move's search value and the
/// post-move distance of the moved piece to the nearest opponent. Remaining
/// ties go to the lowest (from, to, path) cells as seen from the mover's
/// side, so the agent plays the same way with either colour.
std::size_t selectMinimaxIndex(std::span<const Move> legal, std::span<const double> values,
                               std::span<const int> distances, Player mover = Player::One);

Move randomAgentMove(const GameState& s, const RuleSet& r, Rng& rng);
Move minimaxAgentMove(const GameState& s, const RuleSet& r, Rng& rng);

/// Chebyshev distance from `from` to the nearest piece owned by `enemy`,
/// or kBoardSize when there is none.
int distanceToNearest(const GameState& s, Square from, Player enemy);

std::unique_ptr<Agent> makeAgent(std::string_view kind);

}  // namespace boardgen
