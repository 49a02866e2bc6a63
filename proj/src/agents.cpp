#include "boardgen/agents.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <vector>

namespace boardgen {

namespace {

void requireMoves(std::span<const Move> legal) {
  if (legal.empty()) throw std::logic_error("agent asked to move with no legal moves");
}

bool lowerCells(const Move& a, const Move& b, Player mover) {
  auto frame = [&](Square q) { return mover == Player::One ? q : q.rotated(); };
  if (a.from != b.from) return frame(a.from) < frame(b.from);
  if (a.to != b.to) return frame(a.to) < frame(b.to);
  // Chains sharing both ends: compare the cells entered.
  return std::lexicographical_compare(a.path.begin(), a.path.end(), b.path.begin(), b.path.end(),
                                      [&](Square x, Square y) { return frame(x) < frame(y); });
}

// Min-max value of `s` from `pov`'s side, `depth` plies remaining.
double search(const GameState& s, const RuleSet& r, const EvaluationWeights& w, Player pov, int depth) {
  if (depth <= 0 || s.ply >= kMaxPlies) return evaluateBoard(s, w, pov);
  const auto moves = legalMoves(s, r);
  if (moves.empty()) return evaluateBoard(s, w, pov);
  const bool maximizing = s.sideToMove == pov;
  double best = maximizing ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
  for (const auto& m : moves) {
    GameState child = s;
    advance(child, m);
    const double v = search(child, r, w, pov, depth - 1);
    best = maximizing ? std::max(best, v) : std::min(best, v);
  }
  return best;
}

}  // namespace

Move RandomAgent::chooseMove(const GameState&, const RuleSet& r, std::span<const Move> legal, Rng& rng) const {
  requireMoves(legal);
  std::vector<const Move*> queue;
  queue.reserve(legal.size());
  for (const auto& m : legal) queue.push_back(&m);
  std::shuffle(queue.begin(), queue.end(), rng);
  if (r.mandatoryCapture) {
    auto it = std::find_if(queue.begin(), queue.end(), [](const Move* m) { return m->isCapture(); });
    if (it != queue.end()) return **it;
  }
  return *queue.front();
}

int directionCount(Movement m) { return static_cast<int>(directions(m, Player::One).size()); }

EvaluationWeights EvaluationWeights::fromRules(const RuleSet& r, double honorBonus) {
  EvaluationWeights w;
  w.honorBonus = honorBonus;
  for (int t = 1; t <= kPieceTypes; ++t) {
    const auto& rules = r.rules(static_cast<PieceType>(t));
    double v = directionCount(rules.movement) * (rules.step == StepSize::Multiple ? 2.0 : 1.0);
    if (r.pieceOfHonor == t) v += honorBonus;
    w.weight[t - 1] = v;
  }
  return w;
}

double evaluateBoard(const GameState& s, const EvaluationWeights& w, Player pov) {
  double total = 0.0;
  for (const auto& cell : s.board) {
    if (!cell) continue;
    total += cell->owner == pov ? w.of(cell->type) : -w.of(cell->type);
  }
  return total;
}

double evaluateBoard(const GameState& s, const RuleSet& r, Player pov) {
  return evaluateBoard(s, EvaluationWeights::fromRules(r), pov);
}

int distanceToNearest(const GameState& s, Square from, Player enemy) {
  int best = kBoardSize;
  for (int i = 0; i < kCells; ++i) {
    const auto& cell = s.board[i];
    if (!cell || cell->owner != enemy) continue;
    const Square sq{i};
    best = std::min(best, std::max(std::abs(sq.row() - from.row()), std::abs(sq.col() - from.col())));
  }
  return best;
}

std::size_t selectMinimaxIndex(std::span<const Move> legal, std::span<const double> values,
                               std::span<const int> distances, Player mover) {
  requireMoves(legal);
  if (values.size() != legal.size() || distances.size() != legal.size())
    throw std::invalid_argument("selectMinimaxIndex: one value and one distance per move");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const bool flat = *lo == *hi;
  std::size_t best = 0;
  for (std::size_t i = 1; i < legal.size(); ++i) {
    bool better;
    if (flat) {
      better = distances[i] < distances[best] ||
               (distances[i] == distances[best] && lowerCells(legal[i], legal[best], mover));
    } else {
      better = values[i] > values[best] || (values[i] == values[best] && lowerCells(legal[i], legal[best], mover));
    }
    if (better) best = i;
  }
  return best;
}

Move MinimaxAgent::chooseMove(const GameState& s, const RuleSet& r, std::span<const Move> legal, Rng&) const {
  requireMoves(legal);
  const Player me = s.sideToMove;
  const auto weights = EvaluationWeights::fromRules(r);

  std::vector<double> values;
  std::vector<int> distances;
  values.reserve(legal.size());
  distances.reserve(legal.size());
  for (const auto& m : legal) {
    GameState child = s;
    advance(child, m);
    values.push_back(search(child, r, weights, me, depth_ - 1));
    distances.push_back(distanceToNearest(child, m.to, opponent(me)));
  }

  return legal[selectMinimaxIndex(legal, values, distances, me)];
}

Move randomAgentMove(const GameState& s, const RuleSet& r, Rng& rng) {
  const auto legal = legalMoves(s, r);
  return RandomAgent{}.chooseMove(s, r, legal, rng);
}

Move minimaxAgentMove(const GameState& s, const RuleSet& r, Rng& rng) {
  const auto legal = legalMoves(s, r);
  return MinimaxAgent{}.chooseMove(s, r, legal, rng);
}

std::unique_ptr<Agent> makeAgent(std::string_view kind) {
  if (kind == "random") return std::make_unique<RandomAgent>();
  if (kind == "minimax") return std::make_unique<MinimaxAgent>();
  throw std::invalid_argument("unknown agent kind '" + std::string{kind} + "'");
}

}  // namespace boardgen
