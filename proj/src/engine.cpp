#include "boardgen/engine.hpp"

#include <algorithm>
#include <cstdlib>

#include <fmt/format.h>

namespace boardgen {

namespace {

using Offset = std::array<int, 2>;
using Board = std::array<std::optional<Piece>, kCells>;

// Offsets as seen by player One; forward is +row.
constexpr std::array<Offset, 2> kDiagFwd{{{1, -1}, {1, 1}}};
constexpr std::array<Offset, 4> kDiagFwdBack{{{1, -1}, {1, 1}, {-1, -1}, {-1, 1}}};
constexpr std::array<Offset, 8> kAllDirs{{{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};
constexpr std::array<Offset, 8> kKnight{{{2, -1}, {2, 1}, {1, 2}, {-1, 2}, {-2, 1}, {-2, -1}, {-1, -2}, {1, -2}}};
constexpr std::array<Offset, 2> kStraightFwdBack{{{1, 0}, {-1, 0}}};
constexpr std::array<Offset, 1> kStraightFwd{{{1, 0}}};

template <std::size_t N>
constexpr std::array<Offset, N> flipped(const std::array<Offset, N>& in) {
  std::array<Offset, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = {-in[i][0], in[i][1]};
  return out;
}

constexpr auto kDiagFwdTwo = flipped(kDiagFwd);
constexpr auto kDiagFwdBackTwo = flipped(kDiagFwdBack);
constexpr auto kAllDirsTwo = flipped(kAllDirs);
constexpr auto kKnightTwo = flipped(kKnight);
constexpr auto kStraightFwdBackTwo = flipped(kStraightFwdBack);
constexpr auto kStraightFwdTwo = flipped(kStraightFwd);

int lastRow(Player p) { return p == Player::One ? kBoardSize - 1 : 0; }

bool isOpponent(const Board& b, Square s, Player mover) { return b[s.index()] && b[s.index()]->owner != mover; }

std::optional<PieceType> conversionAt(const RuleSet& r, PieceType type, Square to, Player mover) {
  if (to.row() != lastRow(mover)) return std::nullopt;
  return r.rules(type).conversion;
}

// One capturing hop of a step-over piece.
struct Hop {
  std::vector<Square> entered;
  std::vector<Square> captured;
  Square landing;
};

// Cells on the long leg of a knight move: the two cells stepped along the
// two-cell arm before turning.
std::array<Square, 2> longLeg(Square from, const Offset& d) {
  if (std::abs(d[0]) == 2) {
    const int step = d[0] / 2;
    return {Square::at(from.row() + step, from.col()), Square::at(from.row() + d[0], from.col())};
  }
  const int step = d[1] / 2;
  return {Square::at(from.row(), from.col() + step), Square::at(from.row(), from.col() + d[1])};
}

std::vector<Hop> hopsFrom(const Board& b, Square from, const Piece& piece, const PieceRules& rules) {
  std::vector<Hop> hops;
  const auto dirs = directions(rules.movement, piece.owner);
  if (rules.movement == Movement::LShape) {
    for (const auto& d : dirs) {
      const int r = from.row() + d[0];
      const int c = from.col() + d[1];
      if (!Square::onBoard(r, c)) continue;
      const Square to = Square::at(r, c);
      if (b[to.index()]) continue;
      Hop hop{{to}, {}, to};
      for (Square leg : longLeg(from, d))
        if (isOpponent(b, leg, piece.owner)) hop.captured.push_back(leg);
      if (!hop.captured.empty()) hops.push_back(std::move(hop));
    }
    return hops;
  }
  for (const auto& d : dirs) {
    std::vector<Square> slide;
    int r = from.row() + d[0];
    int c = from.col() + d[1];
    while (Square::onBoard(r, c) && !b[Square::at(r, c).index()]) {
      if (rules.step == StepSize::Single) break;
      slide.push_back(Square::at(r, c));
      r += d[0];
      c += d[1];
    }
    if (!Square::onBoard(r, c)) continue;
    const Square victim = Square::at(r, c);
    if (!isOpponent(b, victim, piece.owner)) continue;
    const int lr = r + d[0];
    const int lc = c + d[1];
    if (!Square::onBoard(lr, lc) || b[Square::at(lr, lc).index()]) continue;
    const Square landing = Square::at(lr, lc);
    slide.push_back(landing);
    hops.push_back({std::move(slide), {victim}, landing});
  }
  return hops;
}

// Depth-first extension of a jump chain; every maximal chain is emitted.
void extendChain(Board& b, const RuleSet& r, const Piece& piece, Square origin, Square at,
                 std::vector<Square>& path, std::vector<Square>& captures, std::vector<Move>& out) {
  const auto hops = hopsFrom(b, at, piece, r.rules(piece.type));
  if (hops.empty()) {
    out.push_back({origin, at, path, captures, conversionAt(r, piece.type, at, piece.owner)});
    return;
  }
  for (const auto& hop : hops) {
    std::vector<std::optional<Piece>> removed;
    for (Square v : hop.captured) {
      removed.push_back(b[v.index()]);
      b[v.index()].reset();
    }
    b[hop.landing.index()] = b[at.index()];
    b[at.index()].reset();
    path.insert(path.end(), hop.entered.begin(), hop.entered.end());
    captures.insert(captures.end(), hop.captured.begin(), hop.captured.end());

    extendChain(b, r, piece, origin, hop.landing, path, captures, out);

    captures.resize(captures.size() - hop.captured.size());
    path.resize(path.size() - hop.entered.size());
    b[at.index()] = b[hop.landing.index()];
    b[hop.landing.index()].reset();
    for (std::size_t i = 0; i < hop.captured.size(); ++i) b[hop.captured[i].index()] = removed[i];
  }
}

void generateFor(const GameState& s, const RuleSet& r, Square from, const Piece& piece, Board& scratch,
                 std::vector<Move>& out) {
  const PieceRules& rules = r.rules(piece.type);
  const auto convert = [&](Square to) { return conversionAt(r, piece.type, to, piece.owner); };
  const auto dirs = directions(rules.movement, piece.owner);

  if (rules.capture == Capture::StepOver) {
    std::vector<Square> path;
    std::vector<Square> captures;
    for (const auto& hop : hopsFrom(scratch, from, piece, rules)) {
      // Seed the chain with the first hop, then extend.
      for (Square v : hop.captured) scratch[v.index()].reset();
      scratch[hop.landing.index()] = scratch[from.index()];
      scratch[from.index()].reset();
      path = hop.entered;
      captures = hop.captured;
      extendChain(scratch, r, piece, from, hop.landing, path, captures, out);
      scratch[from.index()] = scratch[hop.landing.index()];
      scratch[hop.landing.index()].reset();
      for (Square v : hop.captured) scratch[v.index()] = s.board[v.index()];
    }
  }

  for (const auto& d : dirs) {
    std::vector<Square> path;
    int row = from.row() + d[0];
    int col = from.col() + d[1];
    while (Square::onBoard(row, col)) {
      const Square to = Square::at(row, col);
      const auto& occupant = s.board[to.index()];
      if (occupant) {
        if (occupant->owner != piece.owner && rules.capture == Capture::StepInto) {
          path.push_back(to);
          out.push_back({from, to, path, {to}, convert(to)});
        }
        break;
      }
      path.push_back(to);
      if (rules.movement == Movement::LShape) {
        // Knight-style: a single landing cell, nothing on the way matters.
        // Step-over knights with an opponent on the long leg were emitted
        // as captures above.
        if (rules.capture == Capture::StepOver) {
          bool captures = false;
          for (Square leg : longLeg(from, d)) captures = captures || isOpponent(s.board, leg, piece.owner);
          if (captures) break;
        }
        out.push_back({from, to, path, {}, convert(to)});
        break;
      }
      out.push_back({from, to, path, {}, convert(to)});
      if (rules.step == StepSize::Single) break;
      row += d[0];
      col += d[1];
    }
  }
}

}  // namespace

std::string_view toString(Player p) { return p == Player::One ? "One" : "Two"; }

std::string Square::name() const {
  return fmt::format("{}{}", static_cast<char>('a' + col()), row() + 1);
}

std::optional<Square> Square::parse(std::string_view name) {
  if (name.size() != 2) return std::nullopt;
  const int col = name[0] - 'a';
  const int row = name[1] - '1';
  if (!onBoard(row, col)) return std::nullopt;
  return Square::at(row, col);
}

std::string Move::toString() const {
  std::string text = from.name();
  for (Square s : path) text += "-" + s.name();
  if (!captures.empty()) {
    text += " x";
    for (Square s : captures) text += " " + s.name();
  }
  if (convertsTo) text += fmt::format(" ={}", *convertsTo);
  return text;
}

std::string_view toString(Outcome o) {
  switch (o) {
    case Outcome::Ongoing: return "ongoing";
    case Outcome::Won: return "won";
    case Outcome::Draw: return "draw";
  }
  return "?";
}

std::string_view toString(EndReason r) {
  switch (r) {
    case EndReason::None: return "none";
    case EndReason::Honor: return "honor";
    case EndReason::NoMoves: return "no-moves";
    case EndReason::MoveCap: return "move-cap";
  }
  return "?";
}

int GameState::pieceCount(Player p) const {
  return static_cast<int>(std::count_if(board.begin(), board.end(), [p](const auto& c) { return c && c->owner == p; }));
}

int GameState::typeCount(Player p, PieceType t) const {
  return static_cast<int>(
      std::count_if(board.begin(), board.end(), [p, t](const auto& c) { return c && c->owner == p && c->type == t; }));
}

Piece& GameState::place(Square s, Player owner, PieceType type) {
  if (board[s.index()]) throw std::logic_error("cell " + s.name() + " already occupied");
  if (type < 1 || type > kPieceTypes) throw std::out_of_range("piece type out of range");
  const auto id = static_cast<std::uint16_t>(pieces.size());
  pieces.push_back({owner, type, 0, std::nullopt});
  ++initialTypeCounts[index(owner)][type];
  board[s.index()] = Piece{owner, type, id};
  return *board[s.index()];
}

GameState initialState(const RuleSet& r) {
  GameState s;
  for (int k = 0; k < kPlacementCells; ++k)
    if (r.placement[k] != 0) s.place(Square{k}, Player::One, r.placement[k]);
  for (int k = 0; k < kPlacementCells; ++k)
    if (r.placement[k] != 0) s.place(Square{k}.rotated(), Player::Two, r.placement[k]);
  s.status = gameStatus(s, r);
  return s;
}

std::span<const std::array<int, 2>> directions(Movement m, Player p) {
  const bool one = p == Player::One;
  switch (m) {
    case Movement::DiagFwd: return one ? std::span<const Offset>{kDiagFwd} : kDiagFwdTwo;
    case Movement::DiagFwdBack: return one ? std::span<const Offset>{kDiagFwdBack} : kDiagFwdBackTwo;
    case Movement::AllDirs: return one ? std::span<const Offset>{kAllDirs} : kAllDirsTwo;
    case Movement::LShape: return one ? std::span<const Offset>{kKnight} : kKnightTwo;
    case Movement::StraightFwdBack: return one ? std::span<const Offset>{kStraightFwdBack} : kStraightFwdBackTwo;
    case Movement::StraightFwd: return one ? std::span<const Offset>{kStraightFwd} : kStraightFwdTwo;
  }
  return {};
}

std::vector<Move> legalMoves(const GameState& s, const RuleSet& r) {
  std::vector<Move> out;
  Board scratch = s.board;
  for (int i = 0; i < kCells; ++i) {
    const auto& cell = s.board[i];
    if (cell && cell->owner == s.sideToMove) generateFor(s, r, Square{i}, *cell, scratch, out);
  }
  if (r.mandatoryCapture && std::any_of(out.begin(), out.end(), [](const Move& m) { return m.isCapture(); })) {
    std::erase_if(out, [](const Move& m) { return !m.isCapture(); });
  }
  return out;
}

void advance(GameState& s, const Move& m) {
  auto mover = s.board[m.from.index()];
  if (!mover) throw IllegalMove("no piece on " + m.from.name());
  s.board[m.from.index()].reset();
  const int ply = s.ply + 1;
  for (Square c : m.captures) {
    auto& victim = s.board[c.index()];
    if (victim) {
      s.pieces[victim->id].deathPly = ply;
      victim.reset();
    }
  }
  s.pieces[mover->id].cellChanges += static_cast<int>(m.path.size());
  for (Square c : m.path) ++s.cellVisits[c.index()];
  if (m.convertsTo) mover->type = *m.convertsTo;
  s.board[m.to.index()] = mover;
  s.ply = ply;
  s.sideToMove = opponent(s.sideToMove);
}

GameState applyMove(const GameState& s, const RuleSet& r, const Move& m) {
  if (!s.status.ongoing()) throw IllegalMove("game is already over");
  const auto legal = legalMoves(s, r);
  if (std::find(legal.begin(), legal.end(), m) == legal.end())
    throw IllegalMove("move " + m.toString() + " is not in the legal set");
  GameState next = s;
  advance(next, m);
  next.status = gameStatus(next, r);
  return next;
}

Status gameStatus(const GameState& s, const RuleSet& r) {
  const auto moves = legalMoves(s, r);
  return gameStatus(s, r, moves);
}

Status gameStatus(const GameState& s, const RuleSet& r, std::span<const Move> sideToMoveMoves) {
  if (r.pieceOfHonor) {
    const PieceType honor = *r.pieceOfHonor;
    std::array<bool, 2> lost{};
    for (Player p : {Player::One, Player::Two})
      lost[index(p)] = s.initialTypeCounts[index(p)][honor] > 0 && s.typeCount(p, honor) == 0;
    if (lost[0] && lost[1]) return {Outcome::Draw, Player::One, EndReason::Honor};
    if (lost[0]) return {Outcome::Won, Player::Two, EndReason::Honor};
    if (lost[1]) return {Outcome::Won, Player::One, EndReason::Honor};
  }
  if (sideToMoveMoves.empty()) return {Outcome::Won, opponent(s.sideToMove), EndReason::NoMoves};
  if (s.ply >= kMaxPlies) {
    const int one = s.pieceCount(Player::One);
    const int two = s.pieceCount(Player::Two);
    if (one == two) return {Outcome::Draw, Player::One, EndReason::MoveCap};
    return {Outcome::Won, one > two ? Player::One : Player::Two, EndReason::MoveCap};
  }
  return {};
}

}  // namespace boardgen
