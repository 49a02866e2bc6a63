#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "boardgen/genome.hpp"
#include "boardgen/random.hpp"

namespace boardgen {

inline constexpr int kBoardSize = 8;
inline constexpr int kCells = 64;
inline constexpr int kMaxPlies = 100;

enum class Player : std::uint8_t { One = 0, Two = 1 };

constexpr Player opponent(Player p) { return p == Player::One ? Player::Two : Player::One; }
constexpr int index(Player p) { return static_cast<int>(p); }
std::string_view toString(Player p);

/// Board cell. Row 0 is player One's home row ("rank 1"), column 0 is file a.
class Square {
 public:
  constexpr Square() = default;
  constexpr explicit Square(int index) : index_(static_cast<std::int8_t>(index)) {}
  static constexpr Square at(int row, int col) { return Square{row * kBoardSize + col}; }
  static constexpr bool onBoard(int row, int col) {
    return row >= 0 && row < kBoardSize && col >= 0 && col < kBoardSize;
  }

  constexpr int index() const { return index_; }
  constexpr int row() const { return index_ / kBoardSize; }
  constexpr int col() const { return index_ % kBoardSize; }
  /// 180-degree rotation, mapping one player's view onto the other's.
  constexpr Square rotated() const { return Square{kCells - 1 - index_}; }

  /// Algebraic name, "a1".."h8".
  std::string name() const;
  static std::optional<Square> parse(std::string_view name);

  friend constexpr auto operator<=>(Square, Square) = default;

 private:
  std::int8_t index_ = 0;
};

inline void PrintTo(Square s, std::ostream* os) { *os << s.name(); }

struct Piece {
  Player owner = Player::One;
  PieceType type = 1;
  std::uint16_t id = 0;

  friend bool operator==(const Piece&, const Piece&) = default;
};

struct Move {
  Square from;
  Square to;
  /// Cells entered in order; the last element is `to`. Jumped-over cells
  /// are not entered.
  std::vector<Square> path;
  std::vector<Square> captures;
  std::optional<PieceType> convertsTo;

  bool isCapture() const { return !captures.empty(); }
  std::string toString() const;

  friend bool operator==(const Move&, const Move&) = default;
};

enum class Outcome : std::uint8_t { Ongoing, Won, Draw };
enum class EndReason : std::uint8_t { None, Honor, NoMoves, MoveCap };

std::string_view toString(Outcome o);
std::string_view toString(EndReason r);

struct Status {
  Outcome outcome = Outcome::Ongoing;
  Player winner = Player::One;  // meaningful only when outcome == Won
  EndReason reason = EndReason::None;

  bool ongoing() const { return outcome == Outcome::Ongoing; }
  friend bool operator==(const Status&, const Status&) = default;
};

struct PieceRecord {
  Player owner = Player::One;
  PieceType initialType = 1;
  int cellChanges = 0;
  std::optional<int> deathPly;
};

struct GameState {
  std::array<std::optional<Piece>, kCells> board{};
  Player sideToMove = Player::One;
  int ply = 0;
  std::vector<PieceRecord> pieces;  // indexed by Piece::id
  std::array<int, kCells> cellVisits{};
  /// Per player, per type (index 0 unused): pieces present at setup.
  std::array<std::array<int, kPieceTypes + 1>, 2> initialTypeCounts{};
  Status status;

  const std::optional<Piece>& at(Square s) const { return board[s.index()]; }
  int pieceCount(Player p) const;
  int typeCount(Player p, PieceType t) const;

  /// Adds a fresh piece; used for setup and for hand-built positions.
  Piece& place(Square s, Player owner, PieceType type);
};

class IllegalMove : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

GameState initialState(const RuleSet& r);

/// Direction offsets (row, col) of a movement kind, oriented for `p`.
std::span<const std::array<int, 2>> directions(Movement m, Player p);

std::vector<Move> legalMoves(const GameState& s, const RuleSet& r);

/// Moves the piece and updates statistics without checking legality or
/// recomputing the status. Used by search and the playout loop.
void advance(GameState& s, const Move& m);

/// Checked move application; throws IllegalMove if `m` is not legal.
GameState applyMove(const GameState& s, const RuleSet& r, const Move& m);

Status gameStatus(const GameState& s, const RuleSet& r);

/// Status when the side to move's legal moves are already known.
Status gameStatus(const GameState& s, const RuleSet& r, std::span<const Move> sideToMoveMoves);

}  // namespace boardgen
