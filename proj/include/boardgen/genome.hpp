#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "boardgen/random.hpp"

namespace boardgen {

inline constexpr int kGeneCount = 50;
inline constexpr int kPlacementCells = 24;
inline constexpr int kPieceTypes = 6;

/// Piece types are numbered 1..6; 0 is reserved for "none" in gene encodings.
using PieceType = std::uint8_t;

// Gene blocks, 0-based offsets into Chromosome::genes.
inline constexpr int kPlacementBegin = 0;
inline constexpr int kMovementBegin = 24;
inline constexpr int kStepBegin = 30;
inline constexpr int kCaptureBegin = 36;
inline constexpr int kHonorGene = 42;
inline constexpr int kConversionBegin = 43;
inline constexpr int kMandatoryGene = 49;

struct GeneRange {
  int lo;
  int hi;
};

/// Legal value range of the gene at 0-based position `index`.
GeneRange geneRange(int index);

struct Chromosome {
  std::array<int, kGeneCount> genes{};

  friend bool operator==(const Chromosome&, const Chromosome&) = default;
  friend auto operator<=>(const Chromosome&, const Chromosome&) = default;

  int pieceCount() const;

  /// 50 comma-separated decimal integers, no trailing newline.
  std::string toString() const;
  static Chromosome parse(std::string_view text);
};

/// Reads the first line that is neither blank nor a '#' comment.
Chromosome readChromosomeFile(const std::string& path);
void writeChromosomeFile(const std::string& path, const Chromosome& c);

struct Violation {
  int gene;  // 1-based gene number, 0 for whole-chromosome rules
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationOptions {
  // The gene layout allows 24 pieces per side; 16 is the stricter
  // ceiling quoted for the search space prose.
  int maxPieces = kPlacementCells;
};

std::vector<Violation> validate(const Chromosome& c, const ValidationOptions& options = {});

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

enum class Movement : std::uint8_t {
  DiagFwd = 1,
  DiagFwdBack = 2,
  AllDirs = 3,
  LShape = 4,
  StraightFwdBack = 5,
  StraightFwd = 6,
};

enum class StepSize : std::uint8_t { Single = 0, Multiple = 1 };
enum class Capture : std::uint8_t { StepInto = 0, StepOver = 1 };

std::string_view toString(Movement m);
std::string_view toString(StepSize s);
std::string_view toString(Capture c);

struct PieceRules {
  Movement movement = Movement::DiagFwd;
  StepSize step = StepSize::Single;
  Capture capture = Capture::StepInto;
  std::optional<PieceType> conversion;

  friend bool operator==(const PieceRules&, const PieceRules&) = default;
};

struct RuleSet {
  std::array<PieceRules, kPieceTypes> types{};
  std::optional<PieceType> pieceOfHonor;
  bool mandatoryCapture = false;
  /// Player One's three home rows, row-major from a1; 0 = empty.
  std::array<PieceType, kPlacementCells> placement{};

  const PieceRules& rules(PieceType t) const { return types.at(t - 1); }

  friend bool operator==(const RuleSet&, const RuleSet&) = default;
};

/// Throws ValidationError when `c` is invalid.
RuleSet decode(const Chromosome& c);
Chromosome encode(const RuleSet& r);

Chromosome randomChromosome(Rng& rng);

inline constexpr double kDefaultMutationRate = 0.3;

/// Resamples each gene with probability `rate`; an all-empty placement block
/// is redrawn until at least one piece is present.
Chromosome mutate(const Chromosome& c, Rng& rng, double rate = kDefaultMutationRate);

}  // namespace boardgen
