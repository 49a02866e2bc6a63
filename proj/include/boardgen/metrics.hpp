#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "boardgen/genome.hpp"
#include "boardgen/playout.hpp"

namespace boardgen {

/// The four entertainment metrics of one game, each averaged over n playouts.
struct MetricsVector {
  double durationRaw = 0.0;     // mean plies per game
  double durationScaled = 0.0;  // one of {0, 0.2, 0.5, 0.8, 1}
  double intelligence = 0.0;    // minimax win fraction against random
  double dynamism = 0.0;
  double usability = 0.0;
  int n = 0;

  friend bool operator==(const MetricsVector&, const MetricsVector&) = default;
};

/// The axes used for ranking, promotion and the archive.
enum class Metric : std::uint8_t { Duration, Intelligence, Dynamism, Usability };
inline constexpr std::array<Metric, 4> kMetrics{Metric::Duration, Metric::Intelligence, Metric::Dynamism,
                                               Metric::Usability};
std::string_view toString(Metric m);
Metric parseMetric(std::string_view name);

/// Value on the given axis; duration uses the scaled value.
double axisValue(const MetricsVector& m, Metric axis);

double duration(std::span<const MatchRecord> records);
double scaleDuration(double rawPlies);

/// Fraction of games won by the side whose agent is named "minimax".
double intelligence(std::span<const MatchRecord> records);

/// Mean over games of the mean over all pieces of C_i / L_i. `totalPieces`
/// defaults to the number of pieces stored in each record.
double dynamism(std::span<const MatchRecord> records);
double dynamism(std::span<const MatchRecord> records, int totalPieces);

inline constexpr int kUsableCells = kCells;
double usability(std::span<const MatchRecord> records);

struct EvaluationConfig {
  int playouts = 20;  // n
};

/// Both record batches behind one MetricsVector.
struct Evaluation {
  MetricsVector metrics;
  std::vector<MatchRecord> randomGames;   // random vs random
  std::vector<MatchRecord> minimaxGames;  // minimax vs random, colours alternating
};

/// Runs n random-vs-random games (duration, dynamism, usability) and n
/// minimax-vs-random games (intelligence). Game k of each batch is seeded
/// from `seed` and k, so the result is a pure function of its inputs.
Evaluation evaluate(const RuleSet& r, std::uint64_t seed, const EvaluationConfig& config = {});
MetricsVector metricsFromRecords(std::span<const MatchRecord> randomGames, std::span<const MatchRecord> minimaxGames);

struct RankFitness {
  std::array<int, 4> rank{};  // indexed like kMetrics
  double combined = 0.0;      // FF

  friend bool operator==(const RankFitness&, const RankFitness&) = default;
};

using FitnessWeights = std::array<double, 4>;
inline constexpr FitnessWeights kUnitWeights{1.0, 1.0, 1.0, 1.0};

/// Rank-based fitness: per metric the best of P individuals gets rank P,
/// ties resolved in favour of the lower population index.
std::vector<RankFitness> rankPopulation(std::span<const MetricsVector> population,
                                        const FitnessWeights& weights = kUnitWeights);

/// One report line: D, scaled D, I, Dyn, U, then optional ranks and FF.
std::string formatMetricsLine(const MetricsVector& m);

}  // namespace boardgen
