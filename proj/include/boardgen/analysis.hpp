#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "boardgen/ann.hpp"
#include "boardgen/evolve.hpp"
#include "boardgen/metrics.hpp"

namespace boardgen {

// ---- diversity ----

inline constexpr double kDiversityThreshold = 0.6;

/// |a - b| / metricMax on one axis (duration on the scaled value); 0 when
/// metricMax is 0.
double pairDiversity(const MetricsVector& a, const MetricsVector& b, Metric metric, double metricMax);

/// An archived game as seen by the diversity analysis.
struct DiversityEntry {
  Metric archivedUnder = Metric::Duration;
  MetricsVector metrics;
  std::optional<Chromosome> chromosome;
};

std::vector<DiversityEntry> diversityEntries(const Archive& a);

/// Largest value of `metric` over the games.
double metricMaximum(std::span<const DiversityEntry> games, Metric metric);

/// For each game g, the number of other games h with
/// pairDiversity(g, h, metric g was archived under, archive maximum) >= threshold.
std::vector<int> diversityCount(std::span<const DiversityEntry> games, double threshold = kDiversityThreshold);

/// Zero-based indices of the k games with the highest counts, ties to the
/// lower index, listed in rank order.
std::vector<int> selectDiverse(std::span<const int> counts, int k = 3);

/// Reads a CSV table: game,archived,duration,dynamism,intelligence,usability
/// optionally followed by the 50 genes. The duration column holds the scaled
/// value; a header row starting with "game" and '#' lines are skipped.
std::vector<DiversityEntry> readDiversityTable(const std::string& path);

// ---- survey statistics ----

enum class Rating : std::uint8_t { Liked, Disliked, Neutral };
std::string_view toString(Rating r);
Rating parseRating(std::string_view s);

/// Signed: liked/yes +1, disliked/no -1, neutral 0. NoAsZero: disliked also 0.
enum class SurveyCoding : std::uint8_t { Signed, NoAsZero };
int surveyCode(Rating r, SurveyCoding coding = SurveyCoding::Signed);

struct RatingRecord {
  std::string subjectId;
  std::string gameId;
  int runIndex = 1;  // 1..3
  Rating code = Rating::Neutral;
  std::int64_t timestamp = 0;  // seconds since the epoch

  std::string toJsonLine() const;
  static RatingRecord fromJsonLine(const std::string& line);
  friend bool operator==(const RatingRecord&, const RatingRecord&) = default;
};

/// One JSON record per line; blank and '#' lines skipped.
std::vector<RatingRecord> readRatings(const std::string& path);

struct SurveySample {
  std::vector<int> z;  // one code in {-1, 0, 1} per subject

  int size() const { return static_cast<int>(z.size()); }
};

/// Per game, one code per subject. A subject's runs of one game are summed
/// and the sign taken, so a single rating passes through unchanged.
std::map<std::string, SurveySample> surveySamples(std::span<const RatingRecord> ratings,
                                                  SurveyCoding coding = SurveyCoding::Signed);

/// Mean of the codes.
double correlationC(const SurveySample& sample);

/// Distribution of a single code under the null hypothesis.
struct NullModel {
  double minus = 1.0 / 3.0;
  double zero = 1.0 / 3.0;
  double plus = 1.0 / 3.0;
};

inline constexpr double kSurveyAlpha = 0.17;
inline constexpr long kDefaultTrials = 200000;

struct PValue {
  double p = 1.0;
  bool exact = true;
  long trials = 0;              // Monte Carlo only
  double standardError = 0.0;   // Monte Carlo only

  bool reject(double alpha = kSurveyAlpha) const { return p < alpha; }
};

/// P(C >= c) for N independent codes drawn from `null`, by summing the
/// exact distribution of the code total.
PValue pValueExact(double c, int n, const NullModel& null = {});
PValue pValueMonteCarlo(double c, int n, const NullModel& null, long trials, std::uint64_t seed);

/// Exact when 3^N <= 10^6, otherwise Monte Carlo with `trials` draws.
PValue pValue(double c, int n, const NullModel& null = {}, long trials = kDefaultTrials, std::uint64_t seed = 0);

// ---- learnability ----

struct LearnabilityGame {
  std::string name;
  RuleSet rules;
  bool random = false;  // the randomly generated reference game
};

struct LearnabilityConfig {
  CoevolutionConfig coevolution;
  int repetitions = 5;
  std::uint64_t seed = 0;
  int threads = 0;
};

struct LearnabilityRow {
  std::string name;
  bool random = false;
  std::vector<LearnabilityResult> runs;  // one per repetition

  std::vector<int> iterations() const;
  double median() const;
  bool anyCapped() const;
};

struct LearnabilityReport {
  std::vector<LearnabilityRow> rows;  // in input order

  /// The random game's median is below every evolved game's median.
  std::optional<bool> ordinalHolds() const;
  std::string toText() const;
};

/// Repetition r of every game uses the same coevolution seed.
LearnabilityReport learnabilityExperiment(std::span<const LearnabilityGame> games, const LearnabilityConfig& config);

}  // namespace boardgen
