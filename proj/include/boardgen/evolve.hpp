#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "boardgen/genome.hpp"
#include "boardgen/metrics.hpp"
#include "boardgen/random.hpp"

namespace boardgen {

inline constexpr double kPromotionThreshold = 4.0;
inline constexpr double kFitnessTermCap = 2.0;

/// Sum over the four axes of child/parent (duration on the scaled value).
/// A zero parent gives 1 against a zero child and 2 otherwise; every term is
/// capped at 2.
double fitnessDifference(const MetricsVector& parent, const MetricsVector& child);

struct Family {
  int id = 1;
  Chromosome parent;
  MetricsVector parentMetrics;
};

/// Archive slots are listed per metric in this order, two per metric.
inline constexpr std::array<Metric, 4> kArchiveOrder{Metric::Duration, Metric::Dynamism, Metric::Intelligence,
                                                    Metric::Usability};
inline constexpr int kSlotsPerMetric = 2;
inline constexpr int kArchiveSize = 8;

struct ArchiveEntry {
  Chromosome chromosome;
  MetricsVector metrics;

  friend bool operator==(const ArchiveEntry&, const ArchiveEntry&) = default;
};

class Archive {
 public:
  const std::optional<ArchiveEntry>& slot(Metric m, int k) const;
  /// Slot `game` (0..7) in kArchiveOrder layout.
  const std::optional<ArchiveEntry>& at(int game) const { return slots_.at(game); }
  /// Value of the slot on its own metric, if occupied.
  std::optional<double> value(int game) const;

  /// Offers a candidate to every metric's pair of slots. It enters where it
  /// strictly beats an incumbent (or fills an empty slot); a chromosome
  /// already held for that metric is not inserted again. Returns whether
  /// anything changed.
  bool offer(const Chromosome& c, const MetricsVector& m);

  bool full() const;

  /// Eight lines, one per slot: metric, slot (1 or 2), chromosome,
  /// then D, scaled D, I, Dyn, U and n. Empty slots read "<metric> <slot> empty".
  std::string toText() const;
  static Archive fromText(const std::string& text);

  friend bool operator==(const Archive&, const Archive&) = default;

 private:
  std::array<std::optional<ArchiveEntry>, kArchiveSize> slots_{};
};

Archive updateArchive(Archive a, const Chromosome& c, const MetricsVector& m);

inline bool promotes(double difference) { return difference > kPromotionThreshold; }

struct StepConfig {
  EvaluationConfig evaluation;
  double mutationRate = kDefaultMutationRate;
  /// Playout seeds for a chromosome are derived from this and the
  /// chromosome's text, so equal chromosomes always get equal metrics.
  std::uint64_t evaluationSeed = 0;
};

MetricsVector evaluateChromosome(const Chromosome& c, const StepConfig& config);

struct StepResult {
  Family next;  // the family after the step
  Chromosome child;
  MetricsVector childMetrics;
  double difference = 0.0;
  bool promoted = false;
  bool failed = false;  // child evaluation threw; parent kept
  std::string error;
};

/// One 1+1 iteration: mutate the parent with `rng`, evaluate the child,
/// promote it when the fitness difference exceeds 4.
StepResult familyStep(const Family& f, Rng& rng, const StepConfig& config = {});

struct EvolutionConfig {
  int families = 10;
  int iterations = 100;
  std::uint64_t seed = 0;
  StepConfig step;  // evaluationSeed is derived from `seed`
  FitnessWeights weights = kUnitWeights;
  int threads = 0;  // 0: all available cores
};

struct TraceRecord {
  int iteration = 0;  // 1-based
  int family = 0;     // 1-based
  Chromosome parent;  // parent going into the iteration
  MetricsVector parentMetrics;
  Chromosome child;
  MetricsVector childMetrics;
  double difference = 0.0;
  bool promoted = false;
  bool failed = false;
  std::string error;
  /// Rank fitness over the parents and children of this iteration.
  double parentFitness = 0.0;
  double childFitness = 0.0;
  /// Archive slot values after this iteration's updates (kArchiveOrder).
  std::array<std::optional<double>, kArchiveSize> archive{};

  std::string toJsonLine() const;
  static TraceRecord fromJsonLine(const std::string& line);

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct EvolutionResult {
  Archive archive;
  std::vector<TraceRecord> trace;  // iteration-major, family order within an iteration
  std::vector<Family> families;    // final parents
};

/// Families are seeded per id from the root seed; children within an
/// iteration are evaluated in parallel, then the archive is updated in
/// family order. Output does not depend on the thread count.
EvolutionResult runEvolution(const EvolutionConfig& config);

/// Writes archive.txt and trace.jsonl into `dir`, creating it if needed.
void writeEvolutionOutput(const EvolutionResult& result, const std::string& dir);
std::vector<TraceRecord> readTrace(const std::string& path);
Archive readArchive(const std::string& path);

}  // namespace boardgen
