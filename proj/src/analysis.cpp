#include "boardgen/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "boardgen/parallel.hpp"

namespace boardgen {

using nlohmann::json;

double pairDiversity(const MetricsVector& a, const MetricsVector& b, Metric metric, double metricMax) {
  if (metricMax == 0.0) return 0.0;
  return std::abs(axisValue(a, metric) - axisValue(b, metric)) / metricMax;
}

std::vector<DiversityEntry> diversityEntries(const Archive& a) {
  std::vector<DiversityEntry> out;
  for (int g = 0; g < kArchiveSize; ++g) {
    const auto& slot = a.at(g);
    if (!slot) throw std::invalid_argument(fmt::format("archive slot {} is empty", g + 1));
    out.push_back({kArchiveOrder[g / kSlotsPerMetric], slot->metrics, slot->chromosome});
  }
  return out;
}

double metricMaximum(std::span<const DiversityEntry> games, Metric metric) {
  double best = 0.0;
  for (const auto& g : games) best = std::max(best, axisValue(g.metrics, metric));
  return best;
}

std::vector<int> diversityCount(std::span<const DiversityEntry> games, double threshold) {
  std::vector<int> counts(games.size(), 0);
  for (std::size_t g = 0; g < games.size(); ++g) {
    const Metric metric = games[g].archivedUnder;
    const double max = metricMaximum(games, metric);
    for (std::size_t h = 0; h < games.size(); ++h)
      if (h != g && pairDiversity(games[g].metrics, games[h].metrics, metric, max) >= threshold) ++counts[g];
  }
  return counts;
}

std::vector<int> selectDiverse(std::span<const int> counts, int k) {
  std::vector<int> order(counts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return counts[a] > counts[b]; });
  order.resize(std::min<std::size_t>(order.size(), static_cast<std::size_t>(std::max(k, 0))));
  return order;
}

std::vector<DiversityEntry> readDiversityTable(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<DiversityEntry> out;
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) fields.push_back(cell);
    if (fields.size() < 6) throw std::invalid_argument(fmt::format("{}:{}: expected at least 6 fields", path, lineNo));
    if (fields[0] == "game") continue;  // header
    DiversityEntry e;
    e.archivedUnder = parseMetric(fields[1]);
    e.metrics.durationScaled = std::stod(fields[2]);
    e.metrics.dynamism = std::stod(fields[3]);
    e.metrics.intelligence = std::stod(fields[4]);
    e.metrics.usability = std::stod(fields[5]);
    // Everything after the sixth field is the (comma-separated) chromosome.
    if (fields.size() > 6) {
      std::string genes = fields[6];
      for (std::size_t k = 7; k < fields.size(); ++k) genes += "," + fields[k];
      e.chromosome = Chromosome::parse(genes);
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::string_view toString(Rating r) {
  switch (r) {
    case Rating::Liked: return "liked";
    case Rating::Disliked: return "disliked";
    case Rating::Neutral: return "neutral";
  }
  return "?";
}

Rating parseRating(std::string_view s) {
  if (s == "liked" || s == "yes" || s == "1") return Rating::Liked;
  if (s == "disliked" || s == "no" || s == "2") return Rating::Disliked;
  if (s == "neutral" || s == "3") return Rating::Neutral;
  throw std::invalid_argument(fmt::format("unknown rating '{}'; expected liked, disliked or neutral", s));
}

int surveyCode(Rating r, SurveyCoding coding) {
  switch (r) {
    case Rating::Liked: return 1;
    case Rating::Disliked: return coding == SurveyCoding::Signed ? -1 : 0;
    case Rating::Neutral: return 0;
  }
  return 0;
}

std::string RatingRecord::toJsonLine() const {
  const json j{{"subjectId", subjectId}, {"gameId", gameId},        {"runIndex", runIndex},
               {"code", toString(code)}, {"timestamp", timestamp}};
  return j.dump();
}

RatingRecord RatingRecord::fromJsonLine(const std::string& line) {
  const json j = json::parse(line);
  RatingRecord r;
  r.subjectId = j.at("subjectId").get<std::string>();
  r.gameId = j.at("gameId").get<std::string>();
  r.runIndex = j.at("runIndex").get<int>();
  r.code = parseRating(j.at("code").get<std::string>());
  r.timestamp = j.value("timestamp", std::int64_t{0});
  return r;
}

std::vector<RatingRecord> readRatings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<RatingRecord> out;
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty() || line.front() == '#') continue;
    try {
      out.push_back(RatingRecord::fromJsonLine(line));
    } catch (const std::exception& e) {
      throw std::invalid_argument(fmt::format("{}:{}: {}", path, lineNo, e.what()));
    }
  }
  return out;
}

std::map<std::string, SurveySample> surveySamples(std::span<const RatingRecord> ratings, SurveyCoding coding) {
  std::map<std::string, std::map<std::string, int>> totals;  // game -> subject -> summed codes
  for (const auto& r : ratings) totals[r.gameId][r.subjectId] += surveyCode(r.code, coding);
  std::map<std::string, SurveySample> out;
  for (const auto& [game, subjects] : totals) {
    SurveySample s;
    for (const auto& [subject, total] : subjects) s.z.push_back((total > 0) - (total < 0));
    out.emplace(game, std::move(s));
  }
  return out;
}

double correlationC(const SurveySample& sample) {
  if (sample.z.empty()) throw std::invalid_argument("correlationC: empty sample");
  int total = 0;
  for (int z : sample.z) {
    if (z < -1 || z > 1) throw std::invalid_argument(fmt::format("survey code {} outside {{-1, 0, 1}}", z));
    total += z;
  }
  return static_cast<double>(total) / sample.size();
}

namespace {

// Smallest code total S with S / n >= c.
int requiredTotal(double c, int n) { return static_cast<int>(std::ceil(c * n - 1e-9)); }

void requireValid(int n, const NullModel& null) {
  if (n < 1) throw std::invalid_argument("pValue: N must be >= 1");
  const double sum = null.minus + null.zero + null.plus;
  if (null.minus < 0 || null.zero < 0 || null.plus < 0 || std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("pValue: null model probabilities must be non-negative and sum to 1");
}

}  // namespace

PValue pValueExact(double c, int n, const NullModel& null) {
  requireValid(n, null);
  // dist[s + n] = P(total = s) after the codes processed so far.
  std::vector<double> dist(2 * n + 1, 0.0);
  dist[n] = 1.0;
  for (int k = 0; k < n; ++k) {
    std::vector<double> next(dist.size(), 0.0);
    for (std::size_t s = 0; s < dist.size(); ++s) {
      if (dist[s] == 0.0) continue;
      if (s > 0) next[s - 1] += dist[s] * null.minus;
      next[s] += dist[s] * null.zero;
      if (s + 1 < dist.size()) next[s + 1] += dist[s] * null.plus;
    }
    dist = std::move(next);
  }
  const int from = std::clamp(requiredTotal(c, n), -n, n + 1);
  double p = 0.0;
  for (int s = n; s >= from; --s) p += dist[s + n];
  return {.p = std::min(p, 1.0), .exact = true};
}

PValue pValueMonteCarlo(double c, int n, const NullModel& null, long trials, std::uint64_t seed) {
  requireValid(n, null);
  if (trials < 1) throw std::invalid_argument("pValue: trials must be >= 1");
  Rng rng{deriveSeed(seed, "p-value")};
  std::discrete_distribution<int> code{null.minus, null.zero, null.plus};
  const int needed = requiredTotal(c, n);
  long hits = 0;
  for (long t = 0; t < trials; ++t) {
    int total = 0;
    for (int k = 0; k < n; ++k) total += code(rng) - 1;
    hits += total >= needed ? 1 : 0;
  }
  const double p = static_cast<double>(hits) / trials;
  return {.p = p, .exact = false, .trials = trials, .standardError = std::sqrt(p * (1 - p) / trials)};
}

PValue pValue(double c, int n, const NullModel& null, long trials, std::uint64_t seed) {
  if (n >= 1 && std::pow(3.0, n) <= 1e6) return pValueExact(c, n, null);
  return pValueMonteCarlo(c, n, null, trials, seed);
}

std::vector<int> LearnabilityRow::iterations() const {
  std::vector<int> out;
  for (const auto& r : runs) out.push_back(r.iterations);
  return out;
}

double LearnabilityRow::median() const {
  auto v = iterations();
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : (v[mid - 1] + v[mid]) / 2.0;
}

bool LearnabilityRow::anyCapped() const {
  return std::any_of(runs.begin(), runs.end(), [](const auto& r) { return r.capped; });
}

std::optional<bool> LearnabilityReport::ordinalHolds() const {
  const auto random = std::find_if(rows.begin(), rows.end(), [](const auto& r) { return r.random; });
  if (random == rows.end()) return std::nullopt;
  bool any = false;
  for (const auto& r : rows) {
    if (r.random) continue;
    any = true;
    if (!(random->median() < r.median())) return false;
  }
  if (!any) return std::nullopt;
  return true;
}

std::string LearnabilityReport::toText() const {
  std::string out = "game\tkind\titerations\tmedian\tcapped\n";
  for (const auto& r : rows)
    out += fmt::format("{}\t{}\t{}\t{}\t{}\n", r.name, r.random ? "random" : "evolved", fmt::join(r.iterations(), ","),
                       r.median(), r.anyCapped() ? "yes" : "no");
  if (const auto holds = ordinalHolds())
    out += fmt::format("random game learned fastest: {}\n", *holds ? "yes" : "no");
  return out;
}

LearnabilityReport learnabilityExperiment(std::span<const LearnabilityGame> games, const LearnabilityConfig& config) {
  if (config.repetitions < 1) throw std::invalid_argument("learnability needs at least one repetition");
  const auto reps = static_cast<std::size_t>(config.repetitions);
  LearnabilityReport report;
  for (const auto& g : games) report.rows.push_back({g.name, g.random, std::vector<LearnabilityResult>(reps)});
  parallelFor(games.size() * reps, config.threads, [&](std::size_t job) {
    const std::size_t game = job / reps;
    const std::size_t rep = job % reps;
    report.rows[game].runs[rep] =
        coevolveLearnability(games[game].rules, config.coevolution, deriveSeed(config.seed, "learnability", rep));
  });
  return report;
}

}  // namespace boardgen
