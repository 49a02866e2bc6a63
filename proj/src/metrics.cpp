#include "boardgen/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace boardgen {

namespace {

void requireRecords(std::span<const MatchRecord> records, const char* what) {
  if (records.empty()) throw std::invalid_argument(std::string{what} + ": empty batch of match records");
}

// Mean that does not depend on the order of the inputs, bit for bit.
double orderFreeMean(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

}  // namespace

std::string_view toString(Metric m) {
  switch (m) {
    case Metric::Duration: return "duration";
    case Metric::Intelligence: return "intelligence";
    case Metric::Dynamism: return "dynamism";
    case Metric::Usability: return "usability";
  }
  return "?";
}

Metric parseMetric(std::string_view name) {
  for (Metric m : kMetrics)
    if (toString(m) == name) return m;
  throw std::invalid_argument("unknown metric '" + std::string{name} + "'");
}

double axisValue(const MetricsVector& m, Metric axis) {
  switch (axis) {
    case Metric::Duration: return m.durationScaled;
    case Metric::Intelligence: return m.intelligence;
    case Metric::Dynamism: return m.dynamism;
    case Metric::Usability: return m.usability;
  }
  return 0.0;
}

double duration(std::span<const MatchRecord> records) {
  requireRecords(records, "duration");
  std::vector<double> plies;
  for (const auto& r : records) plies.push_back(r.plies);
  return orderFreeMean(std::move(plies));
}

double scaleDuration(double d) {
  if (!(d >= 0.0 && d <= 100.0)) throw std::domain_error(fmt::format("duration {} outside [0, 100]", d));
  if (d <= 10.0 || d > 90.0) return 0.0;
  if (d <= 20.0 || d > 80.0) return 0.2;
  if (d <= 30.0 || d > 70.0) return 0.5;
  if (d <= 40.0 || d > 60.0) return 0.8;
  return 1.0;
}

double intelligence(std::span<const MatchRecord> records) {
  requireRecords(records, "intelligence");
  int wins = 0;
  for (const auto& r : records) {
    Player smart;
    if (r.agentOne == "minimax" && r.agentTwo != "minimax") {
      smart = Player::One;
    } else if (r.agentTwo == "minimax" && r.agentOne != "minimax") {
      smart = Player::Two;
    } else {
      throw std::invalid_argument("intelligence: record is not a minimax-vs-other game");
    }
    if (r.winner() == smart) ++wins;
  }
  return static_cast<double>(wins) / static_cast<double>(records.size());
}

double dynamism(std::span<const MatchRecord> records, int totalPieces) {
  requireRecords(records, "dynamism");
  if (totalPieces < 1) throw std::invalid_argument("dynamism: total piece count must be >= 1");
  std::vector<double> perGame;
  for (const auto& r : records) {
    std::vector<double> ratios;
    for (const auto& p : r.pieces) ratios.push_back(p.life > 0 ? static_cast<double>(p.cellChanges) / p.life : 0.0);
    std::sort(ratios.begin(), ratios.end());
    perGame.push_back(std::accumulate(ratios.begin(), ratios.end(), 0.0) / totalPieces);
  }
  return orderFreeMean(std::move(perGame));
}

double dynamism(std::span<const MatchRecord> records) {
  requireRecords(records, "dynamism");
  return dynamism(records, std::max<int>(1, static_cast<int>(records.front().pieces.size())));
}

double usability(std::span<const MatchRecord> records) {
  requireRecords(records, "usability");
  std::vector<double> perGame;
  for (const auto& r : records) perGame.push_back(static_cast<double>(r.totalArrivals()) / kUsableCells);
  return orderFreeMean(std::move(perGame));
}

MetricsVector metricsFromRecords(std::span<const MatchRecord> randomGames, std::span<const MatchRecord> minimaxGames) {
  MetricsVector m;
  m.n = static_cast<int>(randomGames.size());
  m.durationRaw = duration(randomGames);
  m.durationScaled = scaleDuration(m.durationRaw);
  m.intelligence = intelligence(minimaxGames);
  m.dynamism = dynamism(randomGames);
  m.usability = usability(randomGames);
  return m;
}

Evaluation evaluate(const RuleSet& r, std::uint64_t seed, const EvaluationConfig& config) {
  if (config.playouts < 1) throw std::invalid_argument("evaluate: playouts must be >= 1");
  const RandomAgent random;
  const MinimaxAgent minimax;
  Evaluation ev;
  for (int k = 0; k < config.playouts; ++k)
    ev.randomGames.push_back(playout(r, random, random, deriveSeed(seed, "random-vs-random", k)));
  for (int k = 0; k < config.playouts; ++k) {
    const auto s = deriveSeed(seed, "minimax-vs-random", k);
    ev.minimaxGames.push_back(k % 2 == 0 ? playout(r, minimax, random, s) : playout(r, random, minimax, s));
  }
  ev.metrics = metricsFromRecords(ev.randomGames, ev.minimaxGames);
  return ev;
}

std::vector<RankFitness> rankPopulation(std::span<const MetricsVector> population, const FitnessWeights& weights) {
  const auto size = population.size();
  std::vector<RankFitness> out(size);
  std::vector<std::size_t> order(size);
  for (std::size_t axis = 0; axis < kMetrics.size(); ++axis) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return axisValue(population[a], kMetrics[axis]) > axisValue(population[b], kMetrics[axis]);
    });
    for (std::size_t pos = 0; pos < size; ++pos) out[order[pos]].rank[axis] = static_cast<int>(size - pos);
  }
  for (auto& f : out) {
    f.combined = 0.0;
    for (std::size_t axis = 0; axis < kMetrics.size(); ++axis) f.combined += weights[axis] * f.rank[axis];
  }
  return out;
}

std::string formatMetricsLine(const MetricsVector& m) {
  return fmt::format("D={} Dscaled={} I={} Dyn={} U={} n={}", m.durationRaw, m.durationScaled, m.intelligence,
                     m.dynamism, m.usability, m.n);
}

}  // namespace boardgen
