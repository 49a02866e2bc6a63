#include "boardgen/ann.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "boardgen/playout.hpp"

namespace boardgen {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::size_t countParameters() {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < kAnnLayers.size(); ++l)
    n += static_cast<std::size_t>(kAnnLayers[l + 1]) * (kAnnLayers[l] + 1);
  return n;
}

// The board after `m`, without touching statistics.
std::array<std::optional<Piece>, kCells> boardAfter(const GameState& s, const Move& m) {
  auto board = s.board;
  auto mover = board[m.from.index()];
  board[m.from.index()].reset();
  for (Square c : m.captures) board[c.index()].reset();
  if (mover && m.convertsTo) mover->type = *m.convertsTo;
  board[m.to.index()] = mover;
  return board;
}

}  // namespace

AnnController::AnnController() : params_(countParameters(), 0.0) {}

AnnController::AnnController(std::vector<double> parameters) : params_(std::move(parameters)) {
  if (params_.size() != countParameters())
    throw std::invalid_argument(
        fmt::format("ANN needs {} parameters, got {}", countParameters(), params_.size()));
}

std::size_t AnnController::parameterCount() { return countParameters(); }

AnnController AnnController::random(Rng& rng, double scale) {
  std::uniform_real_distribution<double> u{-scale, scale};
  AnnController a;
  for (auto& p : a.params_) p = u(rng);
  return a;
}

double AnnController::forward(const BoardInput& input) const {
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(input.data(), kCells);
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < kAnnLayers.size(); ++l) {
    const int in = kAnnLayers[l];
    const int out = kAnnLayers[l + 1];
    Eigen::Map<const RowMajor> w(params_.data() + offset, out, in);
    offset += static_cast<std::size_t>(out) * in;
    Eigen::Map<const Eigen::VectorXd> b(params_.data() + offset, out);
    offset += out;
    x = (w * x + b).array().tanh().matrix();
  }
  return x(0);
}

void AnnController::mutate(Rng& rng, double sigma) {
  std::normal_distribution<double> noise{0.0, sigma};
  for (auto& p : params_) p = std::clamp(p + noise(rng), -kAnnWeightBound, kAnnWeightBound);
}

std::string AnnController::dump() const {
  std::string out = fmt::format("layers {}\n", fmt::join(kAnnLayers, " "));
  for (double p : params_) out += fmt::format("{}\n", p);
  return out;
}

AnnController AnnController::load(const std::string& text) {
  std::istringstream in(text);
  std::string word;
  in >> word;
  if (word != "layers") throw std::invalid_argument("ANN dump must start with a 'layers' header");
  for (int expected : kAnnLayers) {
    int size = 0;
    if (!(in >> size) || size != expected)
      throw std::invalid_argument(fmt::format("ANN dump layer sizes must be {}", fmt::join(kAnnLayers, "-")));
  }
  std::vector<double> params;
  double v = 0.0;
  while (in >> v) params.push_back(v);
  return AnnController(std::move(params));
}

BoardInput encodeBoard(const std::array<std::optional<Piece>, kCells>& board, Player pov) {
  BoardInput input{};
  for (int k = 0; k < kCells; ++k) {
    const Square cell = pov == Player::One ? Square{k} : Square{k}.rotated();
    const auto& piece = board[cell.index()];
    if (!piece) continue;
    const double magnitude = piece->type / 6.0;
    input[k] = piece->owner == pov ? magnitude : -magnitude;
  }
  return input;
}

double annForward(const AnnController& a, const GameState& s, Player pov) {
  return a.forward(encodeBoard(s.board, pov));
}

Move AnnAgent::chooseMove(const GameState& s, const RuleSet&, std::span<const Move> legal, Rng&) const {
  if (legal.empty()) throw std::logic_error("agent asked to move with no legal moves");
  std::size_t best = 0;
  double bestValue = -2.0;
  for (std::size_t i = 0; i < legal.size(); ++i) {
    const double v = net_->forward(encodeBoard(boardAfter(s, legal[i]), s.sideToMove));
    if (v > bestValue) {
      bestValue = v;
      best = i;
    }
  }
  return legal[best];
}

int coevolutionScore(const MatchRecord& rec, Player side) {
  const auto winner = rec.winner();
  if (!winner) return 0;
  return *winner == side ? 1 : -2;
}

PairingResult playPairing(const RuleSet& r, const AnnController& a, const AnnController& b) {
  const AnnAgent agentA{a};
  const AnnAgent agentB{b};
  PairingResult result;
  const MatchRecord games[2] = {playout(r, agentA, agentB, 0), playout(r, agentB, agentA, 0)};
  const Player sideOfA[2] = {Player::One, Player::Two};
  for (int g = 0; g < 2; ++g) {
    const auto winner = games[g].winner();
    if (winner == sideOfA[g]) ++result.wins;
    else if (winner) ++result.losses;
    result.score += coevolutionScore(games[g], sideOfA[g]);
  }
  return result;
}

LearnabilityResult coevolveLearnability(const RuleSet& r, const CoevolutionConfig& config, std::uint64_t seed) {
  if (config.population < 2) throw std::invalid_argument("coevolution needs a population of at least 2");
  if (config.maxIterations < 1) throw std::invalid_argument("coevolution needs at least one iteration");
  const int size = config.population;
  const int opponents = std::min(config.opponents, size - 1);

  Rng rng{deriveSeed(seed, "coevolution")};
  std::vector<AnnController> population(config.initialPopulation.begin(),
                                        config.initialPopulation.begin() +
                                            std::min<std::size_t>(config.initialPopulation.size(), size));
  while (static_cast<int>(population.size()) < size) population.push_back(AnnController::random(rng));

  LearnabilityResult result;
  std::vector<int> others(size - 1);
  for (int iteration = 1; iteration <= config.maxIterations; ++iteration) {
    std::vector<int> scores(size, 0);
    for (int i = 0; i < size; ++i) {
      std::iota(others.begin(), others.end(), 0);
      for (auto& o : others)
        if (o >= i) ++o;
      std::shuffle(others.begin(), others.end(), rng);
      for (int k = 0; k < opponents; ++k) scores[i] += playPairing(r, population[i], population[others[k]]).score;
    }

    std::vector<int> order(size);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return scores[a] > scores[b]; });
    const int best = order.front();

    CoevolutionIteration record;
    record.iteration = iteration;
    record.meanScore = std::accumulate(scores.begin(), scores.end(), 0.0) / size;
    for (int j = 0; j < size; ++j) {
      if (j == best) continue;
      const auto pairing = playPairing(r, population[best], population[j]);
      record.bestRoundRobinScore += pairing.score;
      record.bestDefeated += pairing.beats() ? 1 : 0;
    }
    result.trace.push_back(record);
    if (record.bestDefeated == size - 1) {
      result.iterations = iteration;
      return result;
    }

    std::vector<AnnController> next;
    next.reserve(size);
    const int survivors = (size + 1) / 2;
    for (int k = 0; k < survivors; ++k) next.push_back(population[order[k]]);
    for (int k = 0; static_cast<int>(next.size()) < size; ++k) {
      AnnController child = next[k % survivors];
      child.mutate(rng, config.sigma);
      next.push_back(std::move(child));
    }
    population = std::move(next);
  }
  result.iterations = config.maxIterations;
  result.capped = true;
  return result;
}

}  // namespace boardgen
