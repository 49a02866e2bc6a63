#include <gtest/gtest.h>

#include <cmath>

#include "boardgen/ann.hpp"
#include "boardgen/playout.hpp"
#include "support/test_support.hpp"

namespace boardgen {
namespace {

using testing::fixtureRules;

// A net whose output grows with own material minus opponent material: one
// neuron per layer carries a small uniform weighting of the input, the rest
// of the network is zero.
AnnController materialNet() {
  AnnController a;
  auto p = a.parameters();
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < kAnnLayers.size(); ++l) {
    const int in = kAnnLayers[l];
    const int out = kAnnLayers[l + 1];
    if (l == 0)
      for (int i = 0; i < in; ++i) p[offset + i] = 0.05;
    else
      p[offset] = 1.0;
    offset += static_cast<std::size_t>(out) * in + out;
  }
  return a;
}

TEST(Ann, ParameterCountMatchesLayers) {
  EXPECT_EQ(AnnController::parameterCount(), 64u * 91 + 91 + 91u * 40 + 40 + 40u * 10 + 10 + 10 + 1);
  EXPECT_THROW(AnnController(std::vector<double>(3, 0.0)), std::invalid_argument);
}

TEST(Ann, ZeroWeightsGiveZero) {
  const AnnController zero;
  for (int g = 1; g <= 4; ++g) {
    const GameState s = initialState(fixtureRules(g));
    EXPECT_EQ(annForward(zero, s, Player::One), 0.0);
    EXPECT_EQ(annForward(zero, s, Player::Two), 0.0);
  }
}

TEST(Ann, OutputStaysInsideOpenInterval) {
  Rng rng{5};
  const GameState s = initialState(fixtureRules(1));
  for (int i = 0; i < 50; ++i) {
    AnnController a = AnnController::random(rng, 2.0);
    const double v = annForward(a, s, Player::One);
    EXPECT_GT(v, -1.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(Ann, EncodingUsesSignedTypeFractions) {
  GameState s;
  s.place(Square::at(0, 0), Player::One, 3);
  s.place(Square::at(7, 7), Player::Two, 6);
  const auto one = encodeBoard(s.board, Player::One);
  EXPECT_DOUBLE_EQ(one[0], 0.5);
  EXPECT_DOUBLE_EQ(one[63], -1.0);
  const auto two = encodeBoard(s.board, Player::Two);
  EXPECT_DOUBLE_EQ(two[0], 1.0);
  EXPECT_DOUBLE_EQ(two[63], -0.5);
}

TEST(Ann, MirroredStateWithSwappedViewpointIsIdentical) {
  Rng rng{11};
  const AnnController a = AnnController::random(rng);
  std::uniform_int_distribution<int> type{1, kPieceTypes};
  std::bernoulli_distribution occupied{0.3};
  std::bernoulli_distribution coin{0.5};
  for (int trial = 0; trial < 100; ++trial) {
    GameState s;
    GameState mirrored;
    for (int k = 0; k < kCells; ++k) {
      if (!occupied(rng)) continue;
      const Player owner = coin(rng) ? Player::One : Player::Two;
      const auto t = static_cast<PieceType>(type(rng));
      s.place(Square{k}, owner, t);
      mirrored.place(Square{k}.rotated(), opponent(owner), t);
    }
    EXPECT_EQ(encodeBoard(s.board, Player::One), encodeBoard(mirrored.board, Player::Two));
    EXPECT_EQ(annForward(a, s, Player::One), annForward(a, mirrored, Player::Two));
  }
}

TEST(Ann, MutationRespectsWeightBounds) {
  Rng rng{3};
  AnnController a = AnnController::random(rng, 2.0);
  for (int i = 0; i < 20; ++i) a.mutate(rng, 1.5);
  for (double p : a.parameters()) {
    EXPECT_LE(p, kAnnWeightBound);
    EXPECT_GE(p, -kAnnWeightBound);
  }
}

TEST(Ann, DumpLoadRoundTrip) {
  Rng rng{9};
  const AnnController a = AnnController::random(rng);
  EXPECT_EQ(AnnController::load(a.dump()), a);
  EXPECT_EQ(a.dump().substr(0, 20), "layers 64 91 40 10 1");
  EXPECT_THROW(AnnController::load("layers 64 90 40 10 1\n0\n"), std::invalid_argument);
  EXPECT_THROW(AnnController::load("0.5\n"), std::invalid_argument);
}

TEST(Ann, AgentReturnsLegalMove) {
  Rng rng{21};
  const AnnController a = AnnController::random(rng);
  const AnnAgent agent{a};
  for (int g = 1; g <= 4; ++g) {
    const RuleSet r = fixtureRules(g);
    const MatchRecord rec = playout(r, agent, agent, 0);
    EXPECT_GE(rec.plies, 1);
    EXPECT_LE(rec.plies, kMaxPlies);
  }
}

TEST(Ann, MaterialNetPrefersCaptures) {
  const RuleSet r = testing::uniformRules(Movement::AllDirs, StepSize::Single, Capture::StepInto);
  GameState s;
  s.place(*Square::parse("d4"), Player::One, 1);
  s.place(*Square::parse("e5"), Player::Two, 1);
  s.place(*Square::parse("a8"), Player::Two, 1);
  const auto moves = legalMoves(s, r);
  const AnnController net = materialNet();
  Rng rng{0};
  const Move m = AnnAgent{net}.chooseMove(s, r, moves, rng);
  EXPECT_TRUE(m.isCapture());
}

TEST(Ann, CoevolutionScoring) {
  MatchRecord rec;
  rec.status = {Outcome::Won, Player::Two, EndReason::NoMoves};
  EXPECT_EQ(coevolutionScore(rec, Player::Two), 1);
  EXPECT_EQ(coevolutionScore(rec, Player::One), -2);
  rec.status = {Outcome::Draw, Player::One, EndReason::MoveCap};
  EXPECT_EQ(coevolutionScore(rec, Player::One), 0);
}

TEST(Coevolution, DominantSeedEndsAtFirstIteration) {
  const RuleSet r = fixtureRules(4);
  CoevolutionConfig config;
  config.population = 4;
  config.opponents = 3;
  config.maxIterations = 1;
  config.initialPopulation = {materialNet(), AnnController{}, AnnController{}, AnnController{}};
  ASSERT_TRUE(playPairing(r, materialNet(), AnnController{}).beats());
  const LearnabilityResult result = coevolveLearnability(r, config, 1);
  EXPECT_EQ(result.iterations, 1);
  EXPECT_FALSE(result.capped);
  ASSERT_EQ(result.trace.size(), 1u);
  EXPECT_EQ(result.trace[0].bestDefeated, 3);
}

TEST(Coevolution, BoundedByCapAndDeterministic) {
  const RuleSet r = fixtureRules(1);
  CoevolutionConfig config;
  config.population = 6;
  config.opponents = 2;
  config.maxIterations = 3;
  const LearnabilityResult a = coevolveLearnability(r, config, 17);
  const LearnabilityResult b = coevolveLearnability(r, config, 17);
  EXPECT_LE(a.iterations, config.maxIterations);
  EXPECT_GE(a.iterations, 1);
  EXPECT_EQ(a.capped, a.iterations == config.maxIterations && a.trace.back().bestDefeated < config.population - 1);
  EXPECT_EQ(a.iterations, b.iterations);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    EXPECT_EQ(a.trace[i].bestRoundRobinScore, b.trace[i].bestRoundRobinScore);
    EXPECT_EQ(a.trace[i].meanScore, b.trace[i].meanScore);
  }
}

}  // namespace
}  // namespace boardgen
