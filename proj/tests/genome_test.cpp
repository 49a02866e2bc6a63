#include <gtest/gtest.h>

#include <filesystem>
#include <set>

#include "boardgen/genome.hpp"
#include "support/test_support.hpp"

namespace boardgen {
namespace {

using testing::fixtureChromosome;

Chromosome validChromosome() {
  Rng rng{7};
  return randomChromosome(rng);
}

TEST(Genome, GeneRangesFollowLayout) {
  EXPECT_EQ(geneRange(0).hi, 6);
  EXPECT_EQ(geneRange(23).lo, 0);
  EXPECT_EQ(geneRange(24).lo, 1);
  EXPECT_EQ(geneRange(29).hi, 6);
  EXPECT_EQ(geneRange(30).hi, 1);
  EXPECT_EQ(geneRange(41).hi, 1);
  EXPECT_EQ(geneRange(42).hi, 6);
  EXPECT_EQ(geneRange(48).hi, 6);
  EXPECT_EQ(geneRange(49).hi, 1);
  EXPECT_THROW(geneRange(50), std::out_of_range);
}

TEST(Genome, DecodeFixtureOne) {
  const RuleSet r = decode(fixtureChromosome(1));
  // gene 25 = 4: type 1 moves in an L.
  EXPECT_EQ(r.rules(1).movement, Movement::LShape);
  EXPECT_EQ(r.rules(1).step, StepSize::Multiple);
  EXPECT_EQ(r.rules(1).capture, Capture::StepInto);
  // gene 44 = 6: type 1 converts to type 6.
  EXPECT_EQ(r.rules(1).conversion, PieceType{6});
  EXPECT_EQ(r.rules(2).movement, Movement::DiagFwdBack);
  EXPECT_EQ(r.rules(2).capture, Capture::StepOver);
  EXPECT_EQ(r.rules(3).conversion, std::nullopt);
  EXPECT_EQ(r.pieceOfHonor, PieceType{5});
  EXPECT_FALSE(r.mandatoryCapture);
}

TEST(Genome, DecodeZeroHonorMeansNone) {
  Chromosome c = validChromosome();
  c.genes[kHonorGene] = 0;
  EXPECT_EQ(decode(c).pieceOfHonor, std::nullopt);
}

TEST(Genome, DecodeMapsMovementEnumerationInOrder) {
  Chromosome c = validChromosome();
  const Movement expected[] = {Movement::DiagFwd, Movement::DiagFwdBack, Movement::AllDirs,
                               Movement::LShape,  Movement::StraightFwdBack, Movement::StraightFwd};
  for (int v = 1; v <= 6; ++v) {
    c.genes[kMovementBegin] = v;
    EXPECT_EQ(decode(c).rules(1).movement, expected[v - 1]);
  }
}

TEST(Genome, DecodeRejectsInvalidChromosomeNamingGene) {
  Chromosome c = validChromosome();
  c.genes[26] = 7;
  try {
    decode(c);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    ASSERT_EQ(e.violations().size(), 1u);
    EXPECT_EQ(e.violations()[0].gene, 27);
    EXPECT_NE(std::string{e.what()}.find("1-6"), std::string::npos);
  }
}

TEST(Genome, ValidateReportsNoPieces) {
  Chromosome c = validChromosome();
  for (int i = 0; i < kPlacementCells; ++i) c.genes[i] = 0;
  const auto v = validate(c);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].gene, 0);
  EXPECT_NE(v[0].message.find("no pieces"), std::string::npos);
}

TEST(Genome, ValidateReportsEveryViolation) {
  Chromosome c = validChromosome();
  c.genes[26] = 7;   // movement
  c.genes[31] = 2;   // step size
  c.genes[49] = -1;  // mandatory
  const auto v = validate(c);
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v[0].gene, 27);
  EXPECT_NE(v[0].message.find("movement gene 27 = 7 out of range 1-6"), std::string::npos);
  EXPECT_EQ(v[1].gene, 32);
  EXPECT_EQ(v[2].gene, 50);
}

TEST(Genome, StrictPieceCeilingIsOptional) {
  Chromosome c = validChromosome();
  for (int i = 0; i < kPlacementCells; ++i) c.genes[i] = 6;
  EXPECT_TRUE(validate(c).empty());
  EXPECT_EQ(validate(c, ValidationOptions{16}).size(), 1u);
}

TEST(Genome, FixturesValidate) {
  for (int g = 1; g <= 4; ++g) EXPECT_TRUE(validate(fixtureChromosome(g)).empty()) << "game " << g;
}

TEST(Genome, EncodeDecodeRoundTripOnRandomRuleSets) {
  Rng rng{11};
  for (int i = 0; i < 500; ++i) {
    const Chromosome c = randomChromosome(rng);
    const RuleSet r = decode(c);
    EXPECT_EQ(encode(r), c);
    EXPECT_EQ(decode(encode(r)), r);
  }
}

TEST(Genome, TextFormatRoundTrips) {
  const Chromosome c = fixtureChromosome(2);
  const std::string text = c.toString();
  EXPECT_EQ(std::count(text.begin(), text.end(), ','), 49);
  EXPECT_EQ(Chromosome::parse(text), c);
  EXPECT_THROW(Chromosome::parse("1,2,3"), std::invalid_argument);
  EXPECT_THROW(Chromosome::parse(text + ",1"), std::invalid_argument);
  EXPECT_THROW(Chromosome::parse("x" + text), std::invalid_argument);

  const auto path = std::filesystem::temp_directory_path() / "boardgen_genome_test.chrom";
  writeChromosomeFile(path.string(), c);
  EXPECT_EQ(readChromosomeFile(path.string()), c);
  std::filesystem::remove(path);
}

TEST(Genome, RandomChromosomeIsDeterministicPerSeed) {
  Rng a{42};
  Rng b{42};
  EXPECT_EQ(randomChromosome(a), randomChromosome(b));
}

TEST(Genome, RandomChromosomesAlwaysValidate) {
  Rng rng{3};
  for (int i = 0; i < 1000; ++i) ASSERT_TRUE(validate(randomChromosome(rng)).empty());
}

TEST(Genome, RandomChromosomeMandatoryGeneIsFair) {
  Rng rng{5};
  int ones = 0;
  constexpr int kSamples = 10000;
  for (int i = 0; i < kSamples; ++i) ones += randomChromosome(rng).genes[kMandatoryGene];
  EXPECT_NEAR(static_cast<double>(ones) / kSamples, 0.5, 0.05);
}

TEST(Genome, MutationRateZeroIsIdentity) {
  Rng rng{9};
  const Chromosome c = validChromosome();
  for (int i = 0; i < 50; ++i) EXPECT_EQ(mutate(c, rng, 0.0), c);
}

TEST(Genome, MutationRateOneChangesExpectedFraction) {
  // With every gene resampled, a gene keeps its value with probability
  // 1/range, so the expected changed fraction is mean((range-1)/range).
  double expected = 0.0;
  for (int i = 0; i < kGeneCount; ++i) {
    const auto [lo, hi] = geneRange(i);
    const double range = hi - lo + 1;
    expected += (range - 1) / range;
  }
  expected /= kGeneCount;

  Rng rng{13};
  const Chromosome c = validChromosome();
  long changed = 0;
  constexpr int kTrials = 1000;
  for (int t = 0; t < kTrials; ++t) {
    const Chromosome m = mutate(c, rng, 1.0);
    for (int i = 0; i < kGeneCount; ++i) changed += m.genes[i] != c.genes[i];
  }
  EXPECT_NEAR(static_cast<double>(changed) / (kTrials * kGeneCount), expected, 0.01);
}

TEST(Genome, MutationNeverProducesInvalidChromosome) {
  Rng rng{17};
  Chromosome c = validChromosome();
  // Sparse placements make the all-empty repair path reachable.
  for (int i = 1; i < kPlacementCells; ++i) c.genes[i] = 0;
  c.genes[0] = 1;
  for (int i = 0; i < 2000; ++i) {
    const Chromosome m = mutate(c, rng, 0.9);
    ASSERT_TRUE(validate(m).empty());
    c = i % 2 ? m : c;
  }
}

TEST(Genome, MutationIsPureGivenSeed) {
  const Chromosome c = validChromosome();
  Rng a{99};
  Rng b{99};
  EXPECT_EQ(mutate(c, a), mutate(c, b));
}

TEST(Genome, DeriveSeedSeparatesLabels) {
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 100; ++i) seen.insert(deriveSeed(1, "family", i));
  seen.insert(deriveSeed(1, "mutate"));
  seen.insert(deriveSeed(2, "mutate"));
  EXPECT_EQ(seen.size(), 102u);
  EXPECT_EQ(deriveSeed(1, "x", 3), deriveSeed(1, "x/3"));
}

}  // namespace
}  // namespace boardgen
