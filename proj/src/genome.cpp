#include "boardgen/genome.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

#include <fmt/format.h>

namespace boardgen {

GeneRange geneRange(int index) {
  if (index < 0 || index >= kGeneCount) throw std::out_of_range("gene index out of range");
  if (index < kMovementBegin) return {0, 6};
  if (index < kStepBegin) return {1, 6};
  if (index < kHonorGene) return {0, 1};  // step size and capture blocks
  if (index == kMandatoryGene) return {0, 1};
  return {0, 6};  // honor and conversion
}

namespace {

std::string_view blockName(int index) {
  if (index < kMovementBegin) return "placement";
  if (index < kStepBegin) return "movement";
  if (index < kCaptureBegin) return "step size";
  if (index < kHonorGene) return "capture";
  if (index == kHonorGene) return "piece of honor";
  if (index < kMandatoryGene) return "conversion";
  return "mandatory capture";
}

int uniformGene(Rng& rng, int index) {
  const auto [lo, hi] = geneRange(index);
  return std::uniform_int_distribution<int>{lo, hi}(rng);
}

bool placementEmpty(const Chromosome& c) {
  return std::all_of(c.genes.begin(), c.genes.begin() + kPlacementCells, [](int g) { return g == 0; });
}

void resamplePlacement(Chromosome& c, Rng& rng) {
  do {
    for (int i = kPlacementBegin; i < kPlacementCells; ++i) c.genes[i] = uniformGene(rng, i);
  } while (placementEmpty(c));
}

}  // namespace

int Chromosome::pieceCount() const {
  return static_cast<int>(
      std::count_if(genes.begin(), genes.begin() + kPlacementCells, [](int g) { return g != 0; }));
}

std::string Chromosome::toString() const { return fmt::format("{}", fmt::join(genes, ",")); }

Chromosome Chromosome::parse(std::string_view text) {
  Chromosome c;
  int count = 0;
  std::size_t pos = 0;
  while (true) {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    const std::size_t end = std::min(text.find(',', pos), text.size());
    std::string_view field = text.substr(pos, end - pos);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r' ||
                              field.back() == '\n'))
      field.remove_suffix(1);
    if (count >= kGeneCount) throw std::invalid_argument("chromosome has more than 50 genes");
    int value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty())
      throw std::invalid_argument(fmt::format("gene {}: '{}' is not an integer", count + 1, field));
    c.genes[count++] = value;
    if (end == text.size()) break;
    pos = end + 1;
  }
  if (count != kGeneCount)
    throw std::invalid_argument(fmt::format("chromosome has {} genes, expected 50", count));
  return c;
}

Chromosome readChromosomeFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open chromosome file " + path);
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    return Chromosome::parse(line);
  }
  throw std::runtime_error("no chromosome line in " + path);
}

void writeChromosomeFile(const std::string& path, const Chromosome& c) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write chromosome file " + path);
  out << c.toString() << '\n';
}

std::vector<Violation> validate(const Chromosome& c, const ValidationOptions& options) {
  std::vector<Violation> out;
  for (int i = 0; i < kGeneCount; ++i) {
    const auto [lo, hi] = geneRange(i);
    if (c.genes[i] < lo || c.genes[i] > hi) {
      out.push_back({i + 1, fmt::format("{} gene {} = {} out of range {}-{}", blockName(i), i + 1,
                                        c.genes[i], lo, hi)});
    }
  }
  const int pieces = c.pieceCount();
  if (pieces == 0) out.push_back({0, "no pieces: placement genes 1-24 are all zero"});
  if (pieces > options.maxPieces)
    out.push_back({0, fmt::format("{} pieces exceeds the limit of {}", pieces, options.maxPieces)});
  return out;
}

ValidationError::ValidationError(std::vector<Violation> violations)
    : std::runtime_error([&] {
        std::string msg = "invalid chromosome";
        for (const auto& v : violations) msg += "; " + v.message;
        return msg;
      }()),
      violations_(std::move(violations)) {}

std::string_view toString(Movement m) {
  switch (m) {
    case Movement::DiagFwd: return "Diagonal Forward";
    case Movement::DiagFwdBack: return "Diagonal Forward & Backward";
    case Movement::AllDirs: return "All Directions";
    case Movement::LShape: return "L";
    case Movement::StraightFwdBack: return "Straight Forward & Backward";
    case Movement::StraightFwd: return "Straight Forward";
  }
  return "?";
}

std::string_view toString(StepSize s) { return s == StepSize::Single ? "Single" : "Multiple"; }
std::string_view toString(Capture c) { return c == Capture::StepInto ? "Step Into" : "Step Over"; }

RuleSet decode(const Chromosome& c) {
  if (auto v = validate(c); !v.empty()) throw ValidationError(std::move(v));
  RuleSet r;
  for (int i = 0; i < kPlacementCells; ++i) r.placement[i] = static_cast<PieceType>(c.genes[kPlacementBegin + i]);
  for (int t = 0; t < kPieceTypes; ++t) {
    auto& p = r.types[t];
    p.movement = static_cast<Movement>(c.genes[kMovementBegin + t]);
    p.step = static_cast<StepSize>(c.genes[kStepBegin + t]);
    p.capture = static_cast<Capture>(c.genes[kCaptureBegin + t]);
    if (int conv = c.genes[kConversionBegin + t]; conv != 0) p.conversion = static_cast<PieceType>(conv);
  }
  if (int honor = c.genes[kHonorGene]; honor != 0) r.pieceOfHonor = static_cast<PieceType>(honor);
  r.mandatoryCapture = c.genes[kMandatoryGene] == 1;
  return r;
}

Chromosome encode(const RuleSet& r) {
  Chromosome c;
  for (int i = 0; i < kPlacementCells; ++i) c.genes[kPlacementBegin + i] = r.placement[i];
  for (int t = 0; t < kPieceTypes; ++t) {
    const auto& p = r.types[t];
    c.genes[kMovementBegin + t] = static_cast<int>(p.movement);
    c.genes[kStepBegin + t] = static_cast<int>(p.step);
    c.genes[kCaptureBegin + t] = static_cast<int>(p.capture);
    c.genes[kConversionBegin + t] = p.conversion.value_or(0);
  }
  c.genes[kHonorGene] = r.pieceOfHonor.value_or(0);
  c.genes[kMandatoryGene] = r.mandatoryCapture ? 1 : 0;
  return c;
}

Chromosome randomChromosome(Rng& rng) {
  Chromosome c;
  for (int i = kPlacementCells; i < kGeneCount; ++i) c.genes[i] = uniformGene(rng, i);
  resamplePlacement(c, rng);
  return c;
}

Chromosome mutate(const Chromosome& c, Rng& rng, double rate) {
  Chromosome child = c;
  std::bernoulli_distribution flip{rate};
  for (int i = 0; i < kGeneCount; ++i) {
    if (flip(rng)) child.genes[i] = uniformGene(rng, i);
  }
  if (placementEmpty(child)) resamplePlacement(child, rng);
  return child;
}

}  // namespace boardgen
