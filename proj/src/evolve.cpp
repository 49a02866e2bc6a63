#include "boardgen/evolve.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "boardgen/parallel.hpp"

namespace boardgen {

using nlohmann::json;

namespace {

int archiveIndex(Metric m) {
  const auto it = std::find(kArchiveOrder.begin(), kArchiveOrder.end(), m);
  return static_cast<int>(it - kArchiveOrder.begin());
}

json metricsToJson(const MetricsVector& m) {
  return {{"D", m.durationRaw}, {"Dscaled", m.durationScaled}, {"I", m.intelligence},
          {"Dyn", m.dynamism},  {"U", m.usability},            {"n", m.n}};
}

MetricsVector metricsFromJson(const json& j) {
  MetricsVector m;
  m.durationRaw = j.at("D").get<double>();
  m.durationScaled = j.at("Dscaled").get<double>();
  m.intelligence = j.at("I").get<double>();
  m.dynamism = j.at("Dyn").get<double>();
  m.usability = j.at("U").get<double>();
  m.n = j.at("n").get<int>();
  return m;
}

std::string readWholeFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

double fitnessDifference(const MetricsVector& parent, const MetricsVector& child) {
  double total = 0.0;
  for (Metric axis : kMetrics) {
    const double p = axisValue(parent, axis);
    const double c = axisValue(child, axis);
    if (p == 0.0) total += c == 0.0 ? 1.0 : kFitnessTermCap;
    else total += std::min(c / p, kFitnessTermCap);
  }
  return total;
}

const std::optional<ArchiveEntry>& Archive::slot(Metric m, int k) const {
  if (k < 1 || k > kSlotsPerMetric) throw std::out_of_range("archive slot must be 1 or 2");
  return slots_[archiveIndex(m) * kSlotsPerMetric + (k - 1)];
}

std::optional<double> Archive::value(int game) const {
  const auto& e = slots_.at(game);
  if (!e) return std::nullopt;
  return axisValue(e->metrics, kArchiveOrder[game / kSlotsPerMetric]);
}

bool Archive::offer(const Chromosome& c, const MetricsVector& m) {
  bool changed = false;
  for (std::size_t k = 0; k < kArchiveOrder.size(); ++k) {
    auto& first = slots_[k * kSlotsPerMetric];
    auto& second = slots_[k * kSlotsPerMetric + 1];
    if ((first && first->chromosome == c) || (second && second->chromosome == c)) continue;
    const double v = axisValue(m, kArchiveOrder[k]);
    const auto valueOf = [&](const ArchiveEntry& e) { return axisValue(e.metrics, kArchiveOrder[k]); };
    if (!first) {
      first = ArchiveEntry{c, m};
    } else if (v > valueOf(*first)) {
      second = std::move(first);
      first = ArchiveEntry{c, m};
    } else if (!second || v > valueOf(*second)) {
      second = ArchiveEntry{c, m};
    } else {
      continue;
    }
    changed = true;
  }
  return changed;
}

bool Archive::full() const {
  return std::all_of(slots_.begin(), slots_.end(), [](const auto& s) { return s.has_value(); });
}

std::string Archive::toText() const {
  std::string out;
  for (int g = 0; g < kArchiveSize; ++g) {
    const auto metric = toString(kArchiveOrder[g / kSlotsPerMetric]);
    const int k = g % kSlotsPerMetric + 1;
    const auto& e = slots_[g];
    if (!e) {
      out += fmt::format("{} {} empty\n", metric, k);
      continue;
    }
    const auto& m = e->metrics;
    out += fmt::format("{} {} {} {} {} {} {} {} {}\n", metric, k, e->chromosome.toString(), m.durationRaw,
                       m.durationScaled, m.intelligence, m.dynamism, m.usability, m.n);
  }
  return out;
}

Archive Archive::fromText(const std::string& text) {
  Archive a;
  std::istringstream in(text);
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty() || line.front() == '#') continue;
    std::istringstream fields(line);
    std::string metricName;
    int k = 0;
    std::string chromosome;
    if (!(fields >> metricName >> k >> chromosome) || k < 1 || k > kSlotsPerMetric)
      throw std::invalid_argument(fmt::format("archive line {}: expected '<metric> <slot> <chromosome> ...'", lineNo));
    const int g = archiveIndex(parseMetric(metricName)) * kSlotsPerMetric + (k - 1);
    if (chromosome == "empty") {
      a.slots_[g].reset();
      continue;
    }
    ArchiveEntry e{Chromosome::parse(chromosome), {}};
    std::string d, ds, i, dyn, u;
    if (!(fields >> d >> ds >> i >> dyn >> u >> e.metrics.n))
      throw std::invalid_argument(fmt::format("archive line {}: expected six metric fields", lineNo));
    e.metrics.durationRaw = std::stod(d);
    e.metrics.durationScaled = std::stod(ds);
    e.metrics.intelligence = std::stod(i);
    e.metrics.dynamism = std::stod(dyn);
    e.metrics.usability = std::stod(u);
    a.slots_[g] = std::move(e);
  }
  return a;
}

Archive updateArchive(Archive a, const Chromosome& c, const MetricsVector& m) {
  a.offer(c, m);
  return a;
}

MetricsVector evaluateChromosome(const Chromosome& c, const StepConfig& config) {
  return evaluate(decode(c), deriveSeed(config.evaluationSeed, c.toString()), config.evaluation).metrics;
}

StepResult familyStep(const Family& f, Rng& rng, const StepConfig& config) {
  StepResult res;
  res.next = f;
  res.child = mutate(f.parent, rng, config.mutationRate);
  try {
    res.childMetrics = evaluateChromosome(res.child, config);
  } catch (const std::exception& e) {
    res.failed = true;
    res.error = e.what();
    return res;
  }
  res.difference = fitnessDifference(f.parentMetrics, res.childMetrics);
  res.promoted = promotes(res.difference);
  if (res.promoted) {
    res.next.parent = res.child;
    res.next.parentMetrics = res.childMetrics;
  }
  return res;
}

std::string TraceRecord::toJsonLine() const {
  json j;
  j["iteration"] = iteration;
  j["family"] = family;
  j["parent"] = parent.toString();
  j["parentMetrics"] = metricsToJson(parentMetrics);
  j["child"] = child.toString();
  j["childMetrics"] = metricsToJson(childMetrics);
  j["difference"] = difference;
  j["promoted"] = promoted;
  j["failed"] = failed;
  j["error"] = error;
  j["ff"] = {{"parent", parentFitness}, {"child", childFitness}};
  json slots = json::array();
  for (const auto& v : archive) slots.push_back(v ? json(*v) : json(nullptr));
  j["archive"] = std::move(slots);
  return j.dump();
}

TraceRecord TraceRecord::fromJsonLine(const std::string& line) {
  const json j = json::parse(line);
  TraceRecord t;
  t.iteration = j.at("iteration").get<int>();
  t.family = j.at("family").get<int>();
  t.parent = Chromosome::parse(j.at("parent").get<std::string>());
  t.parentMetrics = metricsFromJson(j.at("parentMetrics"));
  t.child = Chromosome::parse(j.at("child").get<std::string>());
  t.childMetrics = metricsFromJson(j.at("childMetrics"));
  t.difference = j.at("difference").get<double>();
  t.promoted = j.at("promoted").get<bool>();
  t.failed = j.at("failed").get<bool>();
  t.error = j.at("error").get<std::string>();
  t.parentFitness = j.at("ff").at("parent").get<double>();
  t.childFitness = j.at("ff").at("child").get<double>();
  const auto& slots = j.at("archive");
  if (slots.size() != kArchiveSize) throw std::invalid_argument("trace record needs 8 archive values");
  for (int g = 0; g < kArchiveSize; ++g)
    if (!slots[g].is_null()) t.archive[g] = slots[g].get<double>();
  return t;
}

EvolutionResult runEvolution(const EvolutionConfig& config) {
  if (config.families < 1) throw std::invalid_argument("evolution needs at least one family");
  if (config.iterations < 1) throw std::invalid_argument("evolution needs at least one iteration");
  const auto count = static_cast<std::size_t>(config.families);
  StepConfig step = config.step;
  step.evaluationSeed = deriveSeed(config.seed, "evaluation");

  EvolutionResult result;
  result.families.resize(count);
  parallelFor(count, config.threads, [&](std::size_t i) {
    Family& f = result.families[i];
    f.id = static_cast<int>(i) + 1;
    Rng init{deriveSeed(config.seed, "family-init", f.id)};
    f.parent = randomChromosome(init);
    f.parentMetrics = evaluateChromosome(f.parent, step);
  });
  for (const auto& f : result.families) result.archive.offer(f.parent, f.parentMetrics);

  std::vector<Rng> rngs;
  for (std::size_t i = 0; i < count; ++i) rngs.emplace_back(deriveSeed(config.seed, "family", i + 1));

  std::vector<StepResult> steps(count);
  for (int iteration = 1; iteration <= config.iterations; ++iteration) {
    parallelFor(count, config.threads,
                [&](std::size_t i) { steps[i] = familyStep(result.families[i], rngs[i], step); });

    // Parents occupy the first half of the ranked population, children the second.
    std::vector<MetricsVector> population;
    for (const auto& f : result.families) population.push_back(f.parentMetrics);
    for (const auto& s : steps) population.push_back(s.childMetrics);
    const auto ranks = rankPopulation(population, config.weights);

    for (const auto& s : steps)
      if (!s.failed) result.archive.offer(s.child, s.childMetrics);

    std::array<std::optional<double>, kArchiveSize> snapshot{};
    for (int g = 0; g < kArchiveSize; ++g) snapshot[g] = result.archive.value(g);

    for (std::size_t i = 0; i < count; ++i) {
      TraceRecord t;
      t.iteration = iteration;
      t.family = result.families[i].id;
      t.parent = result.families[i].parent;
      t.parentMetrics = result.families[i].parentMetrics;
      t.child = steps[i].child;
      t.childMetrics = steps[i].childMetrics;
      t.difference = steps[i].difference;
      t.promoted = steps[i].promoted;
      t.failed = steps[i].failed;
      t.error = steps[i].error;
      t.parentFitness = ranks[i].combined;
      t.childFitness = ranks[count + i].combined;
      t.archive = snapshot;
      result.trace.push_back(std::move(t));
      result.families[i] = steps[i].next;
    }
  }
  return result;
}

void writeEvolutionOutput(const EvolutionResult& result, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const auto base = std::filesystem::path(dir);
  std::ofstream archive(base / "archive.txt");
  archive << result.archive.toText();
  std::ofstream trace(base / "trace.jsonl");
  for (const auto& t : result.trace) trace << t.toJsonLine() << '\n';
  if (!archive || !trace) throw std::runtime_error("failed writing evolution output to " + dir);
}

std::vector<TraceRecord> readTrace(const std::string& path) {
  std::istringstream in(readWholeFile(path));
  std::vector<TraceRecord> out;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(TraceRecord::fromJsonLine(line));
  return out;
}

Archive readArchive(const std::string& path) { return Archive::fromText(readWholeFile(path)); }

}  // namespace boardgen
