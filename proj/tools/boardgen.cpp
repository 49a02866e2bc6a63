// Command-line entry point. Every subcommand is a thin layer over the library.
//
// Seeds: all randomness flows from --seed. Each component derives its own
// stream as splitmix64(seed ^ fnv1a(label)), with labels such as
// "evaluation", "family/<id>", "simulate/<k>", "learnability/<r>" and
// "p-value", so any stage can be rerun on its own.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <nlohmann/json.hpp>

#include "boardgen/analysis.hpp"
#include "boardgen/evolve.hpp"
#include "boardgen/metrics.hpp"
#include "boardgen/playout.hpp"
#include "boardgen/service.hpp"

namespace fs = std::filesystem;
using namespace boardgen;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kValidation = 2, kRuntime = 3 };

// Raised for inputs that parse but make no sense (bad chromosome, empty
// archive slot, unknown agent).
struct InvalidInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

RuleSet loadRules(const std::string& path) {
  const Chromosome c = readChromosomeFile(path);
  return decode(c);
}

std::vector<DiversityEntry> loadDiversityInput(const std::string& path) {
  if (fs::is_directory(path)) return diversityEntries(readArchive((fs::path(path) / "archive.txt").string()));
  if (fs::path(path).extension() == ".csv") return readDiversityTable(path);
  return diversityEntries(readArchive(path));
}

std::unique_ptr<Agent> agentFor(const std::string& kind) {
  try {
    return makeAgent(kind);
  } catch (const std::invalid_argument&) {
    throw InvalidInput(fmt::format("unknown agent '{}'; expected random or minimax", kind));
  }
}

NullModel parseNull(const std::string& text) {
  NullModel m;
  if (std::sscanf(text.c_str(), "%lf,%lf,%lf", &m.minus, &m.zero, &m.plus) != 3)
    throw InvalidInput("--null expects three comma-separated probabilities for -1,0,+1");
  return m;
}

std::string renderTrace(const std::vector<TraceRecord>& trace) {
  std::string out = "iter fam  promoted difference  parent(D Dyn I U)            child(D Dyn I U)\n";
  int promoted = 0;
  for (const auto& r : trace) {
    promoted += r.promoted;
    const auto& p = r.parentMetrics;
    const auto& c = r.childMetrics;
    out += fmt::format("{:4} {:3}  {:8} {:10.4f}  {:.1f} {:.3f} {:.3f} {:.3f}  {:.1f} {:.3f} {:.3f} {:.3f}{}\n", r.iteration,
                       r.family, r.promoted ? "yes" : "no", r.difference, p.durationScaled, p.dynamism,
                       p.intelligence, p.usability, c.durationScaled, c.dynamism, c.intelligence, c.usability,
                       r.failed ? "  FAILED: " + r.error : "");
  }
  out += fmt::format("{} records, {} promotions\n", trace.size(), promoted);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evolve, evaluate and analyse generated board games"};
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  int threads = 0;
  app.add_option("--seed", seed, "Root seed for every random stream")->capture_default_str();
  app.add_option("--threads", threads, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);

  // evolve
  auto* evolveCmd = app.add_subcommand("evolve", "Run the family evolution and write archive.txt and trace.jsonl");
  EvolutionConfig evo;
  std::string evolveOut;
  evolveCmd->add_option("--seed", seed, "Root seed");
  evolveCmd->add_option("--iterations", evo.iterations)->check(CLI::PositiveNumber)->capture_default_str();
  evolveCmd->add_option("--families", evo.families)->check(CLI::PositiveNumber)->capture_default_str();
  evolveCmd->add_option("--n", evo.step.evaluation.playouts, "Playouts per metric")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  evolveCmd->add_option("--mutation-rate", evo.step.mutationRate)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  evolveCmd->add_option("--weights", evo.weights, "w1..w4 for duration, intelligence, dynamism, usability")
      ->expected(4);
  evolveCmd->add_option("--out", evolveOut, "Output directory")->required();
  evolveCmd->add_option("--threads", threads);

  // eval
  auto* evalCmd = app.add_subcommand("eval", "Evaluate one chromosome");
  std::string chromosomeFile;
  EvaluationConfig evalCfg;
  evalCmd->add_option("--chromosome", chromosomeFile)->required()->check(CLI::ExistingFile);
  evalCmd->add_option("--n", evalCfg.playouts)->check(CLI::PositiveNumber)->capture_default_str();
  evalCmd->add_option("--seed", seed);
  bool evalRecords = false;
  evalCmd->add_flag("--records", evalRecords, "Also print every MatchRecord as a JSON line");

  // simulate
  auto* simCmd = app.add_subcommand("simulate", "Play games and print one MatchRecord JSON line each");
  int simGames = 1;
  std::vector<std::string> simAgents{"random", "random"};
  simCmd->add_option("--chromosome", chromosomeFile)->required()->check(CLI::ExistingFile);
  simCmd->add_option("--games", simGames)->check(CLI::PositiveNumber)->capture_default_str();
  simCmd->add_option("--agents", simAgents, "Agent for One and Two")->delimiter(',')->expected(2);
  simCmd->add_option("--seed", seed);

  // diversity
  auto* divCmd = app.add_subcommand("diversity", "Per-game diversity counts and the most diverse games");
  std::string archivePath;
  double threshold = kDiversityThreshold;
  int pick = 3;
  divCmd->add_option("--archive", archivePath, "Evolution output directory, archive.txt, or a CSV metric table")
      ->required()
      ->check(CLI::ExistingPath);
  divCmd->add_option("--threshold", threshold)->capture_default_str();
  divCmd->add_option("--k", pick, "Games to select")->check(CLI::PositiveNumber)->capture_default_str();

  // learnability
  auto* learnCmd = app.add_subcommand("learnability", "Coevolve game players and report iterations to dominance");
  std::vector<std::string> learnGames;
  std::string randomGame;
  std::string learnConfigFile;
  LearnabilityConfig learn;
  learnCmd->add_option("--games", learnGames, "Evolved chromosome files")->required()->check(CLI::ExistingFile);
  learnCmd->add_option("--random-game", randomGame, "The randomly generated reference game")
      ->check(CLI::ExistingFile);
  learnCmd->add_option("--config", learnConfigFile,
                       "JSON with population, opponents, sigma, maxIterations, repetitions")
      ->check(CLI::ExistingFile);
  auto* optPopulation = learnCmd->add_option("--population", learn.coevolution.population)->check(CLI::PositiveNumber);
  auto* optOpponents = learnCmd->add_option("--opponents", learn.coevolution.opponents)->check(CLI::PositiveNumber);
  auto* optSigma = learnCmd->add_option("--sigma", learn.coevolution.sigma)->check(CLI::PositiveNumber);
  auto* optMax = learnCmd->add_option("--max-iterations", learn.coevolution.maxIterations)->check(CLI::PositiveNumber);
  auto* optReps = learnCmd->add_option("--repetitions", learn.repetitions)->check(CLI::PositiveNumber);
  learnCmd->add_option("--seed", seed);
  learnCmd->add_option("--threads", threads);

  // survey-stats
  auto* surveyCmd = app.add_subcommand("survey-stats", "Correlation, p-value and decision per game");
  std::string ratingsFile;
  double alpha = kSurveyAlpha;
  std::string coding = "signed";
  long trials = kDefaultTrials;
  std::string nullText = "0.333333333333333333,0.333333333333333333,0.333333333333333334";
  surveyCmd->add_option("--ratings", ratingsFile)->required()->check(CLI::ExistingFile);
  surveyCmd->add_option("--alpha", alpha)->capture_default_str();
  surveyCmd->add_option("--coding", coding, "signedCoding or no-as-zero")
      ->check(CLI::IsMember({"signed", "no-as-zero"}))
      ->capture_default_str();
  surveyCmd->add_option("--trials", trials, "Monte Carlo draws when exact enumeration is too large")
      ->check(CLI::PositiveNumber);
  surveyCmd->add_option("--null", nullText, "P(-1),P(0),P(+1) under the null");
  surveyCmd->add_option("--seed", seed);

  // serve
  auto* serveCmd = app.add_subcommand("serve", "Start the play and survey HTTP service");
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string serveArchive;
  std::string serveRatings = "ratings.jsonl";
  std::string fixtureDir = BOARDGEN_FIXTURE_DIR;
  serveCmd->add_option("--port", port)->check(CLI::Range(0, 65535))->capture_default_str();
  serveCmd->add_option("--host", host)->capture_default_str();
  serveCmd->add_option("--archive", serveArchive, "Evolution output directory whose archive is offered for play")
      ->check(CLI::ExistingDirectory);
  serveCmd->add_option("--ratings", serveRatings, "Append-only ratings file")->capture_default_str();
  serveCmd->add_option("--fixtures", fixtureDir, "Directory with game1..game4.chrom")->capture_default_str();
  serveCmd->add_option("--seed", seed);

  // report
  auto* reportCmd = app.add_subcommand("report", "Render a trace or archive as text");
  std::string reportTrace;
  std::string reportArchive;
  reportCmd->add_option("--trace", reportTrace)->check(CLI::ExistingFile);
  reportCmd->add_option("--archive", reportArchive)->check(CLI::ExistingPath);
  reportCmd->require_option(1, 2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e, std::cerr, std::cerr);
    return kUsage;
  }

  try {
    if (*evolveCmd) {
      evo.seed = seed;
      evo.threads = threads;
      const auto result = runEvolution(evo);
      writeEvolutionOutput(result, evolveOut);
      std::cerr << fmt::format("wrote {} trace records to {}\n", result.trace.size(), evolveOut);
    } else if (*evalCmd) {
      const RuleSet rules = loadRules(chromosomeFile);
      const Evaluation e = evaluate(rules, seed, evalCfg);
      std::cout << formatMetricsLine(e.metrics) << '\n';
      if (evalRecords) {
        for (const auto& r : e.randomGames) std::cout << r.toJsonLine() << '\n';
        for (const auto& r : e.minimaxGames) std::cout << r.toJsonLine() << '\n';
      }
    } else if (*simCmd) {
      const Chromosome c = readChromosomeFile(chromosomeFile);
      const RuleSet rules = decode(c);
      const auto one = agentFor(simAgents.at(0));
      const auto two = agentFor(simAgents.at(1));
      for (int k = 0; k < simGames; ++k) {
        MatchRecord rec = playout(rules, *one, *two, deriveSeed(seed, "simulate", static_cast<std::uint64_t>(k)));
        rec.chromosome = c;
        std::cout << rec.toJsonLine() << '\n';
      }
    } else if (*divCmd) {
      const auto games = loadDiversityInput(archivePath);
      const auto counts = diversityCount(games, threshold);
      std::cout << "game archived count\n";
      for (std::size_t g = 0; g < games.size(); ++g)
        std::cout << fmt::format("{} {} {}\n", g + 1, toString(games[g].archivedUnder), counts[g]);
      std::vector<int> selected;
      for (int i : selectDiverse(counts, pick)) selected.push_back(i + 1);
      std::cout << fmt::format("selected {}\n", fmt::join(selected, " "));
    } else if (*learnCmd) {
      if (!learnConfigFile.empty()) {
        std::ifstream in(learnConfigFile);
        const auto j = nlohmann::json::parse(in);
        // Flags given on the command line win over the file.
        auto take = [&](const char* key, auto& dst, CLI::Option* flag) {
          if (j.contains(key) && flag->count() == 0) j.at(key).get_to(dst);
        };
        take("population", learn.coevolution.population, optPopulation);
        take("opponents", learn.coevolution.opponents, optOpponents);
        take("sigma", learn.coevolution.sigma, optSigma);
        take("maxIterations", learn.coevolution.maxIterations, optMax);
        take("repetitions", learn.repetitions, optReps);
      }
      learn.seed = seed;
      learn.threads = threads;
      std::vector<LearnabilityGame> games;
      for (const auto& f : learnGames) games.push_back({fs::path(f).stem().string(), loadRules(f), false});
      if (!randomGame.empty()) games.push_back({fs::path(randomGame).stem().string(), loadRules(randomGame), true});
      std::cout << learnabilityExperiment(games, learn).toText();
    } else if (*surveyCmd) {
      const NullModel null = parseNull(nullText);
      const auto ratings = readRatings(ratingsFile);
      const auto samples = surveySamples(ratings, coding == "signed" ? SurveyCoding::Signed : SurveyCoding::NoAsZero);
      std::cout << "game N c p method reject\n";
      for (const auto& [game, sample] : samples) {
        const double c = correlationC(sample);
        const PValue p = pValue(c, sample.size(), null, trials, seed);
        std::cout << fmt::format("{} {} {} {:.9g} {} {}\n", game, sample.size(), c, p.p,
                                 p.exact ? "exact" : fmt::format("monte-carlo({})", p.trials),
                                 p.reject(alpha) ? "yes" : "no");
      }
    } else if (*serveCmd) {
      auto catalog = service::GameCatalog::builtin(fixtureDir);
      if (!serveArchive.empty()) catalog.addArchive(readArchive((fs::path(serveArchive) / "archive.txt").string()));
      service::RatingsStore store(serveRatings);
      service::Server server(std::move(catalog), store, {seed});
      const int bound = server.bind(host, port);
      std::cerr << fmt::format("listening on http://{}:{}\n", host, bound);
      server.run();
    } else if (*reportCmd) {
      if (!reportTrace.empty()) std::cout << renderTrace(readTrace(reportTrace));
      if (!reportArchive.empty()) {
        const auto path =
            fs::is_directory(reportArchive) ? (fs::path(reportArchive) / "archive.txt").string() : reportArchive;
        std::cout << readArchive(path).toText();
      }
    }
  } catch (const ValidationError& e) {
    std::cerr << "invalid chromosome:\n";
    for (const auto& v : e.violations()) std::cerr << fmt::format("  gene {}: {}\n", v.gene, v.message);
    return kValidation;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
