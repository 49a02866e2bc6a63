#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "boardgen/analysis.hpp"
#include "boardgen/evolve.hpp"
#include "boardgen/genome.hpp"

namespace boardgen::service {

struct GameEntry {
  std::string id;    // used on the wire as gameRef
  std::string name;  // display name
  std::string source;  // "builtin" or "archive"
  Chromosome chromosome;
};

class GameCatalog {
 public:
  void add(GameEntry e);
  const GameEntry* find(const std::string& id) const;
  const std::vector<GameEntry>& games() const { return games_; }

  /// The four built-in games from `fixtureDir`/game{1..4}.chrom.
  static GameCatalog builtin(const std::string& fixtureDir);
  /// Adds every occupied archive slot as "archive-<metric>-<slot>".
  void addArchive(const Archive& a);

 private:
  std::vector<GameEntry> games_;
};

/// Append-only ratings file, one JSON record per line. Existing records are
/// loaded on construction, so the store survives restarts.
class RatingsStore {
 public:
  explicit RatingsStore(std::string path);

  enum class AddResult { Stored, Duplicate };
  /// At most one record per (subject, game, run).
  AddResult add(const RatingRecord& r);
  std::vector<RatingRecord> records() const;
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  mutable std::mutex mutex_;
  std::vector<RatingRecord> records_;
};

struct ServiceOptions {
  std::uint64_t seed = 0;  // agent randomness per session derives from this
};

/// HTTP front end for human play sessions and survey ratings.
///
///   POST /sessions                    {gameRef, humanSide, opponent, runIndex?}
///   GET  /sessions/{id}
///   GET  /sessions/{id}/moves?from=CELL[&prefix=c1,c2]
///   POST /sessions/{id}/moves         {from, to, chainPath?}
///   GET  /sessions/{id}/events        server-sent events, one per state change
///   POST /ratings                     {subjectId, gameId, runIndex, code}
///   GET  /games
class Server {
 public:
  Server(GameCatalog catalog, RatingsStore& ratings, ServiceOptions options = {});
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds to host:port (port 0 picks a free one) and returns the port.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace boardgen::service
