#include "boardgen/service.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <map>

#include <fmt/format.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "boardgen/agents.hpp"
#include "boardgen/engine.hpp"

namespace boardgen::service {

using nlohmann::json;

void GameCatalog::add(GameEntry e) {
  if (find(e.id)) throw std::invalid_argument("duplicate game id '" + e.id + "'");
  games_.push_back(std::move(e));
}

const GameEntry* GameCatalog::find(const std::string& id) const {
  const auto it = std::find_if(games_.begin(), games_.end(), [&](const GameEntry& g) { return g.id == id; });
  return it == games_.end() ? nullptr : &*it;
}

GameCatalog GameCatalog::builtin(const std::string& fixtureDir) {
  GameCatalog c;
  for (int g = 1; g <= 4; ++g) {
    const auto path = std::filesystem::path(fixtureDir) / fmt::format("game{}.chrom", g);
    const std::string name = g == 4 ? "Random game" : fmt::format("Game {}", g);
    c.add({fmt::format("game{}", g), name, "builtin", readChromosomeFile(path.string())});
  }
  return c;
}

void GameCatalog::addArchive(const Archive& a) {
  for (int g = 0; g < kArchiveSize; ++g) {
    const auto& slot = a.at(g);
    if (!slot) continue;
    const auto metric = toString(kArchiveOrder[g / kSlotsPerMetric]);
    const int k = g % kSlotsPerMetric + 1;
    add({fmt::format("archive-{}-{}", metric, k), fmt::format("Archive {} {}", metric, k), "archive",
         slot->chromosome});
  }
}

RatingsStore::RatingsStore(std::string path) : path_(std::move(path)) {
  if (std::filesystem::exists(path_)) records_ = readRatings(path_);
}

RatingsStore::AddResult RatingsStore::add(const RatingRecord& r) {
  std::lock_guard lock(mutex_);
  const bool duplicate = std::any_of(records_.begin(), records_.end(), [&](const RatingRecord& x) {
    return x.subjectId == r.subjectId && x.gameId == r.gameId && x.runIndex == r.runIndex;
  });
  if (duplicate) return AddResult::Duplicate;
  std::ofstream out(path_, std::ios::app);
  out << r.toJsonLine() << '\n';
  out.flush();
  if (!out) throw std::runtime_error("cannot append to ratings file " + path_);
  records_.push_back(r);
  return AddResult::Stored;
}

std::vector<RatingRecord> RatingsStore::records() const {
  std::lock_guard lock(mutex_);
  return records_;
}

namespace {

struct HttpError : std::runtime_error {
  HttpError(int status, const std::string& what, json detail = nullptr)
      : std::runtime_error(what), status(status), detail(std::move(detail)) {}
  int status;
  json detail;
};

json cellList(const std::vector<Square>& cells) {
  json out = json::array();
  for (Square s : cells) out.push_back(s.name());
  return out;
}

json moveJson(const Move& m) {
  return {{"from", m.from.name()},
          {"to", m.to.name()},
          {"path", cellList(m.path)},
          {"captures", cellList(m.captures)},
          {"convertsTo", m.convertsTo ? json(*m.convertsTo) : json(nullptr)},
          {"notation", m.toString()}};
}

json movesJson(std::span<const Move> moves) {
  json out = json::array();
  for (const auto& m : moves) out.push_back(moveJson(m));
  return out;
}

json rulesJson(const RuleSet& r) {
  json types = json::array();
  for (int t = 1; t <= kPieceTypes; ++t) {
    const auto& p = r.rules(static_cast<PieceType>(t));
    types.push_back({{"type", t},
                     {"movement", toString(p.movement)},
                     {"stepSize", toString(p.step)},
                     {"capture", toString(p.capture)},
                     {"conversion", p.conversion ? json(*p.conversion) : json(nullptr)}});
  }
  return {{"types", types},
          {"pieceOfHonor", r.pieceOfHonor ? json(*r.pieceOfHonor) : json(nullptr)},
          {"mandatoryCapture", r.mandatoryCapture}};
}

json statusJson(const Status& s) {
  return {{"outcome", toString(s.outcome)},
          {"winner", s.outcome == Outcome::Won ? json(toString(s.winner)) : json(nullptr)},
          {"reason", toString(s.reason)}};
}

Square parseCell(const json& v, const char* field) {
  if (!v.is_string()) throw HttpError(400, fmt::format("'{}' must be a cell name like \"d4\"", field));
  const auto sq = Square::parse(v.get<std::string>());
  if (!sq) throw HttpError(400, fmt::format("'{}' is not a cell: {}", field, v.get<std::string>()));
  return *sq;
}

Player parseSide(const std::string& s) {
  if (s == "One" || s == "one") return Player::One;
  if (s == "Two" || s == "two") return Player::Two;
  throw HttpError(400, "humanSide must be \"One\" or \"Two\"");
}

json parseBody(const httplib::Request& req) {
  try {
    json j = json::parse(req.body);
    if (!j.is_object()) throw HttpError(400, "request body must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw HttpError(400, fmt::format("malformed JSON body: {}", e.what()));
  }
}

template <typename T>
T field(const json& body, const char* name) {
  const auto it = body.find(name);
  if (it == body.end()) throw HttpError(400, fmt::format("missing field '{}'", name));
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw HttpError(400, fmt::format("field '{}' has the wrong type", name));
  }
}

struct HistoryEntry {
  std::string by;  // "human" or "agent"
  Player player;
  int ply;  // ply count before the move
  Move move;
};

struct Session {
  std::string id;
  GameEntry game;
  RuleSet rules;
  Player human = Player::One;
  std::string opponentKind;
  std::unique_ptr<Agent> agent;
  Rng rng;
  int runIndex = 1;
  GameState state;
  std::vector<HistoryEntry> history;

  std::mutex mutex;
  std::condition_variable changed;
  std::vector<std::string> events;  // serialized states, append-only

  json stateJson() const {
    json board = json::array();
    for (int k = 0; k < kCells; ++k)
      if (const auto& p = state.board[k])
        board.push_back({{"cell", Square{k}.name()}, {"owner", toString(p->owner)}, {"type", p->type}});
    json hist = json::array();
    for (const auto& h : history)
      hist.push_back({{"by", h.by}, {"player", toString(h.player)}, {"ply", h.ply}, {"move", moveJson(h.move)}});
    std::string awaiting = "none";
    if (state.status.ongoing()) awaiting = state.sideToMove == human ? "human" : "agent";
    return {{"sessionId", id},        {"gameRef", game.id},       {"humanSide", toString(human)},
            {"opponent", opponentKind}, {"runIndex", runIndex},   {"board", board},
            {"sideToMove", toString(state.sideToMove)}, {"ply", state.ply}, {"status", statusJson(state.status)},
            {"awaiting", awaiting},    {"history", hist}};
  }

  // Caller holds `mutex`.
  void apply(const Move& m, const char* by) {
    history.push_back({by, state.sideToMove, state.ply, m});
    state = applyMove(state, rules, m);
    events.push_back(stateJson().dump());
    changed.notify_all();
  }

  // Lets the agent move while it is its turn. Caller holds `mutex`.
  std::optional<Move> agentReply() {
    std::optional<Move> last;
    while (state.status.ongoing() && state.sideToMove != human) {
      const auto legal = legalMoves(state, rules);
      const Move m = agent->chooseMove(state, rules, legal, rng);
      apply(m, "agent");
      last = m;
    }
    return last;
  }
};

}  // namespace

struct Server::Impl {
  GameCatalog catalog;
  RatingsStore& ratings;
  ServiceOptions options;
  httplib::Server http;
  std::atomic<bool> stopping{false};

  std::mutex sessionsMutex;
  std::map<std::string, std::shared_ptr<Session>> sessions;
  std::uint64_t nextSession = 1;

  Impl(GameCatalog c, RatingsStore& r, ServiceOptions o) : catalog(std::move(c)), ratings(r), options(o) { routes(); }

  std::shared_ptr<Session> session(const std::string& id) {
    std::lock_guard lock(sessionsMutex);
    const auto it = sessions.find(id);
    if (it == sessions.end()) throw HttpError(404, "unknown session '" + id + "'");
    return it->second;
  }

  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  static Handler guarded(Handler h) {
    return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
      try {
        h(req, res);
      } catch (const HttpError& e) {
        json body{{"error", e.what()}};
        if (!e.detail.is_null()) body.update(e.detail);
        res.status = e.status;
        res.set_content(body.dump(), "application/json");
      } catch (const std::exception& e) {
        res.status = 500;
        res.set_content(json{{"error", e.what()}}.dump(), "application/json");
      }
    };
  }

  static void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  void routes() {
    http.Get("/games", guarded([this](const httplib::Request&, httplib::Response& res) {
      json games = json::array();
      for (const auto& g : catalog.games())
        games.push_back({{"id", g.id},
                         {"name", g.name},
                         {"source", g.source},
                         {"chromosome", g.chromosome.toString()},
                         {"rules", rulesJson(decode(g.chromosome))}});
      reply(res, 200, games);
    }));

    http.Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const json body = parseBody(req);
      const auto ref = field<std::string>(body, "gameRef");
      const GameEntry* game = catalog.find(ref);
      if (!game) throw HttpError(404, "unknown game '" + ref + "'");
      auto s = std::make_shared<Session>();
      s->game = *game;
      s->rules = decode(game->chromosome);
      s->human = parseSide(body.value("humanSide", std::string{"One"}));
      s->opponentKind = body.value("opponent", std::string{"minimax"});
      try {
        s->agent = makeAgent(s->opponentKind);
      } catch (const std::invalid_argument&) {
        throw HttpError(400, "opponent must be \"random\" or \"minimax\"");
      }
      s->runIndex = body.value("runIndex", 1);
      if (s->runIndex < 1 || s->runIndex > 3) throw HttpError(400, "runIndex must be 1, 2 or 3");
      std::uint64_t number;
      {
        std::lock_guard lock(sessionsMutex);
        number = nextSession++;
      }
      s->id = fmt::format("s{}", number);
      s->rng = Rng{deriveSeed(options.seed, "session", number)};
      s->state = initialState(s->rules);
      s->state.status = gameStatus(s->state, s->rules);
      s->events.push_back(s->stateJson().dump());
      s->agentReply();
      const json created{{"sessionId", s->id}, {"state", s->stateJson()}, {"rules", rulesJson(s->rules)}};
      {
        // Published only once fully set up.
        std::lock_guard lock(sessionsMutex);
        sessions.emplace(s->id, s);
      }
      reply(res, 201, created);
    }));

    http.Get(R"(/sessions/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto s = session(req.matches[1]);
      std::lock_guard lock(s->mutex);
      reply(res, 200, s->stateJson());
    }));

    http.Get(R"(/sessions/([^/]+)/moves)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto s = session(req.matches[1]);
      std::optional<Square> from;
      if (req.has_param("from")) from = parseCell(json(req.get_param_value("from")), "from");
      std::vector<Square> prefix;
      if (req.has_param("prefix")) {
        std::istringstream cells(req.get_param_value("prefix"));
        std::string cell;
        while (std::getline(cells, cell, ','))
          if (!cell.empty()) prefix.push_back(parseCell(json(cell), "prefix"));
      }
      std::lock_guard lock(s->mutex);
      std::vector<Move> out;
      if (s->state.status.ongoing()) {
        for (auto& m : legalMoves(s->state, s->rules)) {
          if (from && m.from != *from) continue;
          if (prefix.size() > m.path.size() || !std::equal(prefix.begin(), prefix.end(), m.path.begin())) continue;
          out.push_back(std::move(m));
        }
      }
      reply(res, 200, movesJson(out));
    }));

    http.Post(R"(/sessions/([^/]+)/moves)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto s = session(req.matches[1]);
      const json body = parseBody(req);
      const Square from = parseCell(body.contains("from") ? body["from"] : json(nullptr), "from");
      const Square to = parseCell(body.contains("to") ? body["to"] : json(nullptr), "to");
      std::optional<std::vector<Square>> chain;
      if (body.contains("chainPath") && !body["chainPath"].is_null()) {
        if (!body["chainPath"].is_array()) throw HttpError(400, "chainPath must be a list of cells");
        chain.emplace();
        for (const auto& c : body["chainPath"]) chain->push_back(parseCell(c, "chainPath"));
      }

      std::lock_guard lock(s->mutex);
      if (!s->state.status.ongoing()) throw HttpError(409, "game is over", {{"state", s->stateJson()}});
      if (s->state.sideToMove != s->human) throw HttpError(409, "not the human player's turn");
      const auto legal = legalMoves(s->state, s->rules);
      std::vector<Move> matches;
      for (const auto& m : legal)
        if (m.from == from && m.to == to && (!chain || m.path == *chain)) matches.push_back(m);
      if (matches.empty()) {
        std::vector<Move> alternatives;
        for (const auto& m : legal)
          if (m.from == from) alternatives.push_back(m);
        throw HttpError(409, fmt::format("illegal move {}-{}", from.name(), to.name()),
                        {{"legal", movesJson(alternatives.empty() ? legal : alternatives)}});
      }
      if (matches.size() > 1)
        throw HttpError(409, "ambiguous move: several capture chains end there; send chainPath",
                        {{"candidates", movesJson(matches)}});

      s->apply(matches.front(), "human");
      const auto answer = s->agentReply();
      reply(res, 200,
            {{"human", moveJson(matches.front())},
             {"reply", answer ? moveJson(*answer) : json(nullptr)},
             {"state", s->stateJson()}});
    }));

    http.Get(R"(/sessions/([^/]+)/events)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto s = session(req.matches[1]);
      std::size_t next;
      {
        std::lock_guard lock(s->mutex);
        next = s->events.size() - 1;  // start from the current state
      }
      res.set_header("Cache-Control", "no-cache");
      res.set_chunked_content_provider("text/event-stream", [this, s, next](std::size_t, httplib::DataSink& sink) mutable {
        std::vector<std::string> pending;
        bool finished;
        {
          std::unique_lock lock(s->mutex);
          s->changed.wait_for(lock, std::chrono::milliseconds(200),
                              [&] { return next < s->events.size() || stopping.load(); });
          pending.assign(s->events.begin() + static_cast<std::ptrdiff_t>(next), s->events.end());
          next = s->events.size();
          finished = !s->state.status.ongoing() || stopping.load();
        }
        for (const auto& e : pending) {
          const std::string msg = "event: state\ndata: " + e + "\n\n";
          if (!sink.write(msg.data(), msg.size())) return false;
        }
        if (finished) sink.done();
        return true;
      });
    }));

    http.Post("/ratings", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const json body = parseBody(req);
      RatingRecord r;
      r.subjectId = field<std::string>(body, "subjectId");
      r.gameId = field<std::string>(body, "gameId");
      r.runIndex = field<int>(body, "runIndex");
      try {
        r.code = parseRating(field<std::string>(body, "code"));
      } catch (const std::invalid_argument& e) {
        throw HttpError(400, e.what());
      }
      if (r.subjectId.empty()) throw HttpError(400, "subjectId must not be empty");
      if (!catalog.find(r.gameId)) throw HttpError(400, "unknown game '" + r.gameId + "'");
      if (r.runIndex < 1 || r.runIndex > 3) throw HttpError(400, "runIndex must be 1, 2 or 3");
      r.timestamp = std::chrono::duration_cast<std::chrono::seconds>(
                        std::chrono::system_clock::now().time_since_epoch())
                        .count();
      if (ratings.add(r) == RatingsStore::AddResult::Duplicate)
        throw HttpError(409, fmt::format("subject '{}' already rated {} run {}", r.subjectId, r.gameId, r.runIndex));
      reply(res, 201, json::parse(r.toJsonLine()));
    }));
  }
};

Server::Server(GameCatalog catalog, RatingsStore& ratings, ServiceOptions options)
    : impl_(std::make_unique<Impl>(std::move(catalog), ratings, options)) {}

Server::~Server() { stop(); }

int Server::bind(const std::string& host, int port) {
  if (port == 0) return impl_->http.bind_to_any_port(host);
  if (!impl_->http.bind_to_port(host, port)) throw std::runtime_error(fmt::format("cannot bind {}:{}", host, port));
  return port;
}

void Server::run() { impl_->http.listen_after_bind(); }

void Server::stop() {
  impl_->stopping = true;
  {
    std::lock_guard lock(impl_->sessionsMutex);
    for (auto& [id, s] : impl_->sessions) s->changed.notify_all();
  }
  impl_->http.stop();
}

}  // namespace boardgen::service
