#include "boardgen/service.hpp"

#include <filesystem>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "boardgen/engine.hpp"
#include "support/test_support.hpp"

namespace boardgen::service {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

fs::path freshDir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("boardgen_service_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

class RunningServer {
 public:
  RunningServer(RatingsStore& store, std::uint64_t seed = 7)
      : server_(GameCatalog::builtin(BOARDGEN_FIXTURE_DIR), store, {seed}) {
    port_ = server_.bind("127.0.0.1", 0);
    thread_ = std::thread([this] { server_.run(); });
  }
  ~RunningServer() {
    server_.stop();
    thread_.join();
  }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(10);
    return c;
  }

  json post(const std::string& path, const json& body, int expectStatus) const {
    auto c = client();
    auto res = c.Post(path, body.dump(), "application/json");
    EXPECT_TRUE(res) << path;
    if (!res) return nullptr;
    EXPECT_EQ(res->status, expectStatus) << path << ": " << res->body;
    return json::parse(res->body);
  }

  json get(const std::string& path, int expectStatus = 200) const {
    auto c = client();
    auto res = c.Get(path);
    EXPECT_TRUE(res) << path;
    if (!res) return nullptr;
    EXPECT_EQ(res->status, expectStatus) << path << ": " << res->body;
    return json::parse(res->body);
  }

 private:
  Server server_;
  int port_ = 0;
  std::thread thread_;
};

std::vector<Square> cells(const json& list) {
  std::vector<Square> out;
  for (const auto& c : list) out.push_back(*Square::parse(c.get<std::string>()));
  return out;
}

// Rebuilds the game from the reported history and checks it against the
// engine at every step.
void expectReplayMatches(const json& state, const RuleSet& rules) {
  GameState s = initialState(rules);
  for (const auto& h : state["history"]) {
    ASSERT_EQ(h["ply"].get<int>(), s.ply);
    ASSERT_EQ(h["player"].get<std::string>(), toString(s.sideToMove));
    const auto legal = legalMoves(s, rules);
    const auto from = *Square::parse(h["move"]["from"].get<std::string>());
    const auto path = cells(h["move"]["path"]);
    const auto it = std::find_if(legal.begin(), legal.end(),
                                 [&](const Move& m) { return m.from == from && m.path == path; });
    ASSERT_NE(it, legal.end()) << "history move not legal: " << h.dump();
    s = applyMove(s, rules, *it);
  }
  EXPECT_EQ(state["ply"].get<int>(), s.ply);
  const Status st = gameStatus(s, rules);
  EXPECT_EQ(state["status"]["outcome"].get<std::string>(), toString(st.outcome));
  EXPECT_EQ(state["status"]["reason"].get<std::string>(), toString(st.reason));
  int occupied = 0;
  for (int k = 0; k < kCells; ++k) occupied += s.board[k].has_value();
  ASSERT_EQ(state["board"].size(), static_cast<std::size_t>(occupied));
  for (const auto& p : state["board"]) {
    const auto& piece = s.at(*Square::parse(p["cell"].get<std::string>()));
    ASSERT_TRUE(piece);
    EXPECT_EQ(p["owner"].get<std::string>(), toString(piece->owner));
    EXPECT_EQ(p["type"].get<int>(), piece->type);
  }
}

TEST(ServiceTest, ListsBuiltinGames) {
  const auto dir = freshDir("games");
  RatingsStore store((dir / "ratings.jsonl").string());
  RunningServer srv(store);
  const json games = srv.get("/games");
  ASSERT_EQ(games.size(), 4u);
  EXPECT_EQ(games[0]["id"], "game1");
  EXPECT_EQ(games[3]["id"], "game4");
  EXPECT_EQ(games[1]["rules"]["mandatoryCapture"], true);
  EXPECT_EQ(games[0]["chromosome"], testing::fixtureChromosome(1).toString());
}

TEST(ServiceTest, ScriptedGameReplaysConsistently) {
  const auto dir = freshDir("scripted");
  RatingsStore store((dir / "ratings.jsonl").string());
  RunningServer srv(store);
  const RuleSet rules = testing::fixtureRules(1);

  const json created = srv.post("/sessions", {{"gameRef", "game1"}, {"humanSide", "One"}, {"opponent", "minimax"}}, 201);
  const std::string id = created["sessionId"];
  json state = created["state"];
  EXPECT_EQ(state["ply"], 0);
  EXPECT_EQ(state["awaiting"], "human");

  // The human always plays the first listed move.
  int turns = 0;
  while (state["status"]["outcome"] == "ongoing") {
    const json moves = srv.get("/sessions/" + id + "/moves");
    ASSERT_FALSE(moves.empty());
    const json& m = moves[0];
    const json res =
        srv.post("/sessions/" + id + "/moves", {{"from", m["from"]}, {"to", m["to"]}, {"chainPath", m["path"]}}, 200);
    EXPECT_EQ(res["human"]["notation"], m["notation"]);
    state = res["state"];
    ASSERT_LT(++turns, 200);
  }
  EXPECT_LE(state["ply"].get<int>(), kMaxPlies);
  EXPECT_EQ(state["awaiting"], "none");
  expectReplayMatches(state, rules);
  EXPECT_EQ(srv.get("/sessions/" + id), state);

  // No more moves once the game is over.
  srv.post("/sessions/" + id + "/moves", {{"from", "a1"}, {"to", "a2"}}, 409);
}

TEST(ServiceTest, ConcurrentSessionsStayIndependent) {
  const auto dir = freshDir("concurrent");
  RatingsStore store((dir / "ratings.jsonl").string());
  RunningServer srv(store);
  std::vector<json> finals(4);
  std::vector<std::thread> players;
  for (int k = 0; k < 4; ++k) {
    players.emplace_back([&, k] {
      const int game = k % 3 + 1;
      const json created = srv.post(
          "/sessions", {{"gameRef", "game" + std::to_string(game)}, {"humanSide", k % 2 ? "Two" : "One"}}, 201);
      const std::string id = created["sessionId"];
      json state = created["state"];
      while (state["status"]["outcome"] == "ongoing") {
        const json m = srv.get("/sessions/" + id + "/moves")[0];
        state = srv.post("/sessions/" + id + "/moves", {{"from", m["from"]}, {"to", m["to"]}, {"chainPath", m["path"]}},
                         200)["state"];
      }
      finals[k] = state;
    });
  }
  for (auto& t : players) t.join();
  for (int k = 0; k < 4; ++k) expectReplayMatches(finals[k], testing::fixtureRules(k % 3 + 1));
}

TEST(ServiceTest, AgentOpensWhenHumanPlaysTwo) {
  const auto dir = freshDir("second");
  RatingsStore store((dir / "ratings.jsonl").string());
  RunningServer srv(store);
  const json created = srv.post("/sessions", {{"gameRef", "game3"}, {"humanSide", "Two"}, {"opponent", "random"}}, 201);
  const json& state = created["state"];
  EXPECT_EQ(state["ply"], 1);
  EXPECT_EQ(state["sideToMove"], "Two");
  ASSERT_EQ(state["history"].size(), 1u);
  EXPECT_EQ(state["history"][0]["by"], "agent");
  expectReplayMatches(state, testing::fixtureRules(3));
}

TEST(ServiceTest, IllegalMoveLeavesStateUnchanged) {
  const auto dir = freshDir("illegal");
  RatingsStore store((dir / "ratings.jsonl").string());
  RunningServer srv(store);
  const std::string id = srv.post("/sessions", {{"gameRef", "game1"}, {"humanSide", "One"}}, 201)["sessionId"];
  const json before = srv.get("/sessions/" + id);

  // a1 to a8 is never a legal opening move.
  const json err = srv.post("/sessions/" + id + "/moves", {{"from", "a1"}, {"to", "a8"}}, 409);
  EXPECT_TRUE(err.contains("error"));
  EXPECT_TRUE(err["legal"].is_array());
  EXPECT_EQ(srv.get("/sessions/" + id), before);

  srv.post("/sessions/" + id + "/moves", {{"from", "z9"}, {"to", "a2"}}, 400);
  srv.post("/sessions/" + id + "/moves", {{"to", "a2"}}, 400);
  EXPECT_EQ(srv.get("/sessions/" + id), before);
}

TEST(ServiceTest, MovesQueryFiltersByOriginAndPrefix) {
  const auto dir = freshDir("query");
  RatingsStore store((dir / "ratings.jsonl").string());
  RunningServer srv(store);
  const std::string id = srv.post("/sessions", {{"gameRef", "game1"}, {"humanSide", "One"}}, 201)["sessionId"];
  const json all = srv.get("/sessions/" + id + "/moves");
  EXPECT_EQ(all.size(), legalMoves(initialState(testing::fixtureRules(1)), testing::fixtureRules(1)).size());
  const std::string from = all[0]["from"];
  const json some = srv.get("/sessions/" + id + "/moves?from=" + from);
  ASSERT_FALSE(some.empty());
  for (const auto& m : some) EXPECT_EQ(m["from"], from);
  const std::string first = all[0]["path"][0];
  const json prefixed = srv.get("/sessions/" + id + "/moves?from=" + from + "&prefix=" + first);
  ASSERT_FALSE(prefixed.empty());
  for (const auto& m : prefixed) EXPECT_EQ(m["path"][0], first);
}

TEST(ServiceTest, MandatoryCaptureIsEnforced) {
  const auto dir = freshDir("mandatory");
  RatingsStore store((dir / "ratings.jsonl").string());
  RunningServer srv(store, 11);
  const RuleSet rules = testing::fixtureRules(2);
  ASSERT_TRUE(rules.mandatoryCapture);
  RuleSet relaxed = rules;
  relaxed.mandatoryCapture = false;

  const std::string id =
      srv.post("/sessions", {{"gameRef", "game2"}, {"humanSide", "One"}, {"opponent", "random"}}, 201)["sessionId"];
  // Play quiet moves until the human faces a capture, then try to dodge it.
  for (int turn = 0; turn < 50; ++turn) {
    const json state = srv.get("/sessions/" + id);
    ASSERT_EQ(state["status"]["outcome"], "ongoing") << "game ended before a capture position arose";
    GameState s = initialState(rules);
    for (const auto& h : state["history"]) {
      const auto legal = legalMoves(s, rules);
      const auto path = cells(h["move"]["path"]);
      const auto from = *Square::parse(h["move"]["from"].get<std::string>());
      s = applyMove(s, rules, *std::find_if(legal.begin(), legal.end(),
                                           [&](const Move& m) { return m.from == from && m.path == path; }));
    }
    const auto legal = legalMoves(s, rules);
    if (legal.front().isCapture()) {
      const auto pseudo = legalMoves(s, relaxed);
      const auto quiet = std::find_if(pseudo.begin(), pseudo.end(), [](const Move& m) { return !m.isCapture(); });
      ASSERT_NE(quiet, pseudo.end());
      srv.post("/sessions/" + id + "/moves", {{"from", quiet->from.name()}, {"to", quiet->to.name()}}, 409);
      EXPECT_EQ(srv.get("/sessions/" + id), state);
      for (const auto& m : srv.get("/sessions/" + id + "/moves")) EXPECT_FALSE(m["captures"].empty());
      return;
    }
    const Move& m = legal.front();
    srv.post("/sessions/" + id + "/moves", {{"from", m.from.name()}, {"to", m.to.name()}, {"chainPath", json::array()}},
             409);  // an empty chain never matches
    json path = json::array();
    for (Square c : m.path) path.push_back(c.name());
    srv.post("/sessions/" + id + "/moves", {{"from", m.from.name()}, {"to", m.to.name()}, {"chainPath", path}}, 200);
  }
  FAIL() << "no capture position within 50 turns";
}

TEST(ServiceTest, FullGameTwoThenRatingReachesSurvey) {
  const auto dir = freshDir("game2_flow");
  const auto path = (dir / "ratings.jsonl").string();
  RatingsStore store(path);
  RunningServer srv(store, 3);
  const json created =
      srv.post("/sessions", {{"gameRef", "game2"}, {"humanSide", "One"}, {"opponent", "minimax"}, {"runIndex", 2}}, 201);
  const std::string id = created["sessionId"];
  EXPECT_EQ(created["rules"]["mandatoryCapture"], true);
  json state = created["state"];
  while (state["status"]["outcome"] == "ongoing") {
    const json moves = srv.get("/sessions/" + id + "/moves");
    ASSERT_FALSE(moves.empty());
    const json& m = moves.back();
    state = srv.post("/sessions/" + id + "/moves", {{"from", m["from"]}, {"to", m["to"]}, {"chainPath", m["path"]}},
                     200)["state"];
  }
  expectReplayMatches(state, testing::fixtureRules(2));
  EXPECT_EQ(state["runIndex"], 2);

  srv.post("/ratings", {{"subjectId", "s01"}, {"gameId", "game2"}, {"runIndex", 2}, {"code", "liked"}}, 201);
  const auto records = readRatings(path);
  const auto samples = surveySamples(records);
  ASSERT_TRUE(samples.contains("game2"));
  EXPECT_EQ(correlationC(samples.at("game2")), 1.0);
}

TEST(ServiceTest, UnknownSessionAndMalformedRequests) {
  const auto dir = freshDir("errors");
  RatingsStore store((dir / "ratings.jsonl").string());
  RunningServer srv(store);
  srv.get("/sessions/s999", 404);
  srv.post("/sessions/s999/moves", {{"from", "a1"}, {"to", "a2"}}, 404);
  srv.post("/sessions", {{"gameRef", "nope"}}, 404);
  srv.post("/sessions", {{"gameRef", "game1"}, {"humanSide", "Three"}}, 400);
  srv.post("/sessions", {{"gameRef", "game1"}, {"opponent", "oracle"}}, 400);
  srv.post("/sessions", json::object(), 400);

  auto c = srv.client();
  auto res = c.Post("/sessions", "{not json", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
}

TEST(ServiceTest, RatingsAcceptThreeRunsPerGame) {
  const auto dir = freshDir("ratings");
  const auto path = (dir / "ratings.jsonl").string();
  RatingsStore store(path);
  RunningServer srv(store);
  for (int run = 1; run <= 3; ++run)
    srv.post("/ratings", {{"subjectId", "s01"}, {"gameId", "game1"}, {"runIndex", run}, {"code", "liked"}}, 201);
  srv.post("/ratings", {{"subjectId", "s01"}, {"gameId", "game1"}, {"runIndex", 2}, {"code", "disliked"}}, 409);
  srv.post("/ratings", {{"subjectId", "s01"}, {"gameId", "game1"}, {"runIndex", 4}, {"code", "liked"}}, 400);
  srv.post("/ratings", {{"subjectId", "s01"}, {"gameId", "game9"}, {"runIndex", 1}, {"code", "liked"}}, 400);
  srv.post("/ratings", {{"subjectId", "s01"}, {"gameId", "game2"}, {"runIndex", 1}, {"code", "meh"}}, 400);
  srv.post("/ratings", {{"subjectId", "s02"}, {"gameId", "game1"}, {"runIndex", 1}, {"code", "neutral"}}, 201);

  const auto records = readRatings(path);
  ASSERT_EQ(records.size(), 4u);
  EXPECT_EQ(records[1].runIndex, 2);
  EXPECT_EQ(records[1].code, Rating::Liked);
  EXPECT_EQ(records[3].subjectId, "s02");
  EXPECT_GT(records[3].timestamp, 0);
}

TEST(ServiceTest, RatingsSurviveRestart) {
  const auto dir = freshDir("restart");
  const auto path = (dir / "ratings.jsonl").string();
  {
    RatingsStore store(path);
    RunningServer srv(store);
    srv.post("/ratings", {{"subjectId", "s07"}, {"gameId", "game3"}, {"runIndex", 1}, {"code", "liked"}}, 201);
  }
  RatingsStore reopened(path);
  ASSERT_EQ(reopened.records().size(), 1u);
  RunningServer srv(reopened);
  srv.post("/ratings", {{"subjectId", "s07"}, {"gameId", "game3"}, {"runIndex", 1}, {"code", "liked"}}, 409);
  srv.post("/ratings", {{"subjectId", "s07"}, {"gameId", "game3"}, {"runIndex", 2}, {"code", "disliked"}}, 201);
  EXPECT_EQ(readRatings(path).size(), 2u);
}

TEST(ServiceTest, EventStreamCarriesStateChanges) {
  const auto dir = freshDir("events");
  RatingsStore store((dir / "ratings.jsonl").string());
  RunningServer srv(store);
  const std::string id = srv.post("/sessions", {{"gameRef", "game1"}, {"humanSide", "One"}}, 201)["sessionId"];

  std::vector<json> events;
  std::string buffer;
  std::thread listener([&] {
    auto c = srv.client();
    c.Get("/sessions/" + id + "/events", [&](const char* data, std::size_t n) {
      buffer.append(data, n);
      std::size_t end;
      while ((end = buffer.find("\n\n")) != std::string::npos) {
        const std::string block = buffer.substr(0, end);
        buffer.erase(0, end + 2);
        const auto pos = block.find("data: ");
        if (pos != std::string::npos) events.push_back(json::parse(block.substr(pos + 6)));
      }
      return events.size() < 3;  // current state, human move, agent reply
    });
  });
  // Give the listener time to subscribe before moving.
  std::this_thread::sleep_for(std::chrono::milliseconds(300));
  const json m = srv.get("/sessions/" + id + "/moves")[0];
  const json res = srv.post("/sessions/" + id + "/moves", {{"from", m["from"]}, {"to", m["to"]}, {"chainPath", m["path"]}}, 200);
  listener.join();

  ASSERT_EQ(events.size(), 3u);
  EXPECT_EQ(events[0]["ply"], 0);
  EXPECT_EQ(events[1]["ply"], 1);
  EXPECT_EQ(events[1]["awaiting"], "agent");
  EXPECT_EQ(events[2], res["state"]);
}

}  // namespace
}  // namespace boardgen::service
