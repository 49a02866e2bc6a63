#include "boardgen/playout.hpp"

#include <algorithm>
#include <numeric>

#include <nlohmann/json.hpp>

namespace boardgen {

using nlohmann::json;

int MatchRecord::totalArrivals() const { return std::accumulate(cellVisits.begin(), cellVisits.end(), 0); }

std::string MatchRecord::toJsonLine() const {
  json j;
  j["chromosome"] = chromosome ? json(chromosome->toString()) : json(nullptr);
  j["seed"] = seed;
  j["agents"] = {agentOne, agentTwo};
  j["outcome"] = toString(status.outcome);
  j["winner"] = status.outcome == Outcome::Won ? json(toString(status.winner)) : json(nullptr);
  j["reason"] = toString(status.reason);
  j["plies"] = plies;
  json pieceList = json::array();
  for (const auto& p : pieces) pieceList.push_back({toString(p.owner), p.cellChanges, p.life});
  j["pieces"] = std::move(pieceList);
  j["cells"] = cellVisits;
  return j.dump();
}

namespace {

Player parsePlayer(const std::string& s) {
  if (s == "One") return Player::One;
  if (s == "Two") return Player::Two;
  throw std::invalid_argument("bad player '" + s + "'");
}

template <typename E>
E parseEnum(const std::string& s, std::initializer_list<E> values) {
  for (E v : values)
    if (toString(v) == s) return v;
  throw std::invalid_argument("bad enum value '" + s + "'");
}

}  // namespace

MatchRecord MatchRecord::fromJsonLine(const std::string& line) {
  const json j = json::parse(line);
  MatchRecord rec;
  if (!j.at("chromosome").is_null()) rec.chromosome = Chromosome::parse(j.at("chromosome").get<std::string>());
  rec.seed = j.at("seed").get<std::uint64_t>();
  rec.agentOne = j.at("agents").at(0).get<std::string>();
  rec.agentTwo = j.at("agents").at(1).get<std::string>();
  rec.status.outcome =
      parseEnum(j.at("outcome").get<std::string>(), {Outcome::Ongoing, Outcome::Won, Outcome::Draw});
  if (!j.at("winner").is_null()) rec.status.winner = parsePlayer(j.at("winner").get<std::string>());
  rec.status.reason = parseEnum(j.at("reason").get<std::string>(),
                                {EndReason::None, EndReason::Honor, EndReason::NoMoves, EndReason::MoveCap});
  rec.plies = j.at("plies").get<int>();
  for (const auto& p : j.at("pieces"))
    rec.pieces.push_back({parsePlayer(p.at(0).get<std::string>()), p.at(1).get<int>(), p.at(2).get<int>()});
  rec.cellVisits = j.at("cells").get<std::array<int, kCells>>();
  return rec;
}

MatchRecord summarize(const GameState& s) {
  MatchRecord rec;
  rec.status = s.status;
  rec.plies = s.ply;
  rec.cellVisits = s.cellVisits;
  rec.pieces.reserve(s.pieces.size());
  for (const auto& p : s.pieces) rec.pieces.push_back({p.owner, p.cellChanges, p.deathPly.value_or(s.ply)});
  return rec;
}

MatchRecord playout(const RuleSet& r, const Agent& one, const Agent& two, std::uint64_t seed) {
  Rng rng{seed};
  GameState s = initialState(r);
  auto moves = legalMoves(s, r);
  s.status = gameStatus(s, r, moves);
  while (s.status.ongoing()) {
    const Agent& agent = s.sideToMove == Player::One ? one : two;
    Move m = agent.chooseMove(s, r, moves, rng);
    if (std::find(moves.begin(), moves.end(), m) == moves.end())
      throw PlayoutFault(s.sideToMove, std::string{agent.name()} + " agent for player " +
                                           std::string{toString(s.sideToMove)} + " returned illegal move " +
                                           m.toString());
    advance(s, m);
    moves = legalMoves(s, r);
    s.status = gameStatus(s, r, moves);
  }
  MatchRecord rec = summarize(s);
  rec.seed = seed;
  rec.agentOne = one.name();
  rec.agentTwo = two.name();
  return rec;
}

}  // namespace boardgen
