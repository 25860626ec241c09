#include "planettt/record.hpp"

#include <algorithm>
#include <cctype>

namespace planettt {

namespace {

bool valid_point(std::string_view s) {
  if (s.empty() || !std::islower(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char ch) {
    return std::islower(static_cast<unsigned char>(ch)) || std::isdigit(static_cast<unsigned char>(ch));
  });
}

std::string strip(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// Splits on commas outside parentheses.
std::vector<std::string> split_items(std::string_view text, bool& unbalanced) {
  std::vector<std::string> items;
  int depth = 0;
  std::string cur;
  unbalanced = false;
  for (char ch : text) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (depth < 0) unbalanced = true;
    if (ch == ',' && depth == 0) {
      items.push_back(strip(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (depth != 0) unbalanced = true;
  items.push_back(strip(cur));
  return items;
}

std::string describe_item(const GameRecord& record, std::size_t i) {
  if (i < record.moves.size()) return "move " + std::to_string(i + 1) + " (" + record.moves[i].point + ")";
  return "XW marker";
}

}  // namespace

RecordError::RecordError(Kind kind, std::size_t item, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + " at item " + std::to_string(item + 1) +
                         ": " + what),
      kind_(kind),
      item_(item) {}

const char* to_string(RecordError::Kind kind) {
  switch (kind) {
    case RecordError::Kind::kMalformedToken:
      return "malformed token";
    case RecordError::Kind::kAlternation:
      return "alternation error";
    case RecordError::Kind::kMisplacedDoubleThreat:
      return "misplaced XW";
    case RecordError::Kind::kUnknownPoint:
      return "unknown point";
    case RecordError::Kind::kIllegalMove:
      return "illegal move";
    case RecordError::Kind::kNotForced:
      return "move marked forced is not forced";
    case RecordError::Kind::kNotDoubleThreat:
      return "XW pair is not a double threat";
  }
  return "?";
}

GameRecord parse_record(std::string_view text, Player first) {
  GameRecord record;
  std::string body = strip(text);
  if (!body.empty() && body.back() == ';') body = strip(std::string_view(body).substr(0, body.size() - 1));
  if (body.empty()) return record;
  bool unbalanced = false;
  const auto items = split_items(body, unbalanced);
  if (unbalanced) throw RecordError(RecordError::Kind::kMalformedToken, 0, "unbalanced parentheses");
  Player expected = first;
  for (std::size_t i = 0; i < items.size(); ++i) {
    std::string_view tok = items[i];
    using Kind = RecordError::Kind;
    if (tok.starts_with("XW")) {
      if (tok.size() < 4 || tok[2] != '(' || tok.back() != ')') {
        throw RecordError(Kind::kMalformedToken, i, "bad XW token '" + items[i] + "'");
      }
      const std::string inner(tok.substr(3, tok.size() - 4));
      const auto comma = inner.find(',');
      if (comma == std::string::npos) throw RecordError(Kind::kMalformedToken, i, "XW needs two points");
      std::string p = strip(std::string_view(inner).substr(0, comma));
      std::string q = strip(std::string_view(inner).substr(comma + 1));
      if (!valid_point(p) || !valid_point(q) || p == q) {
        throw RecordError(Kind::kMalformedToken, i, "bad XW points '" + inner + "'");
      }
      if (i + 1 != items.size()) {
        throw RecordError(Kind::kMisplacedDoubleThreat, i, "XW must close the record");
      }
      if (record.moves.empty() || record.moves.back().mover != Player::kXeno) {
        throw RecordError(Kind::kMisplacedDoubleThreat, i, "XW must follow a Xeno move");
      }
      record.double_threat = std::make_pair(std::move(p), std::move(q));
      continue;
    }
    RecordMove move;
    std::string_view inner = tok;
    if (!inner.empty() && inner.front() == '(') {
      if (inner.back() != ')') throw RecordError(Kind::kMalformedToken, i, "bad token '" + items[i] + "'");
      move.mover = Player::kOphelia;
      inner = inner.substr(1, inner.size() - 2);
    }
    const std::string cleaned = strip(inner);
    inner = cleaned;
    if (!inner.empty() && inner.front() == '!') {
      move.forced = true;
      inner.remove_prefix(1);
    }
    if (!valid_point(inner)) throw RecordError(Kind::kMalformedToken, i, "bad token '" + items[i] + "'");
    move.point = std::string(inner);
    if (move.mover != expected) {
      throw RecordError(Kind::kAlternation, i,
                        std::string("expected a move by ") + to_string(expected) + ", got '" + items[i] + "'");
    }
    expected = opponent(expected);
    record.moves.push_back(std::move(move));
  }
  return record;
}

std::string format_record(const GameRecord& record) {
  std::string out;
  auto sep = [&] {
    if (!out.empty()) out += ", ";
  };
  for (const auto& m : record.moves) {
    sep();
    const std::string token = (m.forced ? "!" : "") + m.point;
    out += m.mover == Player::kOphelia ? "(" + token + ")" : token;
  }
  if (record.double_threat) {
    sep();
    out += "XW(" + record.double_threat->first + "," + record.double_threat->second + ")";
  }
  return out;
}

GameState replay_record(const GameRecord& record, const GameState& start) {
  using Kind = RecordError::Kind;
  GameState state = start;
  const auto& game = start.game();
  auto resolve = [&](const std::string& name, std::size_t i) {
    auto id = game.find_point(name);
    if (!id) throw RecordError(Kind::kUnknownPoint, i, "'" + name + "' is not a point of " + game.name());
    return *id;
  };
  for (std::size_t i = 0; i < record.moves.size(); ++i) {
    const auto& m = record.moves[i];
    if (m.mover != state.to_move()) {
      throw RecordError(Kind::kAlternation, i, describe_item(record, i) + " is not " + to_string(m.mover) + "'s turn");
    }
    const PointId p = resolve(m.point, i);
    if (m.forced) {
      const auto forced = forced_moves(state, m.mover);
      if (!std::binary_search(forced.begin(), forced.end(), p)) {
        throw RecordError(Kind::kNotForced, i, describe_item(record, i) + " answers no threat");
      }
    }
    try {
      state = state.apply_move(p);
    } catch (const std::exception& e) {
      throw RecordError(Kind::kIllegalMove, i, e.what());
    }
  }
  if (record.double_threat) {
    const std::size_t i = record.moves.size();
    const PointId p = resolve(record.double_threat->first, i);
    const PointId q = resolve(record.double_threat->second, i);
    if (state.to_move() != Player::kOphelia || winner(state).terminal()) {
      throw RecordError(Kind::kMisplacedDoubleThreat, i, "XW needs an ongoing game with Ophelia to move");
    }
    const auto points = threat_points(state, Player::kXeno);
    const bool both = std::binary_search(points.begin(), points.end(), p) &&
                      std::binary_search(points.begin(), points.end(), q);
    if (!both || !double_threat(state, Player::kXeno)) {
      throw RecordError(Kind::kNotDoubleThreat, i,
                        "XW(" + record.double_threat->first + "," + record.double_threat->second + ")");
    }
  }
  return state;
}

GameRecord record_from_history(const GameState& state, std::size_t from_ply) {
  GameRecord record;
  const auto& history = state.history();
  GameState cur = GameState::from_moves(
      state.game_ptr(), std::vector<PointId>(history.begin(), history.begin() + std::min(from_ply, history.size())));
  for (std::size_t i = from_ply; i < history.size(); ++i) {
    const PointId p = history[i];
    // A winning move is never marked, even when it also blocks.
    const auto forced = forced_moves(cur, cur.to_move());
    const bool wins = !winning_moves(cur, cur.to_move()).empty();
    record.moves.push_back({state.game().point_name(p), cur.to_move(),
                            !wins && std::binary_search(forced.begin(), forced.end(), p)});
    cur = cur.apply_move(p);
  }
  return record;
}

}  // namespace planettt
