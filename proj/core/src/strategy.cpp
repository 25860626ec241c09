#include "planettt/strategy.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "planettt/paratopism.hpp"

namespace planettt {

namespace {

using Kind = StrategyError::Kind;

constexpr int kPoints = 16;

std::string strip(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

bool valid_point(std::string_view s) {
  if (s.empty() || !std::islower(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char ch) {
    return std::islower(static_cast<unsigned char>(ch)) || std::isdigit(static_cast<unsigned char>(ch));
  });
}

[[noreturn]] void syntax(int line, const std::string& what) {
  throw StrategyError(Kind::kTableSyntax, "tables line " + std::to_string(line) + ": " + what);
}

std::vector<std::string> split_items(std::string_view text, int lineno) {
  std::vector<std::string> items;
  int depth = 0;
  std::string cur;
  for (char ch : text) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (depth < 0 || depth > 1) syntax(lineno, "unbalanced parentheses");
    if (ch == ',' && depth == 0) {
      items.push_back(strip(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (depth != 0) syntax(lineno, "unbalanced parentheses");
  items.push_back(strip(cur));
  return items;
}

TableLine parse_continuation(std::string_view text, int lineno) {
  TableLine line;
  line.source_line = lineno;
  const auto items = split_items(text, lineno);
  Player expected = Player::kOphelia;
  bool closed = false;
  for (const auto& item : items) {
    std::string_view tok = item;
    if (closed) syntax(lineno, "XW must close the line");
    if (tok.starts_with("XW")) {
      if (tok.size() < 4 || tok[2] != '(' || tok.back() != ')') syntax(lineno, "bad XW token '" + item + "'");
      const std::string inner(tok.substr(3, tok.size() - 4));
      const auto comma = inner.find(',');
      if (comma == std::string::npos) syntax(lineno, "XW needs two points");
      std::string p = strip(std::string_view(inner).substr(0, comma));
      std::string q = strip(std::string_view(inner).substr(comma + 1));
      if (!valid_point(p) || !valid_point(q) || p == q) syntax(lineno, "bad XW points '" + inner + "'");
      if (line.moves.empty() || line.moves.back().mover != Player::kXeno) {
        syntax(lineno, "XW must follow a Xeno move");
      }
      line.double_threat = {std::move(p), std::move(q)};
      closed = true;
      continue;
    }
    TableMove move;
    if (!tok.empty() && tok.front() == '(') {
      if (tok.back() != ')') syntax(lineno, "bad token '" + item + "'");
      move.mover = Player::kOphelia;
      tok = tok.substr(1, tok.size() - 2);
    }
    std::string body = strip(tok);
    if (!body.empty() && body.front() == '!') {
      move.forced = true;
      body = strip(std::string_view(body).substr(1));
    }
    std::stringstream alts(body);
    std::string alt;
    while (std::getline(alts, alt, '|')) {
      alt = strip(alt);
      if (!valid_point(alt)) syntax(lineno, "bad token '" + item + "'");
      if (std::find(move.points.begin(), move.points.end(), alt) != move.points.end()) {
        syntax(lineno, "repeated alternative '" + alt + "'");
      }
      move.points.push_back(alt);
    }
    if (move.points.empty()) syntax(lineno, "empty token");
    if (move.points.size() > 1 && move.mover == Player::kXeno) {
      syntax(lineno, "only Ophelia moves may list alternatives");
    }
    if (move.mover != expected) {
      syntax(lineno, std::string("expected a move by ") + to_string(expected) + ", got '" + item + "'");
    }
    expected = opponent(expected);
    line.moves.push_back(std::move(move));
  }
  if (!closed) syntax(lineno, "line must end with XW(p,q)");
  return line;
}

std::string format_move(const TableMove& m) {
  std::string token = m.forced ? "!" : "";
  for (std::size_t i = 0; i < m.points.size(); ++i) {
    if (i) token += "|";
    token += m.points[i];
  }
  return m.mover == Player::kOphelia ? "(" + token + ")" : token;
}

const MolsSet& canonical_pair() {
  static const MolsSet pair{4, {canonical_mols().squares[0], canonical_mols().squares[1]}};
  return pair;
}

const std::shared_ptr<const PositionalGame>& canonical_game() {
  static const auto game = PositionalGame::from_plane(canonical_pi4(), "pi4");
  return game;
}

PointId canonical_id(const std::string& name) {
  auto id = canonical_pi4().find_point(name);
  if (!id) throw StrategyError(Kind::kTableInvalid, "'" + name + "' is not a point of pi4");
  return *id;
}

// --- Move tree over canonical ids -------------------------------------------

struct TrieNode;

struct TrieEdge {
  PointId xeno = -1;
  bool terminal = false;
  std::pair<PointId, PointId> double_threat{-1, -1};
  std::unique_ptr<TrieNode> next;
  int source_line = 0;
};

// Ophelia to move.
struct TrieNode {
  std::map<PointId, TrieEdge> replies;
};

[[noreturn]] void conflict(int a, int b, const std::string& what) {
  throw StrategyError(Kind::kTableInvalid, "tables lines " + std::to_string(a) + " and " + std::to_string(b) +
                                               " disagree: " + what);
}

void insert_line(TrieNode& root, const TableLine& line) {
  std::vector<TrieNode*> frontier{&root};
  const auto& moves = line.moves;
  std::pair<PointId, PointId> xw{canonical_id(line.double_threat.first), canonical_id(line.double_threat.second)};
  if (xw.first > xw.second) std::swap(xw.first, xw.second);
  for (std::size_t i = 0; i < moves.size(); i += 2) {
    if (i + 1 >= moves.size()) {
      throw StrategyError(Kind::kTableInvalid,
                          "tables line " + std::to_string(line.source_line) + ": must end with a Xeno move");
    }
    const bool last = i + 2 == moves.size();
    const PointId x = canonical_id(moves[i + 1].points.front());
    std::vector<TrieNode*> next_frontier;
    for (TrieNode* node : frontier) {
      for (const auto& name : moves[i].points) {
        const PointId o = canonical_id(name);
        auto [it, fresh] = node->replies.try_emplace(o);
        TrieEdge& edge = it->second;
        if (fresh) {
          edge.xeno = x;
          edge.source_line = line.source_line;
          edge.terminal = last;
          if (last) {
            edge.double_threat = xw;
          } else {
            edge.next = std::make_unique<TrieNode>();
          }
        } else {
          if (edge.xeno != x) conflict(edge.source_line, line.source_line, "Xeno's reply to (" + name + ")");
          if (edge.terminal != last) {
            conflict(edge.source_line, line.source_line, "whether the line ends after (" + name + ")");
          }
          if (last && edge.double_threat != xw) {
            conflict(edge.source_line, line.source_line, "double threat after (" + name + ")");
          }
        }
        if (!last && std::find(next_frontier.begin(), next_frontier.end(), edge.next.get()) == next_frontier.end()) {
          next_frontier.push_back(edge.next.get());
        }
      }
    }
    frontier = std::move(next_frontier);
    if (last) break;
  }
}

// --- Case data ----------------------------------------------------------------

struct CaseData {
  int id = 0;
  bool row_case = false;  // Ophelia's second move completes the row block
  std::vector<PointId> x;  // canonical Xeno points of the position, sorted
  std::vector<PointId> o;
  GameState position{canonical_game()};
  OrbitPartition orbits;
  std::unique_ptr<TrieNode> root;
};

std::vector<PointId> sorted_ids(const GameState& s, Player p) {
  std::vector<PointId> out;
  for (PointId q : s.history()) {
    if (s.mask_of(p) & bit(q)) out.push_back(q);
  }
  std::sort(out.begin(), out.end());
  return out;
}

CaseData build_case(const StrategyCase& c) {
  CaseData data;
  data.id = c.id;
  try {
    data.position = replay_record(c.position, GameState(canonical_game()));
  } catch (const RecordError& e) {
    throw StrategyError(Kind::kTableInvalid, "case " + std::to_string(c.id) + " position: " + e.what());
  }
  const auto& h = data.position.history();
  if (h.size() != 5) {
    throw StrategyError(Kind::kTableInvalid, "case " + std::to_string(c.id) + " position must have five moves");
  }
  const auto& plane = canonical_pi4();
  const auto row = plane.line_through(h[0], h[1]);
  const Line& row_points = plane.lines[*row];
  if (std::find(row_points.begin(), row_points.end(), h[2]) == row_points.end()) {
    throw StrategyError(Kind::kTableInvalid,
                        "case " + std::to_string(c.id) + " position: Xeno's second move must share a line with his first and Ophelia's reply");
  }
  data.row_case = std::find(row_points.begin(), row_points.end(), h[3]) != row_points.end();
  data.x = sorted_ids(data.position, Player::kXeno);
  data.o = sorted_ids(data.position, Player::kOphelia);
  const PermGroup group = stabilizer(canonical_pair(), data.x, data.o);
  std::vector<PointId> free_points = data.position.empty_points();
  data.orbits = orbits(group, free_points);
  data.root = std::make_unique<TrieNode>();
  for (const auto& line : c.lines) insert_line(*data.root, line);
  return data;
}

// --- Labeling search ------------------------------------------------------------

using PairTable = std::array<std::array<int, kPoints>, kPoints>;

PairTable pair_lines(const AffinePlane& plane) {
  PairTable t{};
  for (auto& row : t) row.fill(-1);
  for (std::size_t l = 0; l < plane.lines.size(); ++l) {
    for (PointId a : plane.lines[l]) {
      for (PointId b : plane.lines[l]) {
        if (a != b) t[a][b] = static_cast<int>(l);
      }
    }
  }
  return t;
}

void require_pi4(const AffinePlane& plane) {
  if (plane.order != 4 || plane.num_points() != kPoints) {
    throw StrategyError(Kind::kNotPi4, "the strategy needs an affine plane of order 4");
  }
  if (!validate_plane(plane).ok()) throw StrategyError(Kind::kNotPi4, "not a valid affine plane of order 4");
}

// allowed[p]: bit set of canonical labels p may take.
std::optional<std::vector<PointId>> search_labeling(const PairTable& src, std::size_t src_lines,
                                                    const std::array<std::uint16_t, kPoints>& allowed) {
  static const PairTable tgt = pair_lines(canonical_pi4());
  std::array<PointId, kPoints> order{};
  for (int i = 0; i < kPoints; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](PointId a, PointId b) {
    return std::popcount(allowed[a]) < std::popcount(allowed[b]);
  });
  std::vector<PointId> image(kPoints, -1);
  std::vector<int> line_map(src_lines, -1);
  std::vector<int> line_inv(canonical_pi4().lines.size(), -1);
  std::uint16_t used = 0;

  auto rec = [&](auto&& self, int depth) -> bool {
    if (depth == kPoints) return true;
    const PointId p = order[depth];
    for (PointId q = 0; q < kPoints; ++q) {
      if (!(allowed[p] >> q & 1) || (used >> q & 1)) continue;
      std::vector<std::pair<int, int>> added;
      bool ok = true;
      for (int d = 0; d < depth && ok; ++d) {
        const PointId r = order[d];
        const int sl = src[p][r];
        const int tl = tgt[q][image[r]];
        if (line_map[sl] == -1 && line_inv[tl] == -1) {
          line_map[sl] = tl;
          line_inv[tl] = sl;
          added.emplace_back(sl, tl);
        } else if (line_map[sl] != tl || line_inv[tl] != sl) {
          ok = false;
        }
      }
      if (ok) {
        image[p] = q;
        used |= static_cast<std::uint16_t>(1u << q);
        if (self(self, depth + 1)) return true;
        used &= static_cast<std::uint16_t>(~(1u << q));
        image[p] = -1;
      }
      for (auto [sl, tl] : added) {
        line_map[sl] = -1;
        line_inv[tl] = -1;
      }
    }
    return false;
  };
  if (!rec(rec, 0)) return std::nullopt;
  return image;
}

std::optional<std::array<std::uint16_t, kPoints>> allowed_labels(const LabelingState& partial,
                                                                const std::vector<AnchorSet>& anchors) {
  std::array<std::uint16_t, kPoints> allowed;
  allowed.fill(0xFFFF);
  std::uint16_t exact_used = 0;
  for (std::size_t p = 0; p < partial.to_canonical.size() && p < kPoints; ++p) {
    const auto& label = partial.to_canonical[p];
    if (!label) continue;
    if (*label < 0 || *label >= kPoints || (exact_used >> *label & 1)) return std::nullopt;
    exact_used |= static_cast<std::uint16_t>(1u << *label);
    allowed[p] = static_cast<std::uint16_t>(1u << *label);
  }
  for (const auto& a : anchors) {
    if (a.points.size() != a.labels.size()) return std::nullopt;
    std::uint16_t labels = 0;
    for (PointId l : a.labels) {
      if (l < 0 || l >= kPoints) return std::nullopt;
      labels |= static_cast<std::uint16_t>(1u << l);
    }
    for (PointId p : a.points) {
      if (p < 0 || p >= kPoints) return std::nullopt;
      allowed[p] &= labels;
    }
  }
  return allowed;
}

std::string record_text(const GameState& state) { return format_record(record_from_history(state)); }

}  // namespace

// --- Tables -------------------------------------------------------------------

const StrategyCase& StrategyTables::case_by_id(int id) const {
  for (const auto& c : cases) {
    if (c.id == id) return c;
  }
  throw StrategyError(Kind::kTableInvalid, "no case " + std::to_string(id) + " in the tables");
}

StrategyTables parse_tables(std::string_view text) {
  StrategyTables tables;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  bool have_version = false;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = strip(raw);
    if (line.empty()) continue;
    const auto space = line.find_first_of(" \t");
    const std::string key = line.substr(0, space);
    const std::string rest = space == std::string::npos ? std::string() : strip(std::string_view(line).substr(space));
    if (!have_version) {
      if (key != "version") syntax(lineno, "expected 'version'");
      try {
        std::size_t used = 0;
        tables.version = std::stoi(rest, &used);
        if (used != rest.size() || tables.version < 1) throw std::invalid_argument(rest);
      } catch (const std::exception&) {
        syntax(lineno, "bad version '" + rest + "'");
      }
      have_version = true;
    } else if (key == "case") {
      StrategyCase c;
      try {
        std::size_t used = 0;
        c.id = std::stoi(rest, &used);
        if (used != rest.size()) throw std::invalid_argument(rest);
      } catch (const std::exception&) {
        syntax(lineno, "bad case id '" + rest + "'");
      }
      for (const auto& other : tables.cases) {
        if (other.id == c.id) syntax(lineno, "duplicate case " + rest);
      }
      tables.cases.push_back(std::move(c));
    } else if (key == "position") {
      if (tables.cases.empty()) syntax(lineno, "position outside a case");
      auto& c = tables.cases.back();
      if (!c.position.moves.empty() || !c.lines.empty()) syntax(lineno, "position must come first in a case");
      try {
        c.position = parse_record(rest);
      } catch (const RecordError& e) {
        syntax(lineno, e.what());
      }
      if (c.position.moves.empty() || c.position.double_threat) syntax(lineno, "bad position");
    } else if (key == "line") {
      if (tables.cases.empty() || tables.cases.back().position.moves.empty()) {
        syntax(lineno, "line before the case position");
      }
      tables.cases.back().lines.push_back(parse_continuation(rest, lineno));
    } else {
      syntax(lineno, "unknown keyword '" + key + "'");
    }
  }
  if (!have_version) syntax(lineno, "missing version");
  return tables;
}

std::string format_table_line(const TableLine& line) {
  std::string out;
  for (const auto& m : line.moves) {
    if (!out.empty()) out += ", ";
    out += format_move(m);
  }
  out += ", XW(" + line.double_threat.first + "," + line.double_threat.second + ")";
  return out;
}

std::string format_tables(const StrategyTables& tables) {
  std::string out = "version " + std::to_string(tables.version) + "\n";
  for (const auto& c : tables.cases) {
    out += "\ncase " + std::to_string(c.id) + "\n";
    out += "position " + format_record(c.position) + "\n";
    for (const auto& line : c.lines) out += "line " + format_table_line(line) + "\n";
  }
  return out;
}

const StrategyTables& builtin_tables() {
  static const StrategyTables tables = [] {
    StrategyTables t = parse_tables(builtin_tables_text());
    const auto problems = check_tables(t);
    if (!problems.empty()) throw StrategyError(Kind::kTableInvalid, "built-in tables: " + problems.front());
    return t;
  }();
  return tables;
}

std::vector<GameRecord> expand_line(const StrategyCase& c, const TableLine& line) {
  std::vector<GameRecord> out{c.position};
  for (const auto& m : line.moves) {
    std::vector<GameRecord> next;
    for (const auto& record : out) {
      for (const auto& p : m.points) {
        GameRecord r = record;
        r.moves.push_back({p, m.mover, m.forced});
        next.push_back(std::move(r));
      }
    }
    out = std::move(next);
  }
  for (auto& r : out) r.double_threat = line.double_threat;
  return out;
}

std::vector<std::string> check_tables(const StrategyTables& tables) {
  std::vector<std::string> problems;
  int row_cases = 0;
  int other_cases = 0;
  for (const auto& c : tables.cases) {
    const std::string where = "case " + std::to_string(c.id);
    for (const auto& line : c.lines) {
      for (const auto& record : expand_line(c, line)) {
        const std::string at = where + ", tables line " + std::to_string(line.source_line) + " [" +
                               format_record(record) + "]: ";
        try {
          GameState state(canonical_game());
          for (std::size_t i = 0; i < record.moves.size(); ++i) {
            const auto& m = record.moves[i];
            if (m.mover == Player::kXeno) {
              const auto threats_against = threat_points(state, Player::kOphelia);
              const PointId p = canonical_id(m.point);
              if (!threats_against.empty() && !std::binary_search(threats_against.begin(), threats_against.end(), p)) {
                throw StrategyError(Kind::kTableInvalid, "Xeno's " + m.point + " leaves an Ophelia threat open");
              }
            }
            GameRecord one;
            one.moves.push_back(m);
            state = replay_record(one, state);
          }
          GameRecord close;
          close.double_threat = record.double_threat;
          state = replay_record(close, state);
          if (!winning_moves(state, Player::kOphelia).empty()) {
            throw StrategyError(Kind::kTableInvalid, "Ophelia can complete a line at XW");
          }
        } catch (const std::exception& e) {
          problems.push_back(at + e.what());
        }
      }
    }
    try {
      const CaseData data = build_case(c);
      (data.row_case ? row_cases : other_cases)++;
      for (PointId rep : data.orbits.representatives()) {
        if (!data.root->replies.contains(rep)) {
          problems.push_back(where + ": no line answers (" + canonical_pi4().point_names[rep] + ")");
        }
      }
      // Ophelia replies missing from a node must leave Xeno an immediate win.
      auto walk = [&](auto&& self, const TrieNode& node, const GameState& state) -> void {
        const auto xeno_wins = threat_points(state, Player::kXeno);
        for (PointId p : state.empty_points()) {
          auto it = node.replies.find(p);
          if (it == node.replies.end()) {
            const bool answered = std::any_of(xeno_wins.begin(), xeno_wins.end(), [&](PointId w) { return w != p; });
            const bool is_first = &node == data.root.get();
            if (!answered && !is_first) {
              problems.push_back(where + ": no line answers " + record_text(state.apply_move(p)));
            }
            continue;
          }
          if (!it->second.next) continue;
          try {
            self(self, *it->second.next, state.apply_move(p).apply_move(it->second.xeno));
          } catch (const std::exception&) {
            // illegal lines are reported by the replay above
          }
        }
      };
      walk(walk, *data.root, data.position);
    } catch (const std::exception& e) {
      problems.push_back(where + ": " + e.what());
    }
  }
  if (row_cases != 1 || other_cases != 1) {
    problems.push_back("tables need one case where Ophelia's second move completes the row block and one where it does not");
  }
  return problems;
}

// --- Labeling -------------------------------------------------------------------

const char* to_string(Phase phase) {
  switch (phase) {
    case Phase::kOpening1:
      return "Opening1";
    case Phase::kOpening2:
      return "Opening2";
    case Phase::kCase1:
      return "Case1";
    case Phase::kCase2:
      return "Case2";
    case Phase::kTabled:
      return "Tabled";
    case Phase::kFinished:
      return "Finished";
  }
  return "?";
}

bool LabelingState::complete() const {
  return to_canonical.size() == kPoints &&
         std::all_of(to_canonical.begin(), to_canonical.end(), [](const auto& l) { return l.has_value(); });
}

std::optional<PointId> LabelingState::from_canonical(PointId label) const {
  for (std::size_t p = 0; p < to_canonical.size(); ++p) {
    if (to_canonical[p] == label) return static_cast<PointId>(p);
  }
  return std::nullopt;
}

std::optional<std::vector<PointId>> extend_labeling(const LabelingState& partial, const AffinePlane& plane,
                                                    const std::vector<AnchorSet>& anchors) {
  require_pi4(plane);
  const auto allowed = allowed_labels(partial, anchors);
  if (!allowed) return std::nullopt;
  return search_labeling(pair_lines(plane), plane.lines.size(), *allowed);
}

// --- Engine -------------------------------------------------------------------

struct XenoStrategy::Impl {
  AffinePlane plane;
  std::shared_ptr<const PositionalGame> game;
  PairTable pairs{};
  std::vector<CaseData> cases;

  const CaseData& case_data(bool row_case) const {
    for (const auto& c : cases) {
      if (c.row_case == row_case) return c;
    }
    throw StrategyError(Kind::kTableInvalid, "tables lack a needed case");
  }
  const CaseData& case_by_id(int id) const {
    for (const auto& c : cases) {
      if (c.id == id) return c;
    }
    throw StrategyError(Kind::kProtocol, "labeling names unknown case " + std::to_string(id));
  }

  [[noreturn]] void protocol(const GameState& state, const std::string& what) const {
    throw StrategyError(Kind::kProtocol, what + " after " + record_text(state));
  }

  PointId canon(const LabelingState& lab, PointId p, const GameState& state) const {
    if (p >= static_cast<PointId>(lab.to_canonical.size()) || !lab.to_canonical[p]) {
      protocol(state, "point " + plane.point_names[p] + " has no label");
    }
    return *lab.to_canonical[p];
  }

  PointId open_case(LabelingState& lab, const GameState& state) const {
    const auto& h = state.history();
    const Line& row = plane.lines[*lab.row_line];
    const bool row_case = std::find(row.begin(), row.end(), h[3]) != row.end();
    const CaseData& data = case_data(row_case);
    std::vector<PointId> candidates;
    if (row_case) {
      for (PointId p : state.empty_points()) {
        if (std::find(row.begin(), row.end(), p) == row.end()) candidates.push_back(p);
      }
    } else {
      for (PointId p : plane.lines[*plane.line_through(h[1], h[3])]) {
        if (state.is_empty(p)) candidates.push_back(p);
      }
      std::sort(candidates.begin(), candidates.end());
    }
    for (PointId p : candidates) {
      const std::vector<AnchorSet> anchors{{{h[0], h[2], p}, data.x}, {{h[1], h[3]}, data.o}};
      LabelingState none;
      const auto allowed = allowed_labels(none, anchors);
      if (auto map = search_labeling(pairs, plane.lines.size(), *allowed)) {
        lab.to_canonical.assign(map->begin(), map->end());
        lab.phase = row_case ? Phase::kCase1 : Phase::kCase2;
        lab.case_id = data.id;
        return p;
      }
    }
    protocol(state, "no labeling reaches a case position");
  }

  // Moves from the case position onward follow the tree.
  PointId tabled(const LabelingState& lab, const GameState& state) const {
    const CaseData& data = case_by_id(lab.case_id);
    const auto& h = state.history();
    const TrieNode* node = data.root.get();
    for (std::size_t i = 5; i < h.size(); i += 2) {
      const PointId o = canon(lab, h[i], state);
      auto it = node->replies.find(o);
      if (it == node->replies.end()) {
        protocol(state, "the tables do not cover Ophelia's " + plane.point_names[h[i]]);
      }
      const TrieEdge& edge = it->second;
      if (i + 1 == h.size()) {
        auto p = lab.from_canonical(edge.xeno);
        if (!p || !state.is_empty(*p)) protocol(state, "the tabled reply is not playable");
        return *p;
      }
      if (canon(lab, h[i + 1], state) != edge.xeno) protocol(state, "Xeno's history leaves the tables");
      if (!edge.next) protocol(state, "the line ended in a double threat Xeno did not use");
      node = edge.next.get();
    }
    protocol(state, "no Ophelia move to answer");
  }
};

XenoStrategy::XenoStrategy(const AffinePlane& plane, const StrategyTables& tables) : impl_(std::make_unique<Impl>()) {
  require_pi4(plane);
  impl_->plane = plane;
  impl_->game = PositionalGame::from_plane(plane, "pi4");
  impl_->pairs = pair_lines(plane);
  for (const auto& c : tables.cases) impl_->cases.push_back(build_case(c));
  impl_->case_data(true);
  impl_->case_data(false);
}

XenoStrategy::~XenoStrategy() = default;
XenoStrategy::XenoStrategy(XenoStrategy&&) noexcept = default;

const AffinePlane& XenoStrategy::plane() const { return impl_->plane; }
const std::shared_ptr<const PositionalGame>& XenoStrategy::game() const { return impl_->game; }

LabelingState XenoStrategy::initial_labeling() const {
  LabelingState lab;
  lab.to_canonical.assign(kPoints, std::nullopt);
  return lab;
}

std::pair<PointId, LabelingState> XenoStrategy::next_move(const LabelingState& labeling,
                                                          const GameState& state) const {
  const Impl& im = *impl_;
  if (state.game().lines() != im.game->lines() || state.game().num_points() != kPoints) {
    throw StrategyError(Kind::kProtocol, "state belongs to a different board");
  }
  if (winner(state).terminal()) im.protocol(state, "the game is over");
  if (state.to_move() != Player::kXeno) im.protocol(state, "it is Ophelia's turn");
  LabelingState lab = labeling;
  if (lab.to_canonical.size() != kPoints) lab.to_canonical.resize(kPoints);

  const auto wins = winning_moves(state, Player::kXeno);
  if (!wins.empty()) {
    lab.phase = Phase::kFinished;
    return {wins.front(), lab};
  }
  const auto& h = state.history();
  auto expect_phase = [&](Phase want) {
    if (lab.phase != want) {
      im.protocol(state, std::string("labeling is in phase ") + to_string(lab.phase) + ", expected " + to_string(want));
    }
  };
  switch (h.size()) {
    case 0: {
      expect_phase(Phase::kOpening1);
      lab.to_canonical[0] = 0;
      return {0, lab};
    }
    case 2: {
      expect_phase(Phase::kOpening1);
      if (lab.to_canonical[h[0]] != 0) im.protocol(state, "Xeno's first move is not r1");
      const std::size_t row = *im.plane.line_through(h[0], h[1]);
      lab.row_line = row;
      lab.index_class = im.plane.class_of_line(row);
      std::vector<PointId> rest;
      for (PointId p : im.plane.lines[row]) {
        if (state.is_empty(p)) rest.push_back(p);
      }
      std::sort(rest.begin(), rest.end());
      lab.to_canonical[h[1]] = 1;
      lab.to_canonical[rest[0]] = 2;
      lab.to_canonical[rest[1]] = 3;
      lab.phase = Phase::kOpening2;
      return {rest[0], lab};
    }
    case 4: {
      expect_phase(Phase::kOpening2);
      const PointId p = im.open_case(lab, state);
      return {p, lab};
    }
    case 6: {
      if (lab.phase != Phase::kCase1 && lab.phase != Phase::kCase2) expect_phase(Phase::kCase1);
      const CaseData& data = im.case_by_id(lab.case_id);
      const PointId c = im.canon(lab, h[5], state);
      if (data.orbits.representative_of[c] < 0) im.protocol(state, "Ophelia's reply is not a free point");
      const auto back = inverse(data.orbits.witness[c]).point_map();
      for (auto& label : lab.to_canonical) label = back[*label];
      lab.phase = Phase::kTabled;
      return {im.tabled(lab, state), lab};
    }
    default:
      if (h.size() % 2 != 0 || h.size() < 8) im.protocol(state, "unexpected position");
      expect_phase(Phase::kTabled);
      return {im.tabled(lab, state), lab};
  }
}

LabelingState XenoStrategy::labeling_for(const GameState& state) const {
  LabelingState lab = initial_labeling();
  const auto& h = state.history();
  for (std::size_t ply = 0; ply < h.size(); ply += 2) {
    const GameState prefix =
        GameState::from_moves(state.game_ptr(), std::vector<PointId>(h.begin(), h.begin() + ply));
    auto [p, next] = next_move(lab, prefix);
    if (p != h[ply]) {
      throw StrategyError(Kind::kProtocol, "Xeno's move " + std::to_string(ply / 2 + 1) + " (" +
                                               impl_->plane.point_names[h[ply]] + ") is not the strategy's " +
                                               impl_->plane.point_names[p]);
    }
    lab = std::move(next);
  }
  return lab;
}

// --- Verification -------------------------------------------------------------

namespace {

struct Verifier {
  const XenoStrategy& strategy;
  const VerifyOptions& options;
  VerificationReport report;

  void leaf(const GameState& state, Outcome::Kind kind, const std::string& failure) {
    ++report.leaves;
    report.max_length = std::max(report.max_length, state.ply());
    ++report.length_histogram[state.ply()];
    switch (kind) {
      case Outcome::Kind::kXenoWin:
        ++report.xeno_wins;
        return;
      case Outcome::Kind::kOpheliaWin:
        ++report.ophelia_wins;
        break;
      case Outcome::Kind::kDraw:
        ++report.draws;
        break;
      case Outcome::Kind::kOngoing:
        ++report.protocol_failures;
        break;
    }
    if (!report.refutation) report.refutation = record_text(state) + " -- " + failure;
  }

  void run(const GameState& state, const LabelingState& lab) {
    const Outcome outcome = winner(state);
    if (outcome.terminal()) {
      leaf(state, outcome.kind, outcome.kind == Outcome::Kind::kOpheliaWin ? "Ophelia wins" : "draw");
      return;
    }
    if (state.to_move() == Player::kOphelia) {
      for (PointId p : state.empty_points()) run(state.apply_move(p), lab);
      return;
    }
    ++report.decision_points;
    if (options.on_decision) options.on_decision(state);
    std::pair<PointId, LabelingState> move;
    try {
      move = strategy.next_move(lab, state);
    } catch (const StrategyError& e) {
      leaf(state, Outcome::Kind::kOngoing, e.what());
      return;
    }
    if (!state.is_empty(move.first)) {
      leaf(state, Outcome::Kind::kOngoing, "strategy picked an occupied point");
      return;
    }
    run(state.apply_move(move.first), move.second);
  }
};

}  // namespace

VerificationReport verify_strategy(const XenoStrategy& strategy, const VerifyOptions& options) {
  Verifier v{strategy, options, {}};
  v.run(GameState(strategy.game()), strategy.initial_labeling());
  return v.report;
}

VerificationReport verify_strategy(const AffinePlane& plane, const StrategyTables& tables,
                                   const VerifyOptions& options) {
  const XenoStrategy strategy(plane, tables);
  return verify_strategy(strategy, options);
}

}  // namespace planettt
