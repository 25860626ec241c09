#include "planettt/solver.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <set>

#include "planettt/record.hpp"

namespace planettt {

const char* to_string(Value v) {
  switch (v) {
    case Value::kFirstPlayerWin:
      return "FirstPlayerWin";
    case Value::kSecondPlayerWin:
      return "SecondPlayerWin";
    case Value::kDraw:
      return "Draw";
  }
  return "?";
}

namespace {

std::uint64_t mix(std::uint64_t h) {
  h ^= h >> 30;
  h *= 0xbf58476d1ce4e5b9u;
  h ^= h >> 27;
  h *= 0x94d049bb133111ebu;
  h ^= h >> 31;
  return h;
}

// Open addressing keyed by (x, o). x == o never occurs for a real position
// except the empty board (0, 0), so the empty slot marker is (~0, ~0).
template <typename V>
class PositionTable {
 public:
  PositionTable() { slots_.resize(1 << 12); }

  const V* find(Mask x, Mask o) const {
    std::size_t i = index(x, o);
    while (true) {
      const Slot& s = slots_[i];
      if (s.x == kEmpty && s.o == kEmpty) return nullptr;
      if (s.x == x && s.o == o) return &s.value;
      i = (i + 1) & (slots_.size() - 1);
    }
  }

  void insert(Mask x, Mask o, V value) {
    if ((size_ + 1) * 10 > slots_.size() * 7) grow();
    place(x, o, value);
  }

  std::size_t size() const { return size_; }

 private:
  static constexpr Mask kEmpty = ~Mask{0};
  struct Slot {
    Mask x = kEmpty;
    Mask o = kEmpty;
    V value{};
  };

  std::size_t index(Mask x, Mask o) const {
    return mix(x * 0x9e3779b97f4a7c15u ^ mix(o)) & (slots_.size() - 1);
  }

  void place(Mask x, Mask o, V value) {
    std::size_t i = index(x, o);
    while (true) {
      Slot& s = slots_[i];
      if (s.x == kEmpty && s.o == kEmpty) {
        s = {x, o, value};
        ++size_;
        return;
      }
      if (s.x == x && s.o == o) {
        s.value = value;
        return;
      }
      i = (i + 1) & (slots_.size() - 1);
    }
  }

  void grow() {
    std::vector<Slot> old = std::move(slots_);
    slots_.assign(old.size() * 2, Slot{});
    size_ = 0;
    for (const Slot& s : old) {
      if (!(s.x == kEmpty && s.o == kEmpty)) place(s.x, s.o, s.value);
    }
  }

  std::vector<Slot> slots_;
  std::size_t size_ = 0;
};

// Maps masks through a permutation eight bits at a time.
class MaskPermuter {
 public:
  explicit MaskPermuter(const PointPerm& perm) {
    for (std::size_t chunk = 0; chunk < 8; ++chunk) {
      for (int byte = 0; byte < 256; ++byte) {
        Mask out = 0;
        for (int b = 0; b < 8; ++b) {
          const std::size_t p = chunk * 8 + b;
          if ((byte >> b & 1) && p < perm.size()) out |= bit(perm[p]);
        }
        table_[chunk][byte] = out;
      }
    }
  }

  Mask apply(Mask m) const {
    Mask out = 0;
    for (std::size_t chunk = 0; m; ++chunk, m >>= 8) out |= table_[chunk][m & 0xff];
    return out;
  }

 private:
  std::array<std::array<Mask, 256>, 8> table_{};
};

}  // namespace

struct Solver::Impl {
  std::shared_ptr<const PositionalGame> game;
  SolveOptions options;
  std::vector<Mask> lines;
  Mask full = 0;
  std::vector<MaskPermuter> symmetry;
  PositionTable<std::int8_t> values;
  PositionTable<std::int16_t> scores;
  SearchStats stats;

  // Empty points completing a line of `own` not blocked by `other`.
  Mask completing(Mask own, Mask other) const {
    Mask out = 0;
    for (Mask line : lines) {
      if (line & other) continue;
      const Mask missing = line & ~own;
      if (missing && !(missing & (missing - 1))) out |= missing;
    }
    return out;
  }

  std::pair<Mask, Mask> key(Mask x, Mask o) const {
    if (symmetry.empty() || std::popcount(x | o) > options.symmetry_depth) return {x, o};
    std::pair<Mask, Mask> best{x, o};
    for (const auto& g : symmetry) {
      const std::pair<Mask, Mask> cand{g.apply(x), g.apply(o)};
      if (cand < best) best = cand;
    }
    return best;
  }

  // Value from Xeno's point of view; the position has no completed line.
  int search(Mask x, Mask o) {
    ++stats.nodes;
    const Mask empty = full & ~(x | o);
    if (!empty) return 0;
    const bool x_moves = std::popcount(x) == std::popcount(o);
    const int sign = x_moves ? 1 : -1;
    const Mask mover = x_moves ? x : o;
    const Mask other = x_moves ? o : x;
    if (completing(mover, other)) return sign;
    const Mask blocks = completing(other, mover);
    if (std::popcount(blocks) >= 2) return -sign;

    const auto [kx, ko] = key(x, o);
    if (const auto* hit = values.find(kx, ko)) {
      ++stats.table_hits;
      return *hit;
    }
    int best = -sign;
    for (Mask cand = blocks ? blocks : empty; cand; cand &= cand - 1) {
      const Mask m = cand & -cand;
      const int v = x_moves ? search(x | m, o) : search(x, o | m);
      if (v * sign > best * sign) best = v;
      if (best == sign) break;
    }
    values.insert(kx, ko, static_cast<std::int8_t>(best));
    return best;
  }

  int score(Mask x, Mask o) {
    ++stats.nodes;
    const Mask empty = full & ~(x | o);
    if (!empty) return 0;
    const bool x_moves = std::popcount(x) == std::popcount(o);
    const int sign = x_moves ? 1 : -1;
    const Mask mover = x_moves ? x : o;
    const Mask other = x_moves ? o : x;
    if (completing(mover, other)) return sign * 99;
    const Mask blocks = completing(other, mover);
    if (std::popcount(blocks) >= 2) return -sign * 98;

    const auto [kx, ko] = key(x, o);
    if (const auto* hit = scores.find(kx, ko)) {
      ++stats.table_hits;
      return *hit;
    }
    int best = -sign * 1000;
    for (Mask cand = blocks ? blocks : empty; cand; cand &= cand - 1) {
      const Mask m = cand & -cand;
      int s = x_moves ? score(x | m, o) : score(x, o | m);
      s = s > 0 ? s - 1 : s < 0 ? s + 1 : 0;
      if (s * sign > best * sign) best = s;
    }
    scores.insert(kx, ko, static_cast<std::int16_t>(best));
    return best;
  }

  // Value of a possibly terminal state.
  int state_value(const GameState& state) {
    const Outcome outcome = winner(state);
    switch (outcome.kind) {
      case Outcome::Kind::kXenoWin:
        return 1;
      case Outcome::Kind::kOpheliaWin:
        return -1;
      case Outcome::Kind::kDraw:
        return 0;
      case Outcome::Kind::kOngoing:
        break;
    }
    return search(state.x_mask(), state.o_mask());
  }

  void require_game(const GameState& state) const {
    if (state.game_ptr() != game && state.game().lines() != game->lines()) {
      throw SolverError("state belongs to a different game");
    }
  }
};

Solver::Solver(std::shared_ptr<const PositionalGame> game, SolveOptions options)
    : impl_(std::make_unique<Impl>()) {
  if (!game) throw SolverError("solver needs a game");
  impl_->game = std::move(game);
  impl_->options = std::move(options);
  impl_->lines = impl_->game->line_masks();
  impl_->full = impl_->game->full_mask();
  if (impl_->options.use_symmetry) {
    if (!impl_->options.symmetry_group) {
      impl_->options.symmetry_group = automorphisms(*impl_->game);
    }
    for (const auto& perm : *impl_->options.symmetry_group) {
      if (!preserves_lines(*impl_->game, perm)) {
        throw SolverError("symmetry group element does not map winning lines onto winning lines");
      }
      impl_->symmetry.emplace_back(perm);
    }
  }
}

Solver::~Solver() = default;
Solver::Solver(Solver&&) noexcept = default;
Solver& Solver::operator=(Solver&&) noexcept = default;

const SearchStats& Solver::total_stats() const { return impl_->stats; }
std::size_t Solver::table_size() const { return impl_->values.size(); }
const PositionalGame& Solver::game() const { return *impl_->game; }

Value Solver::value(const GameState& state) {
  impl_->require_game(state);
  return static_cast<Value>(impl_->state_value(state));
}

GameValue Solver::solve(const GameState& state) {
  impl_->require_game(state);
  const SearchStats before = impl_->stats;
  GameValue result;
  result.value = static_cast<Value>(impl_->state_value(state));
  if (impl_->options.principal_variation) {
    GameState cur = state;
    while (!winner(cur).terminal()) {
      const PointId p = best_move(cur).first;
      result.principal_variation.push_back(p);
      cur = cur.apply_move(p);
    }
  }
  result.stats.nodes = impl_->stats.nodes - before.nodes;
  result.stats.table_hits = impl_->stats.table_hits - before.table_hits;
  return result;
}

std::pair<PointId, GameValue> Solver::best_move(const GameState& state) {
  impl_->require_game(state);
  if (winner(state).terminal()) throw SolverError("no move: the game is over");
  const Player mover = state.to_move();
  const int sign = mover == Player::kXeno ? 1 : -1;
  const auto wins = winning_moves(state, mover);
  if (!wins.empty()) {
    return {wins.front(), GameValue{mover == Player::kXeno ? Value::kFirstPlayerWin
                                                           : Value::kSecondPlayerWin,
                                    {},
                                    {}}};
  }
  auto candidates = forced_moves(state, mover);
  if (candidates.empty()) candidates = state.empty_points();
  PointId best_point = -1;
  int best = -2;
  for (PointId p : candidates) {
    const int v = impl_->state_value(state.apply_move(p)) * sign;
    if (v > best) {
      best = v;
      best_point = p;
    }
    if (best == 1) break;
  }
  return {best_point, GameValue{static_cast<Value>(best * sign), {}, {}}};
}

int Solver::distance_score(const GameState& state) {
  impl_->require_game(state);
  switch (winner(state).kind) {
    case Outcome::Kind::kXenoWin:
      return 100;
    case Outcome::Kind::kOpheliaWin:
      return -100;
    case Outcome::Kind::kDraw:
      return 0;
    case Outcome::Kind::kOngoing:
      break;
  }
  return impl_->score(state.x_mask(), state.o_mask());
}

std::pair<PointId, int> Solver::most_resistant_move(const GameState& state) {
  impl_->require_game(state);
  if (winner(state).terminal()) throw SolverError("no move: the game is over");
  const int sign = state.to_move() == Player::kXeno ? 1 : -1;
  PointId best_point = -1;
  int best = -1000;
  for (PointId p : state.empty_points()) {
    int s = distance_score(state.apply_move(p));
    s = s > 0 ? s - 1 : s < 0 ? s + 1 : 0;
    if (s * sign > best) {
      best = s * sign;
      best_point = p;
    }
  }
  return {best_point, best * sign};
}

GameValue solve(std::shared_ptr<const PositionalGame> game, const GameState& state,
                const SolveOptions& options) {
  Solver solver(std::move(game), options);
  return solver.solve(state);
}

bool preserves_lines(const PositionalGame& game, const PointPerm& perm) {
  const int n = game.num_points();
  if (static_cast<int>(perm.size()) != n) return false;
  std::vector<char> hit(n, 0);
  for (PointId p : perm) {
    if (p < 0 || p >= n || hit[p]) return false;
    hit[p] = 1;
  }
  const std::set<Mask> lines(game.line_masks().begin(), game.line_masks().end());
  const MaskPermuter g(perm);
  return std::all_of(lines.begin(), lines.end(), [&](Mask l) { return lines.count(g.apply(l)) > 0; });
}

std::vector<PointPerm> automorphisms(const PositionalGame& game) {
  const int n = game.num_points();
  const auto& lines = game.line_masks();
  const std::set<Mask> line_set(lines.begin(), lines.end());
  std::vector<int> degree(n, 0);
  for (Mask l : lines) {
    for (Mask m = l; m; m &= m - 1) ++degree[std::countr_zero(m)];
  }
  std::vector<PointPerm> out;
  PointPerm perm(n, -1);
  Mask used = 0;
  Mask assigned = 0;

  // Images of the assigned part of every line must lie in a common line, and
  // fully assigned lines must map onto lines.
  auto consistent = [&]() {
    for (Mask l : lines) {
      const Mask part = l & assigned;
      if (!part) continue;
      Mask image = 0;
      for (Mask m = part; m; m &= m - 1) image |= bit(perm[std::countr_zero(m)]);
      if (part == l) {
        if (!line_set.count(image)) return false;
        continue;
      }
      const bool covered = std::any_of(lines.begin(), lines.end(), [&](Mask target) {
        return (target & image) == image && std::popcount(target) == std::popcount(l);
      });
      if (!covered) return false;
    }
    return true;
  };

  auto recurse = [&](auto&& self, int p) -> void {
    if (p == n) {
      out.push_back(perm);
      return;
    }
    for (int q = 0; q < n; ++q) {
      if ((used & bit(q)) || degree[q] != degree[p]) continue;
      perm[p] = q;
      used |= bit(q);
      assigned |= bit(p);
      if (consistent()) self(self, p + 1);
      used &= ~bit(q);
      assigned &= ~bit(p);
      perm[p] = -1;
    }
  };
  recurse(recurse, 0);
  std::sort(out.begin(), out.end());
  return out;
}

PositionsReport verify_strategy_positions(Solver& solver, const std::vector<GameState>& states) {
  PositionsReport report;
  for (const auto& state : states) {
    ++report.checked;
    if (winner(state).kind == Outcome::Kind::kXenoWin) continue;
    const GameValue v = solver.solve(state);
    if (v.value == Value::kFirstPlayerWin) continue;
    GameState end = state;
    for (PointId p : v.principal_variation) end = end.apply_move(p);
    report.mismatches.push_back(
        {state.history(), v.value, format_record(record_from_history(end, state.ply()))});
  }
  return report;
}

}  // namespace planettt
