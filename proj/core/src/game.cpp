#include "planettt/game.hpp"

#include <algorithm>
#include <bit>

namespace planettt {

const char* to_string(Player p) { return p == Player::kXeno ? "Xeno" : "Ophelia"; }

const char* to_string(Outcome::Kind kind) {
  switch (kind) {
    case Outcome::Kind::kOngoing:
      return "Ongoing";
    case Outcome::Kind::kXenoWin:
      return "XenoWin";
    case Outcome::Kind::kOpheliaWin:
      return "OpheliaWin";
    case Outcome::Kind::kDraw:
      return "Draw";
  }
  return "?";
}

PositionalGame::PositionalGame(std::string name, std::vector<std::string> point_names,
                               std::vector<Line> lines)
    : name_(std::move(name)), names_(std::move(point_names)), lines_(std::move(lines)) {
  if (names_.empty() || names_.size() > 64) {
    throw std::invalid_argument("positional game needs 1..64 points");
  }
  full_ = names_.size() == 64 ? ~Mask{0} : (Mask{1} << names_.size()) - 1;
  for (auto& line : lines_) {
    std::sort(line.begin(), line.end());
    if (line.size() < 2 || std::adjacent_find(line.begin(), line.end()) != line.end()) {
      throw std::invalid_argument("winning line needs at least 2 distinct points");
    }
    Mask m = 0;
    for (PointId p : line) {
      if (p < 0 || p >= static_cast<PointId>(names_.size())) {
        throw std::invalid_argument("winning line uses an unknown point");
      }
      m |= bit(p);
    }
    masks_.push_back(m);
  }
}

std::shared_ptr<const PositionalGame> PositionalGame::from_plane(const AffinePlane& plane,
                                                                 std::string name) {
  return std::make_shared<const PositionalGame>(std::move(name), plane.point_names, plane.lines);
}

std::shared_ptr<const PositionalGame> PositionalGame::tic_tac_toe() {
  std::vector<std::string> names;
  for (int r = 1; r <= 3; ++r) {
    for (int c = 1; c <= 3; ++c) names.push_back("x" + std::to_string(c) + "y" + std::to_string(r));
  }
  std::vector<Line> lines = {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}, {0, 3, 6},
                             {1, 4, 7}, {2, 5, 8}, {0, 4, 8}, {2, 4, 6}};
  return std::make_shared<const PositionalGame>("ttt3", std::move(names), std::move(lines));
}

std::shared_ptr<const PositionalGame> PositionalGame::projective_closure(const AffinePlane& plane) {
  std::vector<std::string> names = plane.point_names;
  std::vector<Line> lines = plane.lines;
  Line at_infinity;
  for (std::size_t c = 0; c < plane.classes.size(); ++c) {
    const PointId inf = static_cast<PointId>(names.size());
    names.push_back("inf" + std::to_string(c + 1));
    at_infinity.push_back(inf);
    for (std::size_t l : plane.classes[c].lines) lines[l].push_back(inf);
  }
  lines.push_back(std::move(at_infinity));
  return std::make_shared<const PositionalGame>("proj" + std::to_string(plane.order),
                                                std::move(names), std::move(lines));
}

std::optional<PointId> PositionalGame::find_point(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return static_cast<PointId>(i);
  }
  return std::nullopt;
}

std::string PositionalGame::format_line(std::size_t line) const {
  std::string out = "{";
  for (std::size_t i = 0; i < lines_.at(line).size(); ++i) {
    if (i) out += ",";
    out += names_[lines_[line][i]];
  }
  return out + "}";
}

GameState::GameState(std::shared_ptr<const PositionalGame> game) : game_(std::move(game)) {
  if (!game_) throw std::invalid_argument("game state needs a game");
}

GameState GameState::from_moves(std::shared_ptr<const PositionalGame> game,
                                const std::vector<PointId>& moves) {
  GameState state(std::move(game));
  for (PointId p : moves) state = state.apply_move(p);
  return state;
}

std::vector<PointId> GameState::empty_points() const {
  std::vector<PointId> out;
  for (Mask m = empty_mask(); m; m &= m - 1) out.push_back(std::countr_zero(m));
  return out;
}

GameState GameState::apply_move(PointId p) const {
  if (p < 0 || p >= game_->num_points()) {
    throw IllegalMoveError("point id " + std::to_string(p) + " is not on the board");
  }
  if (auto outcome = winner(*this); outcome.terminal()) {
    throw GameOverError(std::string("game is over: ") + to_string(outcome.kind));
  }
  if (!is_empty(p)) throw IllegalMoveError("point " + game_->point_name(p) + " is occupied");
  GameState next = *this;
  (to_move() == Player::kXeno ? next.x_ : next.o_) |= bit(p);
  next.history_.push_back(p);
  return next;
}

Outcome winner(const GameState& state) {
  const auto& masks = state.game().line_masks();
  // Only the last mover can have completed a line.
  const Player last = opponent(state.to_move());
  const Mask own = state.mask_of(last);
  for (std::size_t l = 0; l < masks.size(); ++l) {
    if ((masks[l] & own) == masks[l]) {
      return {last == Player::kXeno ? Outcome::Kind::kXenoWin : Outcome::Kind::kOpheliaWin, l};
    }
  }
  if (state.empty_mask() == 0) return {Outcome::Kind::kDraw, std::nullopt};
  return {};
}

std::vector<Threat> threats(const GameState& state, Player player) {
  std::vector<Threat> out;
  const Mask own = state.mask_of(player);
  const Mask other = state.mask_of(opponent(player));
  const auto& masks = state.game().line_masks();
  for (std::size_t l = 0; l < masks.size(); ++l) {
    if (masks[l] & other) continue;
    const Mask missing = masks[l] & ~own;
    if (std::popcount(missing) == 1) out.push_back({l, std::countr_zero(missing)});
  }
  return out;
}

std::vector<PointId> threat_points(const GameState& state, Player player) {
  std::vector<PointId> out;
  for (const auto& t : threats(state, player)) out.push_back(t.missing);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<PointId> forced_moves(const GameState& state, Player player) {
  return threat_points(state, opponent(player));
}

std::optional<std::pair<PointId, PointId>> double_threat(const GameState& state, Player player) {
  const auto points = threat_points(state, player);
  if (points.size() < 2) return std::nullopt;
  return std::make_pair(points[0], points[1]);
}

std::vector<PointId> winning_moves(const GameState& state, Player player) {
  return threat_points(state, player);
}

}  // namespace planettt
