#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "planettt/designs.hpp"

namespace planettt {

enum class Player : std::uint8_t { kXeno, kOphelia };

inline Player opponent(Player p) { return p == Player::kXeno ? Player::kOphelia : Player::kXeno; }
const char* to_string(Player p);

using Mask = std::uint64_t;

inline Mask bit(PointId p) { return Mask{1} << p; }

class IllegalMoveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GameOverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Points 0..n-1 (n <= 64) and the winning lines over them.
class PositionalGame {
 public:
  PositionalGame(std::string name, std::vector<std::string> point_names, std::vector<Line> lines);

  static std::shared_ptr<const PositionalGame> from_plane(const AffinePlane& plane,
                                                          std::string name = "plane");
  // Classic 3x3 board, points named x1y1..x3y3 row by row.
  static std::shared_ptr<const PositionalGame> tic_tac_toe();
  // The projective closure of a plane: one extra point per parallel class
  // (named inf1..) added to its lines, plus the line at infinity.
  static std::shared_ptr<const PositionalGame> projective_closure(const AffinePlane& plane);

  const std::string& name() const { return name_; }
  int num_points() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& point_names() const { return names_; }
  const std::string& point_name(PointId p) const { return names_.at(p); }
  std::optional<PointId> find_point(std::string_view name) const;
  const std::vector<Line>& lines() const { return lines_; }
  const std::vector<Mask>& line_masks() const { return masks_; }
  Mask full_mask() const { return full_; }
  std::string format_line(std::size_t line) const;

 private:
  std::string name_;
  std::vector<std::string> names_;
  std::vector<Line> lines_;
  std::vector<Mask> masks_;
  Mask full_ = 0;
};

struct Outcome {
  enum class Kind { kOngoing, kXenoWin, kOpheliaWin, kDraw };
  Kind kind = Kind::kOngoing;
  std::optional<std::size_t> line;  // completed line for wins

  bool terminal() const { return kind != Kind::kOngoing; }
};

const char* to_string(Outcome::Kind kind);

struct Threat {
  std::size_t line;
  PointId missing;

  auto operator<=>(const Threat&) const = default;
};

// Xeno moves first. Immutable: apply_move returns a new state.
class GameState {
 public:
  explicit GameState(std::shared_ptr<const PositionalGame> game);

  // Replays `moves` from the empty board (throws on illegal moves).
  static GameState from_moves(std::shared_ptr<const PositionalGame> game,
                              const std::vector<PointId>& moves);

  const PositionalGame& game() const { return *game_; }
  const std::shared_ptr<const PositionalGame>& game_ptr() const { return game_; }
  Mask x_mask() const { return x_; }
  Mask o_mask() const { return o_; }
  Mask occupied() const { return x_ | o_; }
  Mask empty_mask() const { return game_->full_mask() & ~occupied(); }
  Mask mask_of(Player p) const { return p == Player::kXeno ? x_ : o_; }
  const std::vector<PointId>& history() const { return history_; }
  std::size_t ply() const { return history_.size(); }
  Player to_move() const { return history_.size() % 2 == 0 ? Player::kXeno : Player::kOphelia; }
  bool is_empty(PointId p) const { return !(occupied() & bit(p)); }
  std::vector<PointId> empty_points() const;

  // Throws IllegalMoveError for an occupied or unknown point and
  // GameOverError once the game has a winner or the board is full.
  GameState apply_move(PointId p) const;

 private:
  std::shared_ptr<const PositionalGame> game_;
  Mask x_ = 0;
  Mask o_ = 0;
  std::vector<PointId> history_;
};

Outcome winner(const GameState& state);

// Lines where `player` holds all but one point and the last one is empty.
std::vector<Threat> threats(const GameState& state, Player player);
// Distinct missing points of threats(state, player), ascending.
std::vector<PointId> threat_points(const GameState& state, Player player);
// Points `player` must take to avoid losing on the opponent's next move.
std::vector<PointId> forced_moves(const GameState& state, Player player);
// Two distinct missing points of `player`'s threats, if there are two.
std::optional<std::pair<PointId, PointId>> double_threat(const GameState& state, Player player);
// Empty points completing a line for `player`.
std::vector<PointId> winning_moves(const GameState& state, Player player);

}  // namespace planettt
