#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "planettt/game.hpp"

namespace planettt {

// Ordered from the first player's point of view.
enum class Value : std::int8_t { kSecondPlayerWin = -1, kDraw = 0, kFirstPlayerWin = 1 };

const char* to_string(Value v);

struct SearchStats {
  std::uint64_t nodes = 0;
  std::uint64_t table_hits = 0;
};

struct GameValue {
  Value value = Value::kDraw;
  std::vector<PointId> principal_variation;  // empty when not requested
  SearchStats stats;
};

// A permutation of point ids: perm[p] is the image of p.
using PointPerm = std::vector<PointId>;

struct SolveOptions {
  bool use_symmetry = false;
  // Defaults to the full automorphism group of the game when symmetry is on.
  std::optional<std::vector<PointPerm>> symmetry_group;
  // Positions with at most this many occupied points are canonicalized.
  int symmetry_depth = 6;
  bool principal_variation = true;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exact negamax over (Xeno mask, Ophelia mask) with a transposition table.
// Immediate wins are taken first, a double threat by the opponent is a loss,
// a single opponent threat must be blocked, otherwise points are tried in id
// order. Values are exact, never bounds, so the table can be reused across
// calls. Not thread-safe.
class Solver {
 public:
  explicit Solver(std::shared_ptr<const PositionalGame> game, SolveOptions options = {});
  ~Solver();
  Solver(Solver&&) noexcept;
  Solver& operator=(Solver&&) noexcept;

  // Stats in the result cover this call only.
  GameValue solve(const GameState& state);
  Value value(const GameState& state);

  // Optimal move; immediate wins first, then blocks of opponent threats,
  // then the lowest id among moves that keep the optimal value. Throws SolverError on terminal states.
  std::pair<PointId, GameValue> best_move(const GameState& state);

  // Signed distance score from Xeno's point of view: +(100 - d) when Xeno
  // wins d plies from now with the winner hurrying and the loser delaying,
  // -(100 - d) for Ophelia, 0 for a draw.
  int distance_score(const GameState& state);
  // Move maximizing the mover's distance score (fastest win, slowest loss).
  std::pair<PointId, int> most_resistant_move(const GameState& state);

  const SearchStats& total_stats() const;
  std::size_t table_size() const;
  const PositionalGame& game() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

GameValue solve(std::shared_ptr<const PositionalGame> game, const GameState& state,
                const SolveOptions& options = {});

// Every line-preserving permutation of the points, found by backtracking.
// Sorted; the identity comes first.
std::vector<PointPerm> automorphisms(const PositionalGame& game);

// True if perm maps the set of winning lines onto itself.
bool preserves_lines(const PositionalGame& game, const PointPerm& perm);

struct PositionMismatch {
  std::vector<PointId> history;
  Value value;
  std::string refutation;  // principal variation in record notation
};

struct PositionsReport {
  std::size_t checked = 0;
  std::vector<PositionMismatch> mismatches;
  bool ok() const { return mismatches.empty(); }
};

// Each state must already be a Xeno win or solve to FirstPlayerWin.
PositionsReport verify_strategy_positions(Solver& solver, const std::vector<GameState>& states);

}  // namespace planettt
