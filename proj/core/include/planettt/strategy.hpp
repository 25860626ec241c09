#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "planettt/designs.hpp"
#include "planettt/game.hpp"
#include "planettt/record.hpp"

namespace planettt {

class StrategyError : public std::runtime_error {
 public:
  enum class Kind {
    kTableSyntax,   // malformed table text
    kTableInvalid,  // table contradicts the game (bad replay, conflict, gap)
    kNotPi4,        // plane is not an affine plane of order 4
    kProtocol,      // history the strategy cannot answer
  };

  StrategyError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// --- Strategy tables -------------------------------------------------------
//
// Text format (see data/strategy/pi4.tables):
//
//   version <n>
//   case <id>
//   position <record from the empty board>
//   line <continuation>
//
// A continuation is record notation starting with an Ophelia move, where an
// Ophelia token may list alternatives "(p|q|r)", and ending in XW(p,q).

struct TableMove {
  std::vector<std::string> points;  // one entry, or Ophelia's alternatives
  Player mover = Player::kXeno;
  bool forced = false;

  bool operator==(const TableMove&) const = default;
};

struct TableLine {
  std::vector<TableMove> moves;
  std::pair<std::string, std::string> double_threat;
  int source_line = 0;  // 1-based line in the table text

  bool operator==(const TableLine& other) const {
    return moves == other.moves && double_threat == other.double_threat;
  }
};

struct StrategyCase {
  int id = 0;
  GameRecord position;
  std::vector<TableLine> lines;

  bool operator==(const StrategyCase&) const = default;
};

struct StrategyTables {
  int version = 0;
  std::vector<StrategyCase> cases;

  bool operator==(const StrategyTables&) const = default;
  const StrategyCase& case_by_id(int id) const;
};

std::string_view builtin_tables_text();
StrategyTables parse_tables(std::string_view text);
std::string format_tables(const StrategyTables& tables);
// Shipped tables, parsed and checked once. Throws if they fail check_tables.
const StrategyTables& builtin_tables();

// Continuation text of one line, e.g. "(c2), a1, (!b1), ...".
std::string format_table_line(const TableLine& line);

// Full records from the empty board: the case position followed by the
// line, one record per choice of Ophelia alternatives.
std::vector<GameRecord> expand_line(const StrategyCase& c, const TableLine& line);

// Problems found by replaying every expanded line on the canonical plane
// (legality, forced marks, XW pairs, Ophelia having no winning reply at XW),
// by merging lines into a move tree (conflicting Xeno replies), and by
// comparing each case's first replies with the orbit representatives of the
// case position's stabilizer. Empty when the tables are sound.
std::vector<std::string> check_tables(const StrategyTables& tables);

// --- Labeling --------------------------------------------------------------

enum class Phase { kOpening1, kOpening2, kCase1, kCase2, kTabled, kFinished };

const char* to_string(Phase phase);

// Partial map from the plane being played on to canonical pi4 ids
// (r1=0 .. b4=15), grown as the opening protocol names points.
struct LabelingState {
  Phase phase = Phase::kOpening1;
  std::vector<std::optional<PointId>> to_canonical;
  std::optional<std::size_t> row_line;     // line of the played plane
  std::optional<std::size_t> index_class;  // class of the played plane
  int case_id = 0;

  bool operator==(const LabelingState&) const = default;
  bool complete() const;
  std::optional<PointId> from_canonical(PointId label) const;
};

// The listed plane points must map onto the listed labels as a set.
struct AnchorSet {
  std::vector<PointId> points;
  std::vector<PointId> labels;
};

// A full isomorphism onto the canonical plane extending the exact entries of
// `partial` and respecting `anchors`; backtracking picks the smallest label
// first so the answer is deterministic. nullopt if none exists. Throws
// StrategyError(kNotPi4) for planes that are not valid and of order 4.
std::optional<std::vector<PointId>> extend_labeling(const LabelingState& partial,
                                                    const AffinePlane& plane,
                                                    const std::vector<AnchorSet>& anchors = {});

// --- The engine ------------------------------------------------------------

// Plays Xeno on any labelled copy of pi4: opening protocol, orbit reduction
// of Ophelia's first free reply under the stabilizer of the case position,
// then the tables, always completing a line when one is available.
class XenoStrategy {
 public:
  explicit XenoStrategy(const AffinePlane& plane, const StrategyTables& tables = builtin_tables());
  ~XenoStrategy();
  XenoStrategy(XenoStrategy&&) noexcept;

  const AffinePlane& plane() const;
  const std::shared_ptr<const PositionalGame>& game() const;

  LabelingState initial_labeling() const;
  // Throws StrategyError(kProtocol) when `state` is not a position the
  // strategy reaches with Xeno to move.
  std::pair<PointId, LabelingState> next_move(const LabelingState& labeling,
                                              const GameState& state) const;
  // Labeling after replaying Xeno's moves in `state`; throws kProtocol if a
  // Xeno move in the history differs from what the strategy plays.
  LabelingState labeling_for(const GameState& state) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// --- Exhaustive verification -----------------------------------------------

struct VerifyOptions {
  // Called at every position where Xeno is about to move.
  std::function<void(const GameState&)> on_decision;
};

struct VerificationReport {
  std::uint64_t leaves = 0;
  std::uint64_t xeno_wins = 0;
  std::uint64_t ophelia_wins = 0;
  std::uint64_t draws = 0;
  std::uint64_t protocol_failures = 0;
  std::uint64_t decision_points = 0;
  std::size_t max_length = 0;
  std::map<std::size_t, std::uint64_t> length_histogram;
  // First failing playout in record notation, with the reason.
  std::optional<std::string> refutation;

  bool ok() const { return leaves > 0 && xeno_wins == leaves; }
};

// Xeno follows the strategy; Ophelia tries every legal move at every turn.
VerificationReport verify_strategy(const XenoStrategy& strategy, const VerifyOptions& options = {});
VerificationReport verify_strategy(const AffinePlane& plane,
                                   const StrategyTables& tables = builtin_tables(),
                                   const VerifyOptions& options = {});

}  // namespace planettt
