#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "planettt/game.hpp"

namespace planettt {

// ASCII game notation:
//
//   record  = [ item { "," item } ] [ ";" ] ;
//   item    = xeno | ophelia | double ;
//   xeno    = [ "!" ] point ;
//   ophelia = "(" [ "!" ] point ")" ;
//   double  = "XW(" point "," point ")" ;        (last item only)
//   point   = lower { lower | digit } ;
//
// "!" marks a forced move; XW(p,q) ends the record with a Xeno double threat.
struct RecordMove {
  std::string point;
  Player mover = Player::kXeno;
  bool forced = false;

  bool operator==(const RecordMove&) const = default;
};

struct GameRecord {
  std::vector<RecordMove> moves;
  std::optional<std::pair<std::string, std::string>> double_threat;

  bool operator==(const GameRecord&) const = default;
};

class RecordError : public std::runtime_error {
 public:
  enum class Kind {
    kMalformedToken,
    kAlternation,
    kMisplacedDoubleThreat,
    kUnknownPoint,
    kIllegalMove,
    kNotForced,
    kNotDoubleThreat,
  };

  RecordError(Kind kind, std::size_t item, const std::string& what);

  Kind kind() const { return kind_; }
  std::size_t item() const { return item_; }  // 0-based item index

 private:
  Kind kind_;
  std::size_t item_;
};

const char* to_string(RecordError::Kind kind);

// `first` is the mover of the first move (Ophelia for continuations).
GameRecord parse_record(std::string_view text, Player first = Player::kXeno);
std::string format_record(const GameRecord& record);

// Replays the record from `start`, checking legality, every "!" mark and
// the closing XW pair. Returns the state after the last move.
GameState replay_record(const GameRecord& record, const GameState& start);

// Record of state.history()[from_ply..] with forced marks filled in.
GameRecord record_from_history(const GameState& state, std::size_t from_ply = 0);

}  // namespace planettt
