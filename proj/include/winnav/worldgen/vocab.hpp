#pragma once

#include <string>
#include <vector>

#include "winnav/core/types.hpp"

namespace winnav {

// Instruction vocabulary: 14 room-category words, 7 relation words, and
// padding/terminator. Token ids 0..13 coincide with RoomType values.
namespace tok {
inline constexpr int kEnter = 14;
inline constexpr int kExit = 15;
inline constexpr int kPass = 16;
inline constexpr int kTurnLeft = 17;
inline constexpr int kTurnRight = 18;
inline constexpr int kGoStraight = 19;
inline constexpr int kStopAt = 20;
inline constexpr int kPad = 21;
inline constexpr int kEos = 22;
}  // namespace tok

inline constexpr int kVocabSize = 23;

inline const char* token_name(int id) {
  if (id >= 0 && id < kNumRoomCategories) return room_type_name(static_cast<RoomType>(id));
  switch (id) {
    case tok::kEnter: return "enter";
    case tok::kExit: return "exit";
    case tok::kPass: return "pass";
    case tok::kTurnLeft: return "turn_left";
    case tok::kTurnRight: return "turn_right";
    case tok::kGoStraight: return "go_straight";
    case tok::kStopAt: return "stop_at";
    case tok::kPad: return "<pad>";
    case tok::kEos: return "<eos>";
    default: throw UsageError("bad token id: " + std::to_string(id));
  }
}

inline int token_from_name(const std::string& name) {
  for (int i = 0; i < kVocabSize; ++i)
    if (name == token_name(i)) return i;
  throw DataError("unknown token: " + name);
}

inline int room_token(RoomType t) { return static_cast<int>(t); }

}  // namespace winnav
