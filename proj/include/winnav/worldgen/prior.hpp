#pragma once

#include <array>
#include <sstream>
#include <vector>

#include "winnav/core/types.hpp"
#include "winnav/util/fingerprint.hpp"
#include "winnav/util/text_io.hpp"

namespace winnav {

// Generation prior: pairwise room-type propensities plus size and door
// controls. The propensity matrix acts as a pairwise potential when room
// types are sampled, so empirical neighbor-type frequencies track its
// ratios over many houses.
struct LayoutPrior {
  // Symmetric nonnegative propensities over the 12 generated types
  // (sentinel rows/cols exist but are ignored by generation).
  std::array<double, kNumRoomCategories * kNumRoomCategories> adjacency_propensity{};
  int room_count_min = 4;
  int room_count_max = 9;
  int room_size_min = 4;  // cells per side
  int room_size_max = 6;
  // Per-pair probability that a shared wall gets a door (before the
  // connectivity completion pass).
  std::array<double, kNumRoomCategories * kNumRoomCategories> door_probability{};
  // Preferred side length per type, clamped into [room_size_min, room_size_max].
  std::array<int, kNumGeneratedTypes> type_size{};

  double propensity(RoomType a, RoomType b) const {
    return adjacency_propensity[static_cast<std::size_t>(a) * kNumRoomCategories +
                                static_cast<std::size_t>(b)];
  }
  void set_propensity(RoomType a, RoomType b, double v) {
    adjacency_propensity[static_cast<std::size_t>(a) * kNumRoomCategories + static_cast<std::size_t>(b)] = v;
    adjacency_propensity[static_cast<std::size_t>(b) * kNumRoomCategories + static_cast<std::size_t>(a)] = v;
  }
  double door_prob(RoomType a, RoomType b) const {
    return door_probability[static_cast<std::size_t>(a) * kNumRoomCategories + static_cast<std::size_t>(b)];
  }
  void set_door_prob_all(double v) {
    for (auto& x : door_probability) x = v;
  }

  void validate() const {
    for (int a = 0; a < kNumRoomCategories; ++a)
      for (int b = 0; b < kNumRoomCategories; ++b) {
        double ab = adjacency_propensity[static_cast<std::size_t>(a) * kNumRoomCategories + b];
        double ba = adjacency_propensity[static_cast<std::size_t>(b) * kNumRoomCategories + a];
        if (ab < 0.0) throw UsageError("negative adjacency propensity");
        if (ab != ba) throw UsageError("adjacency propensity matrix not symmetric");
      }
    for (int a = 0; a < kNumGeneratedTypes; ++a) {
      double row = 0.0;
      for (int b = 0; b < kNumGeneratedTypes; ++b)
        row += adjacency_propensity[static_cast<std::size_t>(a) * kNumRoomCategories + b];
      if (row > 0.0) return;  // at least one generatable row has mass
    }
    throw UsageError("adjacency propensity has no positive entry over generated types");
  }

  std::string serialize() const {
    std::ostringstream os;
    os << "prior v1\n";
    os << "room_count " << room_count_min << " " << room_count_max << "\n";
    os << "room_size " << room_size_min << " " << room_size_max << "\n";
    os << "type_size";
    for (int v : type_size) os << " " << v;
    os << "\npropensity\n";
    for (int a = 0; a < kNumRoomCategories; ++a) {
      for (int b = 0; b < kNumRoomCategories; ++b) {
        if (b) os << " ";
        os << fmt_double(adjacency_propensity[static_cast<std::size_t>(a) * kNumRoomCategories + b]);
      }
      os << "\n";
    }
    os << "door_probability\n";
    for (int a = 0; a < kNumRoomCategories; ++a) {
      for (int b = 0; b < kNumRoomCategories; ++b) {
        if (b) os << " ";
        os << fmt_double(door_probability[static_cast<std::size_t>(a) * kNumRoomCategories + b]);
      }
      os << "\n";
    }
    return os.str();
  }

  std::string hash() const { return fingerprint_hex(serialize()); }

  // Household structure used by smoke/desk profiles: strong pair skews
  // (bathroom-bedroom, kitchen-dining, hallway as a hub) and type-dependent
  // sizes so that depth cues carry information about what lies behind a door.
  static LayoutPrior household() {
    using RT = RoomType;
    LayoutPrior p;
    for (int a = 0; a < kNumGeneratedTypes; ++a)
      for (int b = 0; b < kNumGeneratedTypes; ++b)
        p.adjacency_propensity[static_cast<std::size_t>(a) * kNumRoomCategories + b] = 0.25;
    p.set_propensity(RT::kBathroom, RT::kBedroom, 3.0);
    p.set_propensity(RT::kBedroom, RT::kCloset, 1.5);
    p.set_propensity(RT::kKitchen, RT::kDiningRoom, 3.0);
    p.set_propensity(RT::kKitchen, RT::kLaundry, 1.5);
    p.set_propensity(RT::kDiningRoom, RT::kLivingRoom, 2.0);
    p.set_propensity(RT::kLivingRoom, RT::kEntryway, 2.0);
    p.set_propensity(RT::kEntryway, RT::kGarage, 2.0);
    p.set_propensity(RT::kHallway, RT::kBedroom, 2.0);
    p.set_propensity(RT::kHallway, RT::kLivingRoom, 2.0);
    p.set_propensity(RT::kHallway, RT::kOffice, 1.5);
    p.set_propensity(RT::kHallway, RT::kStairs, 1.5);
    p.set_propensity(RT::kBathroom, RT::kBathroom, 0.0);
    p.set_propensity(RT::kKitchen, RT::kKitchen, 0.0);
    p.set_door_prob_all(0.6);
    p.type_size = {4, 6, 5, 6, 5, 4, 4, 5, 4, 6, 4, 4};
    return p;
  }
};

}  // namespace winnav
