#pragma once

#include <array>
#include <string>
#include <vector>

#include "winnav/core/locality_map.hpp"
#include "winnav/core/types.hpp"
#include "winnav/worldgen/generator.hpp"
#include "winnav/worldgen/observe.hpp"

namespace winnav {

// Locality knowledge: room-type pair counts over the training houses.
// connectivity = share a wall, navigability = direct access via a door,
// visibility = line of sight between summary viewpoints through openings.
struct AdjacencyMatrix {
  std::array<std::int64_t, kNumRoomCategories * kNumRoomCategories> connectivity{};
  std::array<std::int64_t, kNumRoomCategories * kNumRoomCategories> navigability{};
  std::array<std::int64_t, kNumRoomCategories * kNumRoomCategories> visibility{};
  std::array<double, kNumRoomCategories> mean_room_size{};  // units^2, per type
  std::array<std::int64_t, kNumRoomCategories> room_counts{};
  double mean_room_distance = 0.0;  // centroid distance of wall-sharing pairs
  std::int64_t houses_counted = 0;

  std::int64_t conn(RoomType a, RoomType b) const {
    return connectivity[static_cast<std::size_t>(a) * kNumRoomCategories + static_cast<std::size_t>(b)];
  }
  std::int64_t nav(RoomType a, RoomType b) const {
    return navigability[static_cast<std::size_t>(a) * kNumRoomCategories + static_cast<std::size_t>(b)];
  }
  std::int64_t vis(RoomType a, RoomType b) const {
    return visibility[static_cast<std::size_t>(a) * kNumRoomCategories + static_cast<std::size_t>(b)];
  }

  // Most frequent neighbor type by connectivity marginals (the
  // majority-class baseline for occluded-cell prediction).
  RoomType majority_neighbor_type() const;

  void merge(const AdjacencyMatrix& other);  // associative addition

  std::string serialize() const;
  static AdjacencyMatrix parse(const std::string& text);
  std::string heatmap_csv() const;
};

// Deterministic surrogate for panoramic feature matching: a per-sector
// histogram over (type, quantized depth). Equal observations give equal
// descriptors; histogram intersection scores similarity in [0, 1].
struct Descriptor {
  std::vector<double> bins;
  static Descriptor from_observation(const PanoramicObservation& obs);
};

double descriptor_match(const Descriptor& a, const Descriptor& b);

enum class PairRelation { kSameRoom, kNavigable, kNeighboringOccluded, kUnrelated };

inline const char* pair_relation_name(PairRelation r) {
  switch (r) {
    case PairRelation::kSameRoom: return "same_room";
    case PairRelation::kNavigable: return "navigable";
    case PairRelation::kNeighboringOccluded: return "neighboring_occluded";
    case PairRelation::kUnrelated: return "unrelated";
  }
  return "?";
}

struct KbParams {
  double min_separation = 2.0;    // units between summary viewpoints
  double match_threshold = 0.6;   // histogram intersection cut
  double locality_radius = 1.25;  // g*s/2 for the default 5x5 map
};

// Equidistant grid sampling over navigable cells, one pass per room so
// every room keeps a candidate, filtered to pairwise separation.
std::vector<Pose> sample_viewpoints(const HouseLayout& house, double min_separation = 2.0);

// Room-pair relation from descriptor matching and distance thresholds.
PairRelation classify_pair(const HouseLayout& house, const Pose& p1, const Pose& p2,
                           const KbParams& params = {});

// Accumulates adjacency counts over the given houses using ground-truth
// layout for connectivity/doors and ray casting for visibility.
AdjacencyMatrix build_adjacency(const std::vector<const GeneratedHouse*>& houses);

// Agent-centric ground-truth map: one-hot room type under each cell,
// outside-house cells marked outside, wall cells adopting the nearest
// room's type (ties toward the lower room id).
LocalityMap ground_truth_locality_map(const HouseLayout& house, const Pose& pose, int g, double s);

}  // namespace winnav
