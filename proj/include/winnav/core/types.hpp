#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "winnav/util/error.hpp"

namespace winnav {

// Room categories. The 12 generated types come first; the two sentinels
// (unknown, outside) complete the category axis used by all maps.
enum class RoomType : std::int8_t {
  kBathroom = 0,
  kBedroom = 1,
  kKitchen = 2,
  kLivingRoom = 3,
  kDiningRoom = 4,
  kHallway = 5,
  kCloset = 6,
  kOffice = 7,
  kLaundry = 8,
  kGarage = 9,
  kEntryway = 10,
  kStairs = 11,
  kUnknown = 12,
  kOutside = 13,
};

inline constexpr int kNumRoomCategories = 14;   // C
inline constexpr int kNumGeneratedTypes = 12;   // types a generator may assign
inline constexpr int kNumHeadings = 8;          // 45 degree sectors
inline constexpr double kDefaultCellSize = 0.5; // world units per cell

inline const char* room_type_name(RoomType t) {
  static constexpr std::array<const char*, kNumRoomCategories> names = {
      "bathroom", "bedroom",  "kitchen", "living_room", "dining_room",
      "hallway",  "closet",   "office",  "laundry",     "garage",
      "entryway", "stairs",   "unknown", "outside"};
  return names[static_cast<int>(t)];
}

inline RoomType room_type_from_name(const std::string& name) {
  for (int i = 0; i < kNumRoomCategories; ++i) {
    if (name == room_type_name(static_cast<RoomType>(i))) return static_cast<RoomType>(i);
  }
  throw DataError("unknown room type: " + name);
}

// Integer cell coordinates: x grows east (columns), y grows north (rows).
struct Cell {
  int x = 0;
  int y = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
  double norm() const { return std::sqrt(x * x + y * y); }
};

// Agent pose: continuous position plus one of 8 discrete heading sectors.
// Heading k points at angle k*45deg clockwise from north (+y), so
// k=0 north, k=2 east, k=4 south, k=6 west.
struct Pose {
  Vec2 position;
  int heading = 0;
};

// Unit direction of a heading sector.
inline Vec2 heading_dir(int k) {
  static const double kSin[8] = {0.0, 0.7071067811865476, 1.0, 0.7071067811865476,
                                 0.0, -0.7071067811865476, -1.0, -0.7071067811865476};
  static const double kCos[8] = {1.0, 0.7071067811865476, 0.0, -0.7071067811865476,
                                 -1.0, -0.7071067811865476, 0.0, 0.7071067811865476};
  return {kSin[k & 7], kCos[k & 7]};
}

// Sector whose center direction is closest to (dx, dy); ties toward lower index.
inline int direction_to_sector(double dx, double dy) {
  double ang = std::atan2(dx, dy);  // clockwise-from-north convention
  if (ang < 0) ang += 6.283185307179586476925286766559;
  int k = static_cast<int>(std::floor(ang / 0.7853981633974483 + 0.5));
  return k & 7;
}

struct Room {
  RoomType type = RoomType::kUnknown;
  Cell lo;  // inclusive
  Cell hi;  // inclusive
  Vec2 centroid;
  int width() const { return hi.x - lo.x + 1; }
  int height() const { return hi.y - lo.y + 1; }
};

// A doorway between two 4-adjacent cells belonging to different rooms.
// Walls between rooms have zero thickness (cell boundaries); a door marks
// one boundary segment as passable. Stored with a < b (lexicographic).
struct Door {
  Cell a;
  Cell b;
};

// Procedurally generated floor plan on a cell grid.
// cells[y * width + x] holds a room id, kWallCell, or kOutsideCell.
class HouseLayout {
 public:
  static constexpr std::int16_t kWallCell = -1;
  static constexpr std::int16_t kOutsideCell = -2;

  int width = 0;
  int height = 0;
  double cell_size = kDefaultCellSize;
  std::vector<std::int16_t> cells;
  std::vector<Room> rooms;
  std::vector<Door> doors;

  bool in_bounds(Cell c) const {
    return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height;
  }
  std::int16_t at(Cell c) const {
    return in_bounds(c) ? cells[static_cast<std::size_t>(c.y) * width + c.x] : kOutsideCell;
  }
  std::int16_t& at_mut(Cell c) { return cells[static_cast<std::size_t>(c.y) * width + c.x]; }

  bool is_room_cell(Cell c) const { return at(c) >= 0; }

  Vec2 cell_center(Cell c) const {
    return {(c.x + 0.5) * cell_size, (c.y + 0.5) * cell_size};
  }
  // Cell containing a world point (half-open cell extents).
  Cell cell_of(Vec2 p) const {
    return {static_cast<int>(std::floor(p.x / cell_size)),
            static_cast<int>(std::floor(p.y / cell_size))};
  }

  RoomType type_of_room(int room_id) const { return rooms[static_cast<std::size_t>(room_id)].type; }

  // True if a ray or agent may cross the shared boundary of 4-adjacent
  // cells a -> b: same room, or a doorway between the two cells.
  bool boundary_passable(Cell a, Cell b) const {
    std::int16_t ra = at(a), rb = at(b);
    if (ra < 0 || rb < 0) return false;
    if (ra == rb) return true;
    return has_door(a, b);
  }

  bool has_door(Cell a, Cell b) const {
    if (b < a) std::swap(a, b);
    for (const Door& d : doors) {
      if (d.a == a && d.b == b) return true;
    }
    return false;
  }
};

// Viewpoint connectivity graph: one node per room at the room centroid.
struct NavGraph {
  struct Node {
    int room_id = 0;
    Vec2 position;
  };
  struct Edge {
    int a = 0;
    int b = 0;
    double length = 0.0;
  };

  std::vector<Node> nodes;
  std::vector<Edge> edges;

  std::size_t num_nodes() const { return nodes.size(); }

  std::vector<int> neighbors(int node) const {
    std::vector<int> out;
    for (const Edge& e : edges) {
      if (e.a == node) out.push_back(e.b);
      if (e.b == node) out.push_back(e.a);
    }
    return out;
  }

  double edge_length(int a, int b) const {
    for (const Edge& e : edges) {
      if ((e.a == a && e.b == b) || (e.a == b && e.b == a)) return e.length;
    }
    throw DataError("no such edge");
  }
};

}  // namespace winnav
