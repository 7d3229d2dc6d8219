#pragma once

#include <cmath>
#include <vector>

#include "winnav/core/types.hpp"

namespace winnav {

// Agent-centric g x g grid of per-cell distributions over the C room
// categories. Row 0 is ahead of the agent, columns grow to the agent's
// right; the agent sits in the center cell.
class LocalityMap {
 public:
  LocalityMap() = default;
  LocalityMap(int g, double s) : g_(g), s_(s), probs_(static_cast<std::size_t>(g) * g * kNumRoomCategories, 0.0) {
    if (g < 1 || g % 2 == 0) throw UsageError("locality map size must be odd and positive");
  }

  static LocalityMap uniform_unknown(int g, double s) {
    LocalityMap m(g, s);
    for (int r = 0; r < g; ++r)
      for (int c = 0; c < g; ++c) m.set_one_hot(r, c, RoomType::kUnknown);
    return m;
  }

  int g() const { return g_; }
  double cell_size() const { return s_; }
  int center() const { return (g_ - 1) / 2; }

  const double* cell(int r, int c) const {
    return probs_.data() + (static_cast<std::size_t>(r) * g_ + c) * kNumRoomCategories;
  }
  double* cell_mut(int r, int c) {
    return probs_.data() + (static_cast<std::size_t>(r) * g_ + c) * kNumRoomCategories;
  }

  void set_one_hot(int r, int c, RoomType t) {
    double* p = cell_mut(r, c);
    for (int i = 0; i < kNumRoomCategories; ++i) p[i] = 0.0;
    p[static_cast<int>(t)] = 1.0;
  }

  void set_distribution(int r, int c, const double* dist) {
    double* p = cell_mut(r, c);
    for (int i = 0; i < kNumRoomCategories; ++i) p[i] = dist[i];
  }

  RoomType argmax(int r, int c) const {
    const double* p = cell(r, c);
    int best = 0;
    for (int i = 1; i < kNumRoomCategories; ++i)
      if (p[i] > p[best]) best = i;
    return static_cast<RoomType>(best);
  }

  const std::vector<double>& flat() const { return probs_; }
  std::vector<double>& flat_mut() { return probs_; }

 private:
  int g_ = 0;
  double s_ = kDefaultCellSize;
  std::vector<double> probs_;
};

// World-frame probabilistic semantic grid covering the house bounding box.
// Cells accumulate weighted observations; confidence is 0 exactly for cells
// never observed and approaches 1 with accumulated weight.
class GlobalGrid {
 public:
  GlobalGrid() = default;
  GlobalGrid(int size, double s, Vec2 origin)
      : size_(size), s_(s), origin_(origin),
        weight_(static_cast<std::size_t>(size) * size, 0.0),
        sums_(static_cast<std::size_t>(size) * size * kNumRoomCategories, 0.0) {}

  // Square grid covering the whole house footprint.
  static GlobalGrid covering(const HouseLayout& house) {
    int size = house.width > house.height ? house.width : house.height;
    return GlobalGrid(size, house.cell_size, Vec2{0.0, 0.0});
  }

  int size() const { return size_; }
  double cell_size() const { return s_; }
  Vec2 origin() const { return origin_; }

  bool in_bounds(int ix, int iy) const {
    return ix >= 0 && iy >= 0 && ix < size_ && iy < size_;
  }

  // Grid index of the cell containing world point p.
  Cell index_of(Vec2 p) const {
    return {static_cast<int>(std::floor((p.x - origin_.x) / s_)),
            static_cast<int>(std::floor((p.y - origin_.y) / s_))};
  }

  Vec2 cell_center(int ix, int iy) const {
    return {origin_.x + (ix + 0.5) * s_, origin_.y + (iy + 0.5) * s_};
  }

  double confidence(int ix, int iy) const {
    double w = weight_[idx(ix, iy)];
    return w / (w + 1.0);
  }

  // Normalized category distribution of a cell; uniform when unobserved.
  void distribution(int ix, int iy, double* out) const {
    double w = weight_[idx(ix, iy)];
    const double* s = sums_.data() + idx(ix, iy) * kNumRoomCategories;
    if (w <= 0.0) {
      for (int i = 0; i < kNumRoomCategories; ++i) out[i] = 1.0 / kNumRoomCategories;
    } else {
      for (int i = 0; i < kNumRoomCategories; ++i) out[i] = s[i] / w;
    }
  }

  void accumulate(int ix, int iy, const double* dist, double w) {
    if (w <= 0.0) return;
    weight_[idx(ix, iy)] += w;
    double* s = sums_.data() + idx(ix, iy) * kNumRoomCategories;
    for (int i = 0; i < kNumRoomCategories; ++i) s[i] += w * dist[i];
  }

 private:
  std::size_t idx(int ix, int iy) const { return static_cast<std::size_t>(iy) * size_ + ix; }

  int size_ = 0;
  double s_ = kDefaultCellSize;
  Vec2 origin_;
  std::vector<double> weight_;
  std::vector<double> sums_;
};

}  // namespace winnav
