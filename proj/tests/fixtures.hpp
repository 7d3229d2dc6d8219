#pragma once

// Shared hand-built fixtures for unit and acceptance tests.

#include "winnav/core/types.hpp"
#include "winnav/worldgen/generator.hpp"

namespace winnav::fixtures {

// Two 4x4-cell rooms side by side (bedroom left, kitchen right) inside a
// wall ring; one door between cells (4,2) and (5,2) unless disabled.
inline GeneratedHouse two_rooms(bool with_door = true) {
  GeneratedHouse gh;
  HouseLayout& h = gh.house;
  h.width = 10;
  h.height = 6;
  h.cell_size = 0.5;
  h.cells.assign(static_cast<std::size_t>(h.width) * h.height, HouseLayout::kWallCell);
  for (int y = 1; y <= 4; ++y) {
    for (int x = 1; x <= 4; ++x) h.at_mut({x, y}) = 0;
    for (int x = 5; x <= 8; ++x) h.at_mut({x, y}) = 1;
  }
  Room bedroom;
  bedroom.type = RoomType::kBedroom;
  bedroom.lo = {1, 1};
  bedroom.hi = {4, 4};
  bedroom.centroid = h.cell_center({2, 2});
  Room kitchen;
  kitchen.type = RoomType::kKitchen;
  kitchen.lo = {5, 1};
  kitchen.hi = {8, 4};
  kitchen.centroid = h.cell_center({6, 2});
  h.rooms = {bedroom, kitchen};
  if (with_door) h.doors.push_back({{4, 2}, {5, 2}});
  gh.graph.nodes = {{0, bedroom.centroid}, {1, kitchen.centroid}};
  if (with_door) {
    Vec2 mid = 0.5 * (h.cell_center({4, 2}) + h.cell_center({5, 2}));
    double len = (bedroom.centroid - mid).norm() + (mid - kitchen.centroid).norm();
    gh.graph.edges = {{0, 1, len}};
  }
  return gh;
}

}  // namespace winnav::fixtures
