#pragma once

#include <sstream>
#include <string>

#include "winnav/core/types.hpp"
#include "winnav/util/text_io.hpp"

namespace winnav {

// Line-oriented text format for a house and its nav graph. The format is
// bit-exact: serialize(parse(s)) == s for well-formed input produced here.
//
//   house v1
//   dims <width> <height> <cell_size>
//   cells
//   <height rows of width signed integers, row y = 0 first>
//   rooms <n>
//   <id> <type> <lo.x> <lo.y> <hi.x> <hi.y> <centroid.x> <centroid.y>
//   doors <n>
//   <a.x> <a.y> <b.x> <b.y>
//   nodes <n>
//   <id> <room_id> <pos.x> <pos.y>
//   edges <n>
//   <a> <b> <length>
//   end
inline std::string serialize_house(const HouseLayout& house, const NavGraph& graph) {
  std::ostringstream os;
  os << "house v1\n";
  os << "dims " << house.width << " " << house.height << " " << fmt_double(house.cell_size)
     << "\n";
  os << "cells\n";
  for (int y = 0; y < house.height; ++y) {
    for (int x = 0; x < house.width; ++x) {
      if (x) os << " ";
      os << house.cells[static_cast<std::size_t>(y) * house.width + x];
    }
    os << "\n";
  }
  os << "rooms " << house.rooms.size() << "\n";
  for (std::size_t i = 0; i < house.rooms.size(); ++i) {
    const Room& r = house.rooms[i];
    os << i << " " << room_type_name(r.type) << " " << r.lo.x << " " << r.lo.y << " " << r.hi.x
       << " " << r.hi.y << " " << fmt_double(r.centroid.x) << " " << fmt_double(r.centroid.y)
       << "\n";
  }
  os << "doors " << house.doors.size() << "\n";
  for (const Door& d : house.doors) {
    os << d.a.x << " " << d.a.y << " " << d.b.x << " " << d.b.y << "\n";
  }
  os << "nodes " << graph.nodes.size() << "\n";
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    const NavGraph::Node& n = graph.nodes[i];
    os << i << " " << n.room_id << " " << fmt_double(n.position.x) << " "
       << fmt_double(n.position.y) << "\n";
  }
  os << "edges " << graph.edges.size() << "\n";
  for (const NavGraph::Edge& e : graph.edges) {
    os << e.a << " " << e.b << " " << fmt_double(e.length) << "\n";
  }
  os << "end\n";
  return os.str();
}

class LineReader {
 public:
  explicit LineReader(const std::string& text) : is_(text) {}

  bool next(std::string& line) {
    while (std::getline(is_, line)) {
      if (!line.empty()) return true;
    }
    return false;
  }

  std::string expect_line() {
    std::string line;
    if (!next(line)) throw DataError("unexpected end of file");
    return line;
  }

  std::vector<std::string> expect_fields(const std::string& head, std::size_t count) {
    std::vector<std::string> f = split_ws(expect_line());
    if (f.empty() || f[0] != head || f.size() != count + 1)
      throw DataError("malformed '" + head + "' line");
    f.erase(f.begin());
    return f;
  }

 private:
  std::istringstream is_;
};

inline void parse_house(LineReader& in, HouseLayout& house, NavGraph& graph) {
  if (in.expect_line() != "house v1") throw DataError("bad house header (expected 'house v1')");
  auto dims = in.expect_fields("dims", 3);
  house.width = static_cast<int>(parse_int(dims[0]));
  house.height = static_cast<int>(parse_int(dims[1]));
  house.cell_size = parse_double(dims[2]);
  if (house.width <= 0 || house.height <= 0) throw DataError("bad house dims");
  if (in.expect_line() != "cells") throw DataError("expected 'cells'");
  house.cells.assign(static_cast<std::size_t>(house.width) * house.height, HouseLayout::kOutsideCell);
  for (int y = 0; y < house.height; ++y) {
    auto row = split_ws(in.expect_line());
    if (row.size() != static_cast<std::size_t>(house.width)) throw DataError("bad cell row width");
    for (int x = 0; x < house.width; ++x)
      house.cells[static_cast<std::size_t>(y) * house.width + x] =
          static_cast<std::int16_t>(parse_int(row[static_cast<std::size_t>(x)]));
  }
  auto nrooms = parse_int(in.expect_fields("rooms", 1)[0]);
  house.rooms.clear();
  for (std::int64_t i = 0; i < nrooms; ++i) {
    auto f = split_ws(in.expect_line());
    if (f.size() != 8 || parse_int(f[0]) != i) throw DataError("bad room line");
    Room r;
    r.type = room_type_from_name(f[1]);
    r.lo = {static_cast<int>(parse_int(f[2])), static_cast<int>(parse_int(f[3]))};
    r.hi = {static_cast<int>(parse_int(f[4])), static_cast<int>(parse_int(f[5]))};
    r.centroid = {parse_double(f[6]), parse_double(f[7])};
    house.rooms.push_back(r);
  }
  auto ndoors = parse_int(in.expect_fields("doors", 1)[0]);
  house.doors.clear();
  for (std::int64_t i = 0; i < ndoors; ++i) {
    auto f = split_ws(in.expect_line());
    if (f.size() != 4) throw DataError("bad door line");
    house.doors.push_back({{static_cast<int>(parse_int(f[0])), static_cast<int>(parse_int(f[1]))},
                           {static_cast<int>(parse_int(f[2])), static_cast<int>(parse_int(f[3]))}});
  }
  auto nnodes = parse_int(in.expect_fields("nodes", 1)[0]);
  graph.nodes.clear();
  for (std::int64_t i = 0; i < nnodes; ++i) {
    auto f = split_ws(in.expect_line());
    if (f.size() != 4 || parse_int(f[0]) != i) throw DataError("bad node line");
    graph.nodes.push_back({static_cast<int>(parse_int(f[1])), {parse_double(f[2]), parse_double(f[3])}});
  }
  auto nedges = parse_int(in.expect_fields("edges", 1)[0]);
  graph.edges.clear();
  for (std::int64_t i = 0; i < nedges; ++i) {
    auto f = split_ws(in.expect_line());
    if (f.size() != 3) throw DataError("bad edge line");
    graph.edges.push_back({static_cast<int>(parse_int(f[0])), static_cast<int>(parse_int(f[1])),
                           parse_double(f[2])});
  }
  if (in.expect_line() != "end") throw DataError("expected 'end'");
}

}  // namespace winnav
