#include "winnav/worldgen/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "winnav/core/graph_ops.hpp"
#include "winnav/core/serialize.hpp"
#include "winnav/util/fingerprint.hpp"
#include "winnav/util/rng.hpp"

namespace winnav {

HouseSplit split_dataset(int num_houses, const SplitRatios& ratios, std::uint64_t seed) {
  if (std::fabs(ratios.train_houses + ratios.unseen_houses - 1.0) > 1e-9)
    throw UsageError("house split ratios must sum to 1");
  if (ratios.val_seen_episodes < 0.0 || ratios.val_seen_episodes > 1.0)
    throw UsageError("val_seen episode fraction must lie in [0, 1]");
  int n_unseen = static_cast<int>(std::lround(ratios.unseen_houses * num_houses));
  int n_train = num_houses - n_unseen;
  if (n_train < 1 || n_unseen < 1)
    throw DataError("too few houses for requested split (" + std::to_string(num_houses) + ")");

  std::vector<int> ids(static_cast<std::size_t>(num_houses));
  for (int i = 0; i < num_houses; ++i) ids[static_cast<std::size_t>(i)] = i;
  Rng rng = Rng::stream(seed, 0x73706c6974ull /* "split" */);
  for (int i = num_houses - 1; i > 0; --i)
    std::swap(ids[static_cast<std::size_t>(i)],
              ids[rng.uniform_int(static_cast<std::uint64_t>(i) + 1)]);

  HouseSplit split;
  split.train_ids.assign(ids.begin(), ids.begin() + n_train);
  split.unseen_ids.assign(ids.begin() + n_train, ids.end());
  std::sort(split.train_ids.begin(), split.train_ids.end());
  std::sort(split.unseen_ids.begin(), split.unseen_ids.end());
  return split;
}

namespace {

// All ordered (start, goal) pairs whose shortest path has hops in range,
// shuffled deterministically, with the path for each pair.
struct PairPool {
  std::vector<Episode> episodes;  // without tokens yet
};

PairPool qualifying_pairs(const GeneratedHouse& gh, int house_id, int min_hops, int max_hops,
                          std::uint64_t seed) {
  PairPool pool;
  int n = static_cast<int>(gh.graph.num_nodes());
  for (int a = 0; a < n; ++a) {
    ShortestPaths sp = shortest_paths_from(gh.graph, a);
    for (int b = 0; b < n; ++b) {
      if (a == b || sp.dist[static_cast<std::size_t>(b)] == kInf) continue;
      std::vector<int> path;
      for (int v = b; v != -1; v = sp.prev[static_cast<std::size_t>(v)]) path.push_back(v);
      std::reverse(path.begin(), path.end());
      int hops = static_cast<int>(path.size()) - 1;
      if (hops < min_hops || hops > max_hops) continue;
      Episode ep;
      ep.house_id = house_id;
      ep.start = a;
      ep.goal = b;
      ep.path = std::move(path);
      pool.episodes.push_back(std::move(ep));
    }
  }
  Rng rng = Rng::stream(seed, 0x7061697273ull /* "pairs" */, static_cast<std::uint64_t>(house_id));
  for (int i = static_cast<int>(pool.episodes.size()) - 1; i > 0; --i)
    std::swap(pool.episodes[static_cast<std::size_t>(i)],
              pool.episodes[rng.uniform_int(static_cast<std::uint64_t>(i) + 1)]);
  return pool;
}

}  // namespace

Dataset build_dataset(const DatasetConfig& cfg) {
  Dataset ds;
  ds.config = cfg;
  ds.houses.reserve(static_cast<std::size_t>(cfg.num_houses));
  for (int i = 0; i < cfg.num_houses; ++i)
    ds.houses.push_back(generate_house(cfg.prior, Rng::mix(cfg.seed) + static_cast<std::uint64_t>(i)));
  ds.split = split_dataset(cfg.num_houses, cfg.ratios, cfg.seed);

  auto render = [&](Episode& ep) {
    const GeneratedHouse& gh = ds.houses[static_cast<std::size_t>(ep.house_id)];
    ep.tokens = render_instruction(ep.path, gh.house, gh.graph, cfg.seed);
  };

  // Train episodes plus leftovers for val_seen (novel start/goal pairs).
  std::vector<std::vector<Episode>> leftovers;
  for (int id : ds.split.train_ids) {
    PairPool pool = qualifying_pairs(ds.houses[static_cast<std::size_t>(id)], id, cfg.min_hops,
                                     cfg.max_hops, cfg.seed);
    std::size_t n_train = std::min<std::size_t>(static_cast<std::size_t>(cfg.episodes_per_house),
                                                pool.episodes.size());
    for (std::size_t i = 0; i < n_train; ++i) {
      render(pool.episodes[i]);
      ds.train.push_back(pool.episodes[i]);
    }
    leftovers.push_back({pool.episodes.begin() + static_cast<std::ptrdiff_t>(n_train), pool.episodes.end()});
  }
  std::size_t val_target = static_cast<std::size_t>(
      std::llround(std::ceil(cfg.ratios.val_seen_episodes * static_cast<double>(ds.train.size()))));
  for (std::size_t round = 0; ds.val_seen.size() < val_target; ++round) {
    bool any = false;
    for (auto& rest : leftovers) {
      if (round < rest.size() && ds.val_seen.size() < val_target) {
        render(rest[round]);
        ds.val_seen.push_back(rest[round]);
        any = true;
      }
    }
    if (!any) break;  // pools exhausted
  }

  for (int id : ds.split.unseen_ids) {
    PairPool pool = qualifying_pairs(ds.houses[static_cast<std::size_t>(id)], id, cfg.min_hops,
                                     cfg.max_hops, cfg.seed);
    std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(cfg.episodes_per_house),
                                          pool.episodes.size());
    for (std::size_t i = 0; i < n; ++i) {
      render(pool.episodes[i]);
      ds.val_unseen.push_back(pool.episodes[i]);
    }
  }
  return ds;
}

namespace {

std::string serialize_episodes(const std::string& split_name, const std::vector<Episode>& eps) {
  std::ostringstream os;
  os << "episodes v1\n";
  os << "split " << split_name << "\n";
  os << "count " << eps.size() << "\n";
  for (const Episode& ep : eps) {
    os << "ep " << ep.house_id << " " << ep.start << " " << ep.goal << " :";
    for (int v : ep.path) os << " " << v;
    os << " :";
    for (int t : ep.tokens) os << " " << token_name(t);
    os << "\n";
  }
  return os.str();
}

std::vector<Episode> parse_episodes(const std::string& text, const std::string& want_split) {
  LineReader in(text);
  if (in.expect_line() != "episodes v1") throw DataError("bad episodes header");
  auto split = in.expect_fields("split", 1);
  if (split[0] != want_split) throw DataError("episodes split mismatch: " + split[0]);
  auto count = parse_int(in.expect_fields("count", 1)[0]);
  std::vector<Episode> out;
  for (std::int64_t i = 0; i < count; ++i) {
    auto f = split_ws(in.expect_line());
    if (f.size() < 7 || f[0] != "ep") throw DataError("bad episode line");
    Episode ep;
    ep.house_id = static_cast<int>(parse_int(f[1]));
    ep.start = static_cast<int>(parse_int(f[2]));
    ep.goal = static_cast<int>(parse_int(f[3]));
    std::size_t at = 4;
    if (f[at] != ":") throw DataError("bad episode line (path separator)");
    ++at;
    while (at < f.size() && f[at] != ":") ep.path.push_back(static_cast<int>(parse_int(f[at++])));
    if (at >= f.size()) throw DataError("bad episode line (token separator)");
    ++at;
    while (at < f.size()) ep.tokens.push_back(token_from_name(f[at++]));
    out.push_back(std::move(ep));
  }
  return out;
}

std::string houses_path(const std::string& dir) { return dir + "/houses.txt"; }
std::string episodes_path(const std::string& dir, const std::string& split) {
  return dir + "/episodes_" + split + ".txt";
}
std::string manifest_path(const std::string& dir) { return dir + "/manifest.txt"; }

}  // namespace

void save_dataset(const Dataset& ds, const std::string& dir, const std::string& config_fingerprint) {
  std::ostringstream hs;
  hs << "houses v1\n";
  hs << "count " << ds.houses.size() << "\n";
  for (std::size_t i = 0; i < ds.houses.size(); ++i) {
    hs << "id " << i << "\n";
    hs << serialize_house(ds.houses[i].house, ds.houses[i].graph);
  }
  std::string houses_text = hs.str();
  std::string train_text = serialize_episodes("train", ds.train);
  std::string seen_text = serialize_episodes("val_seen", ds.val_seen);
  std::string unseen_text = serialize_episodes("val_unseen", ds.val_unseen);

  write_file(houses_path(dir), houses_text);
  write_file(episodes_path(dir, "train"), train_text);
  write_file(episodes_path(dir, "val_seen"), seen_text);
  write_file(episodes_path(dir, "val_unseen"), unseen_text);

  std::ostringstream ms;
  ms << "manifest v1\n";
  ms << "tool " << kToolVersion << "\n";
  ms << "fingerprint " << config_fingerprint << "\n";
  ms << "seed " << ds.config.seed << "\n";
  ms << "prior_hash " << ds.config.prior.hash() << "\n";
  ms << "min_hops " << ds.config.min_hops << "\n";
  ms << "max_hops " << ds.config.max_hops << "\n";
  ms << "file houses.txt " << fingerprint_hex(houses_text) << "\n";
  ms << "file episodes_train.txt " << fingerprint_hex(train_text) << "\n";
  ms << "file episodes_val_seen.txt " << fingerprint_hex(seen_text) << "\n";
  ms << "file episodes_val_unseen.txt " << fingerprint_hex(unseen_text) << "\n";
  ms << "split_train";
  for (int id : ds.split.train_ids) ms << " " << id;
  ms << "\nsplit_unseen";
  for (int id : ds.split.unseen_ids) ms << " " << id;
  ms << "\n";
  write_file(manifest_path(dir), ms.str());
}

Dataset load_dataset(const std::string& dir) {
  std::string manifest = read_file(manifest_path(dir));
  LineReader in(manifest);
  if (in.expect_line() != "manifest v1") throw DataError("bad manifest header");
  Dataset ds;
  std::string line;
  std::vector<std::pair<std::string, std::string>> files;
  while (in.next(line)) {
    auto f = split_ws(line);
    if (f[0] == "seed") ds.config.seed = static_cast<std::uint64_t>(parse_int(f[1]));
    else if (f[0] == "min_hops") ds.config.min_hops = static_cast<int>(parse_int(f[1]));
    else if (f[0] == "max_hops") ds.config.max_hops = static_cast<int>(parse_int(f[1]));
    else if (f[0] == "file") files.push_back({f[1], f[2]});
    else if (f[0] == "split_train")
      for (std::size_t i = 1; i < f.size(); ++i) ds.split.train_ids.push_back(static_cast<int>(parse_int(f[i])));
    else if (f[0] == "split_unseen")
      for (std::size_t i = 1; i < f.size(); ++i) ds.split.unseen_ids.push_back(static_cast<int>(parse_int(f[i])));
  }
  for (const auto& [name, hash] : files) {
    std::string text = read_file(dir + "/" + name);
    if (fingerprint_hex(text) != hash)
      throw DataError("stale artifact: " + name + " does not match the manifest hash");
  }

  std::string houses_text = read_file(houses_path(dir));
  LineReader hin(houses_text);
  if (hin.expect_line() != "houses v1") throw DataError("bad houses header");
  auto count = parse_int(hin.expect_fields("count", 1)[0]);
  for (std::int64_t i = 0; i < count; ++i) {
    auto idf = hin.expect_fields("id", 1);
    if (parse_int(idf[0]) != i) throw DataError("houses file ids out of order");
    GeneratedHouse gh;
    parse_house(hin, gh.house, gh.graph);
    ds.houses.push_back(std::move(gh));
  }
  ds.config.num_houses = static_cast<int>(ds.houses.size());
  ds.train = parse_episodes(read_file(episodes_path(dir, "train")), "train");
  ds.val_seen = parse_episodes(read_file(episodes_path(dir, "val_seen")), "val_seen");
  ds.val_unseen = parse_episodes(read_file(episodes_path(dir, "val_unseen")), "val_unseen");
  return ds;
}

std::string dataset_manifest_hash(const std::string& dir) {
  return fingerprint_hex(read_file(manifest_path(dir)));
}

}  // namespace winnav
