#pragma once

#include <string>
#include <vector>

#include "winnav/worldgen/episode.hpp"
#include "winnav/worldgen/generator.hpp"
#include "winnav/worldgen/prior.hpp"

namespace winnav {

// House-level split fractions plus the val_seen episode fraction (extra
// episodes drawn from train houses with novel start/goal pairs).
struct SplitRatios {
  double train_houses = 0.8;
  double val_seen_episodes = 0.25;
  double unseen_houses = 0.2;
};

struct HouseSplit {
  std::vector<int> train_ids;
  std::vector<int> unseen_ids;
};

// Partitions house ids; train and unseen fractions must sum to 1.
HouseSplit split_dataset(int num_houses, const SplitRatios& ratios, std::uint64_t seed);

struct DatasetConfig {
  LayoutPrior prior;
  int num_houses = 40;
  SplitRatios ratios;
  int episodes_per_house = 4;
  int min_hops = 1;
  int max_hops = 3;
  std::uint64_t seed = 1;
};

struct Dataset {
  DatasetConfig config;
  std::vector<GeneratedHouse> houses;  // indexed by house id
  HouseSplit split;
  std::vector<Episode> train;
  std::vector<Episode> val_seen;   // train houses, start/goal pairs unseen in train
  std::vector<Episode> val_unseen; // houses disjoint from train

  const HouseLayout& house_of(const Episode& ep) const {
    return houses[static_cast<std::size_t>(ep.house_id)].house;
  }
  const NavGraph& graph_of(const Episode& ep) const {
    return houses[static_cast<std::size_t>(ep.house_id)].graph;
  }
};

// Generates houses and episode splits; pure function of the config.
Dataset build_dataset(const DatasetConfig& cfg);

// On-disk layout under `dir`: houses.txt, episodes_{train,val_seen,val_unseen}.txt,
// manifest.txt carrying content hashes of every file plus the config
// fingerprint. Loading verifies hashes and errors naming any stale file.
void save_dataset(const Dataset& ds, const std::string& dir, const std::string& config_fingerprint);
Dataset load_dataset(const std::string& dir);

// Content hash of the dataset manifest (identifies the dataset for
// downstream artifacts).
std::string dataset_manifest_hash(const std::string& dir);

}  // namespace winnav
