#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sanne/graph.hpp"
#include "sanne/rng.hpp"

namespace sanne {

// Fixed-length uniform random walk; nodes[0] is the root.
struct Walk {
  std::vector<int> nodes;
  int root() const { return nodes.front(); }
  int length() const { return static_cast<int>(nodes.size()); }
};

struct WalkSet {
  std::vector<Walk> walks;  // grouped by root in (node, walk-index) order
  int walks_per_node = 0;   // T
  int walk_len = 0;         // N
  std::uint64_t seed = 0;
};

struct NeighborSet {
  int center = -1;
  std::vector<int> members;  // M draws, with replacement
};

// One walk rooted at `root` from its own derived stream.
Walk sample_walk(const Graph& g, int root, int len, SplitMix64& rng);

// T walks per present node, each (node, index) pair on an independent
// sub-stream so generation order does not matter.
WalkSet sample_walks(const Graph& g, int walks_per_node, int walk_len, std::uint64_t seed);

// M uniform draws (with replacement) from adj(v); isolated nodes yield v
// itself via the implicit self-loop.
NeighborSet sample_neighbors(const Graph& g, int v, int m, SplitMix64& rng);

void save_walks(const WalkSet& ws, const std::string& path);

}  // namespace sanne
