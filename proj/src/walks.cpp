#include "sanne/walks.hpp"

#include <fstream>
#include <stdexcept>

namespace sanne {

Walk sample_walk(const Graph& g, int root, int len, SplitMix64& rng) {
  Walk w;
  w.nodes.reserve(len);
  int cur = root;
  w.nodes.push_back(cur);
  for (int step = 1; step < len; ++step) {
    const auto targets = g.step_targets(cur);
    cur = targets[static_cast<std::size_t>(rng.next_below(targets.size()))];
    w.nodes.push_back(cur);
  }
  return w;
}

WalkSet sample_walks(const Graph& g, int walks_per_node, int walk_len, std::uint64_t seed) {
  if (walk_len < 1) throw std::invalid_argument("sample_walks: walk_len must be >= 1");
  if (walks_per_node < 1) throw std::invalid_argument("sample_walks: walks_per_node must be >= 1");
  if (g.present_ids().empty()) throw std::invalid_argument("sample_walks: graph has no present nodes");

  WalkSet ws;
  ws.walks_per_node = walks_per_node;
  ws.walk_len = walk_len;
  ws.seed = seed;
  ws.walks.reserve(static_cast<std::size_t>(g.present_ids().size()) * walks_per_node);
  for (int v : g.present_ids()) {
    for (int t = 0; t < walks_per_node; ++t) {
      SplitMix64 rng(derive_seed(seed, seed_domain::kWalks, static_cast<std::uint64_t>(v),
                                 static_cast<std::uint64_t>(t)));
      ws.walks.push_back(sample_walk(g, v, walk_len, rng));
    }
  }
  return ws;
}

NeighborSet sample_neighbors(const Graph& g, int v, int m, SplitMix64& rng) {
  if (!g.present(v)) throw std::invalid_argument("sample_neighbors: node absent from graph");
  NeighborSet ns;
  ns.center = v;
  ns.members.reserve(m);
  const auto targets = g.step_targets(v);
  for (int i = 0; i < m; ++i) {
    ns.members.push_back(targets[static_cast<std::size_t>(rng.next_below(targets.size()))]);
  }
  return ns;
}

void save_walks(const WalkSet& ws, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  for (const Walk& w : ws.walks) {
    for (std::size_t i = 0; i < w.nodes.size(); ++i) {
      if (i) out << ' ';
      out << w.nodes[i];
    }
    out << "\n";
  }
}

}  // namespace sanne
