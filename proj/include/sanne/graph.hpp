#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sanne/tensor.hpp"

namespace sanne {

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Undirected graph over dense node ids [0, num_nodes). Adjacency lists are
// sorted and duplicate-free with every edge stored in both directions.
// Nodes can be flagged absent (inductive setting); adjacency never stores
// self-loops — isolated nodes get an implicit one at sampling time via
// step_targets().
class Graph {
 public:
  Graph() = default;
  static Graph from_edges(int num_nodes, const std::vector<std::pair<int, int>>& edges);

  int num_nodes() const { return num_nodes_; }
  std::int64_t num_edges() const { return num_edges_; }

  std::span<const int> neighbors(int v) const {
    return {adj_[v].data(), adj_[v].size()};
  }

  // Targets a walk may step to from v: its neighbors, or v itself when v is
  // isolated (implicit self-loop rule).
  std::span<const int> step_targets(int v) const {
    if (!adj_[v].empty()) return neighbors(v);
    return {&identity_[v], 1};
  }

  bool present(int v) const { return present_[v] != 0; }
  const std::vector<int>& present_ids() const { return present_ids_; }

  // Same id space; removed nodes flagged absent, incident edges dropped.
  Graph remove_nodes(const std::vector<int>& removed) const;

  std::uint64_t fingerprint() const;

 private:
  void rebuild_cached();

  int num_nodes_ = 0;
  std::int64_t num_edges_ = 0;
  std::vector<std::vector<int>> adj_;
  std::vector<char> present_;
  std::vector<int> present_ids_;
  std::vector<int> identity_;
};

// d-dimensional real features per node, dense in node-id order.
using FeatureMatrix = Tensor;  // shape [num_nodes, d]

struct LabelMap {
  std::map<int, int> label_of;           // node id -> class index
  std::vector<std::string> class_names;  // class index -> first-seen name

  int num_classes() const { return static_cast<int>(class_names.size()); }
  std::vector<int> labeled_ids() const;
};

struct Split {
  std::vector<int> train;
  std::vector<int> validation;
  std::vector<int> test;
  std::uint64_t seed = 0;
};

// Sparse bag-of-words rows (converter output, random-projection input).
struct BowMatrix {
  int vocab = 0;
  std::vector<std::vector<std::pair<int, float>>> rows;  // (word index, count)

  int num_nodes() const { return static_cast<int>(rows.size()); }
};

// ---- loaders / writers (formats in the repo README) ----
Graph load_edge_list(const std::string& path);
void save_edge_list(const Graph& g, const std::string& path);

FeatureMatrix load_features(const std::string& path, int expected_dim);
void save_features(const FeatureMatrix& m, const std::string& path);

LabelMap load_labels(const std::string& path);
void save_class_map(const LabelMap& labels, const std::string& path);

BowMatrix load_bow(const std::string& path);
void save_bow(const BowMatrix& bow, const std::string& path);

std::vector<Split> load_splits(const std::vector<std::string>& paths);
Split load_split(const std::string& path);
void save_split(const Split& s, const std::string& path);

// ---- transforms ----

// Projects each bag-of-words row through a seeded Gaussian matrix
// (vocab x d) and L2-normalizes it; all-zero rows stay zero.
FeatureMatrix project_features(const BowMatrix& bow, int d, std::uint64_t seed);

// Per repeat: 20 train nodes per class, then 1000 validation and 1000 test
// nodes, all disjoint, drawn uniformly from the labeled nodes.
std::vector<Split> make_splits(const Graph& g, const LabelMap& labels, int repeats,
                               std::uint64_t seed);

}  // namespace sanne
