#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sanne/graph.hpp"
#include "sanne/trainer.hpp"

namespace sanne {

struct InferConfig {
  int walks_per_node = 8;  // Z
  int walk_len = 8;        // N; must equal the checkpoint's walk length
  std::uint64_t seed = 1;
};

// Embedding inference for a node unseen during training: Z walks rooted at v
// on the full graph, each encoded by the trained model; the position-0
// outputs are averaged into the final embedding.
std::vector<float> infer_embedding(const Checkpoint& ckpt, const Graph& full_graph,
                                   const FeatureMatrix& features, int v, const InferConfig& cfg);

struct EmbeddingTable {
  int dim = 0;
  std::vector<int> ids;
  Tensor rows;  // [ids.size(), dim], aligned with ids
};

EmbeddingTable infer_all(const Checkpoint& ckpt, const Graph& full_graph,
                         const FeatureMatrix& features, const std::vector<int>& nodes,
                         const InferConfig& cfg);

void save_embedding_table(const EmbeddingTable& table, const std::string& path);

// node_id<TAB>e_1...e_d rows for a dense [num_nodes, d] matrix.
void save_embeddings_dense(const Tensor& embeddings, const std::string& path);

}  // namespace sanne
