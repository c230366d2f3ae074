#include "sanne/infer.hpp"

#include <fstream>

#include "sanne/rng.hpp"
#include "sanne/walks.hpp"

namespace sanne {

std::vector<float> infer_embedding(const Checkpoint& ckpt, const Graph& full_graph,
                                   const FeatureMatrix& features, int v, const InferConfig& cfg) {
  const Hyper& h = ckpt.config.hyper;
  if (cfg.walk_len != h.walk_len) {
    throw DataError("infer_embedding: walk length " + std::to_string(cfg.walk_len) +
                    " does not match checkpoint walk length " + std::to_string(h.walk_len));
  }
  if (cfg.walks_per_node < 1) throw DataError("infer_embedding: Z must be >= 1");
  if (v < 0 || v >= full_graph.num_nodes() || !full_graph.present(v)) {
    throw DataError("infer_embedding: node " + std::to_string(v) + " not present in graph");
  }
  if (v >= features.shape[0]) {
    throw DataError("infer_embedding: node " + std::to_string(v) + " has no feature row");
  }

  std::vector<Walk> walks;
  walks.reserve(cfg.walks_per_node);
  for (int z = 0; z < cfg.walks_per_node; ++z) {
    SplitMix64 rng(derive_seed(cfg.seed, seed_domain::kInfer, static_cast<std::uint64_t>(v),
                               static_cast<std::uint64_t>(z)));
    walks.push_back(sample_walk(full_graph, v, cfg.walk_len, rng));
  }

  Tape tape;
  const auto leaves = put_params_on_tape(tape, ckpt.params);
  const auto out = encode_walks_on_tape<float>(tape, leaves, h, features,
                                               {walks.data(), walks.size()});
  const Tensor& u = tape.val(out);

  const int d = h.dim;
  std::vector<double> acc(d, 0.0);
  for (int z = 0; z < cfg.walks_per_node; ++z) {
    const float* row = u.row(static_cast<std::int64_t>(z) * h.walk_len);  // position 0
    for (int j = 0; j < d; ++j) acc[j] += row[j];
  }
  std::vector<float> result(d);
  for (int j = 0; j < d; ++j) result[j] = static_cast<float>(acc[j] / cfg.walks_per_node);
  return result;
}

EmbeddingTable infer_all(const Checkpoint& ckpt, const Graph& full_graph,
                         const FeatureMatrix& features, const std::vector<int>& nodes,
                         const InferConfig& cfg) {
  EmbeddingTable table;
  table.dim = ckpt.config.hyper.dim;
  table.ids = nodes;
  table.rows = Tensor({static_cast<int>(nodes.size()), table.dim});
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto emb = infer_embedding(ckpt, full_graph, features, nodes[i], cfg);
    std::copy(emb.begin(), emb.end(), table.rows.row(static_cast<std::int64_t>(i)));
  }
  return table;
}

void save_embedding_table(const EmbeddingTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out.precision(9);
  for (std::size_t i = 0; i < table.ids.size(); ++i) {
    out << table.ids[i];
    const float* row = table.rows.row(static_cast<std::int64_t>(i));
    for (int j = 0; j < table.dim; ++j) out << "\t" << row[j];
    out << "\n";
  }
}

void save_embeddings_dense(const Tensor& embeddings, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out.precision(9);
  for (std::int64_t v = 0; v < embeddings.shape[0]; ++v) {
    out << v;
    const float* row = embeddings.row(v);
    for (int j = 0; j < embeddings.shape[1]; ++j) out << "\t" << row[j];
    out << "\n";
  }
}

}  // namespace sanne
