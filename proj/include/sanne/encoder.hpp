#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sanne/rng.hpp"
#include "sanne/tape.hpp"
#include "sanne/tensor.hpp"
#include "sanne/walks.hpp"

namespace sanne {

// Architecture hyper-parameters shared by every precision instantiation.
struct Hyper {
  int dim = 128;      // d, feature/embedding width
  int layers = 2;     // K, stacked attention layers
  int heads = 8;      // H
  int ff_hidden = 1024;
  int walk_len = 8;   // N
  bool use_positional = true;
  bool use_ff = true;   // ablation: feed-forward sub-layer
  bool use_att = true;  // ablation: self-attention sub-layer
  double attn_scale = 0.0;  // dot-product divisor; 0 selects sqrt(head_dim)
  double ln_eps = 1e-5;

  int head_dim() const {
    if (heads < 1 || dim % heads != 0) {
      throw ShapeError("H must divide d (H=" + std::to_string(heads) +
                       ", d=" + std::to_string(dim) + ")");
    }
    return dim / heads;
  }
  double scale_divisor() const {
    return attn_scale > 0.0 ? attn_scale : std::sqrt(static_cast<double>(head_dim()));
  }
};

template <typename T>
struct LayerParamsT {
  std::vector<TensorT<T>> wq, wk, wv;  // per head, [head_dim, dim]
  TensorT<T> w_merge;                  // [dim, heads*head_dim]
  TensorT<T> w1, b1, w2, b2;           // [ff,dim],[ff],[dim,ff],[dim]
  TensorT<T> ln1_gamma, ln1_beta;      // attention sub-layer norm
  TensorT<T> ln2_gamma, ln2_beta;      // feed-forward sub-layer norm
};

template <typename T>
struct ModelParamsT {
  Hyper hyper;
  std::vector<LayerParamsT<T>> layers;
  TensorT<T> out_embed;  // O, [num_nodes, dim]

  int num_nodes() const { return out_embed.shape.empty() ? 0 : out_embed.shape[0]; }

  // Visits every trainable tensor in a fixed canonical order.
  template <typename F>
  void for_each(F&& f) {
    for (std::size_t k = 0; k < layers.size(); ++k) {
      auto& l = layers[k];
      const std::string p = "l" + std::to_string(k) + ".";
      for (std::size_t h = 0; h < l.wq.size(); ++h) f(p + "h" + std::to_string(h) + ".wq", l.wq[h]);
      for (std::size_t h = 0; h < l.wk.size(); ++h) f(p + "h" + std::to_string(h) + ".wk", l.wk[h]);
      for (std::size_t h = 0; h < l.wv.size(); ++h) f(p + "h" + std::to_string(h) + ".wv", l.wv[h]);
      f(p + "merge", l.w_merge);
      f(p + "ff.w1", l.w1);
      f(p + "ff.b1", l.b1);
      f(p + "ff.w2", l.w2);
      f(p + "ff.b2", l.b2);
      f(p + "ln1.gamma", l.ln1_gamma);
      f(p + "ln1.beta", l.ln1_beta);
      f(p + "ln2.gamma", l.ln2_gamma);
      f(p + "ln2.beta", l.ln2_beta);
    }
    f(std::string("out_embed"), out_embed);
  }
  template <typename F>
  void for_each(F&& f) const {
    const_cast<ModelParamsT*>(this)->for_each(
        [&f](const std::string& name, const TensorT<T>& t) { f(name, t); });
  }

  template <typename U>
  ModelParamsT<U> cast() const {
    ModelParamsT<U> out;
    out.hyper = hyper;
    out.layers.resize(layers.size());
    for (std::size_t k = 0; k < layers.size(); ++k) {
      const auto& src = layers[k];
      auto& dst = out.layers[k];
      for (const auto& t : src.wq) dst.wq.push_back(t.template cast<U>());
      for (const auto& t : src.wk) dst.wk.push_back(t.template cast<U>());
      for (const auto& t : src.wv) dst.wv.push_back(t.template cast<U>());
      dst.w_merge = src.w_merge.template cast<U>();
      dst.w1 = src.w1.template cast<U>();
      dst.b1 = src.b1.template cast<U>();
      dst.w2 = src.w2.template cast<U>();
      dst.b2 = src.b2.template cast<U>();
      dst.ln1_gamma = src.ln1_gamma.template cast<U>();
      dst.ln1_beta = src.ln1_beta.template cast<U>();
      dst.ln2_gamma = src.ln2_gamma.template cast<U>();
      dst.ln2_beta = src.ln2_beta.template cast<U>();
    }
    out.out_embed = out_embed.template cast<U>();
    return out;
  }
};

using ModelParams = ModelParamsT<float>;

// Sinusoidal table: row r holds position i = r+1 with
// t[i,2j] = sin(i / 10000^(2j/d)), t[i,2j+1] = cos(i / 10000^(2j/d)).
template <typename T>
TensorT<T> positional_encoding(int n, int dim) {
  if (dim % 2 != 0) throw ShapeError("positional_encoding: d must be even");
  TensorT<T> table({n, dim});
  for (int r = 0; r < n; ++r) {
    const double i = r + 1;
    T* row = table.row(r);
    for (int j = 0; 2 * j < dim; ++j) {
      const double angle = i / std::pow(10000.0, (2.0 * j) / dim);
      row[2 * j] = static_cast<T>(std::sin(angle));
      row[2 * j + 1] = static_cast<T>(std::cos(angle));
    }
  }
  return table;
}

// Glorot-uniform weights, zero biases, unit layer-norm gains; output
// embeddings uniform in +-0.5/d. One draw stream, fixed traversal order.
template <typename T>
ModelParamsT<T> init_params(const Hyper& hyper, int num_nodes, std::uint64_t seed) {
  const int s = hyper.head_dim();
  const int d = hyper.dim;
  const int ff = hyper.ff_hidden;
  if (hyper.layers < 1 || ff < 1 || num_nodes < 1) {
    throw ShapeError("init_params: all counts must be >= 1");
  }
  SplitMix64 rng(derive_seed(seed, seed_domain::kInit));
  auto glorot = [&rng](std::vector<int> shape, int fan_in, int fan_out) {
    TensorT<T> t(std::move(shape));
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (auto& v : t.data) v = static_cast<T>(rng.next_uniform(-limit, limit));
    return t;
  };
  ModelParamsT<T> p;
  p.hyper = hyper;
  p.layers.resize(hyper.layers);
  for (auto& l : p.layers) {
    for (int h = 0; h < hyper.heads; ++h) l.wq.push_back(glorot({s, d}, d, s));
    for (int h = 0; h < hyper.heads; ++h) l.wk.push_back(glorot({s, d}, d, s));
    for (int h = 0; h < hyper.heads; ++h) l.wv.push_back(glorot({s, d}, d, s));
    l.w_merge = glorot({d, hyper.heads * s}, hyper.heads * s, d);
    l.w1 = glorot({ff, d}, d, ff);
    l.b1 = TensorT<T>({ff});
    l.w2 = glorot({d, ff}, ff, d);
    l.b2 = TensorT<T>({d});
    l.ln1_gamma = TensorT<T>({d}, T(1));
    l.ln1_beta = TensorT<T>({d});
    l.ln2_gamma = TensorT<T>({d}, T(1));
    l.ln2_beta = TensorT<T>({d});
  }
  p.out_embed = TensorT<T>({num_nodes, d});
  const double lim = 0.5 / d;
  for (auto& v : p.out_embed.data) v = static_cast<T>(rng.next_uniform(-lim, lim));
  return p;
}

// Tape leaf ids mirroring ModelParamsT, in for_each order.
template <typename T>
struct ParamLeaves {
  using Id = typename TapeT<T>::Id;
  struct Layer {
    std::vector<Id> wq, wk, wv;
    Id merge, w1, b1, w2, b2;
    Id ln1_gamma, ln1_beta, ln2_gamma, ln2_beta;
  };
  std::vector<Layer> layers;
  Id out_embed = -1;
  std::vector<Id> flat;  // for_each order, aligned with parameter names
};

template <typename T>
ParamLeaves<T> put_params_on_tape(TapeT<T>& tape, const ModelParamsT<T>& p) {
  ParamLeaves<T> ids;
  ids.layers.resize(p.layers.size());
  for (std::size_t k = 0; k < p.layers.size(); ++k) {
    const auto& l = p.layers[k];
    auto& o = ids.layers[k];
    for (const auto& t : l.wq) o.wq.push_back(tape.leaf(t));
    for (const auto& t : l.wk) o.wk.push_back(tape.leaf(t));
    for (const auto& t : l.wv) o.wv.push_back(tape.leaf(t));
    o.merge = tape.leaf(l.w_merge);
    o.w1 = tape.leaf(l.w1);
    o.b1 = tape.leaf(l.b1);
    o.w2 = tape.leaf(l.w2);
    o.b2 = tape.leaf(l.b2);
    o.ln1_gamma = tape.leaf(l.ln1_gamma);
    o.ln1_beta = tape.leaf(l.ln1_beta);
    o.ln2_gamma = tape.leaf(l.ln2_gamma);
    o.ln2_beta = tape.leaf(l.ln2_beta);
    for (auto id : o.wq) ids.flat.push_back(id);
    for (auto id : o.wk) ids.flat.push_back(id);
    for (auto id : o.wv) ids.flat.push_back(id);
    ids.flat.insert(ids.flat.end(), {o.merge, o.w1, o.b1, o.w2, o.b2, o.ln1_gamma, o.ln1_beta,
                                     o.ln2_gamma, o.ln2_beta});
  }
  ids.out_embed = tape.leaf(p.out_embed);
  ids.flat.push_back(ids.out_embed);
  return ids;
}

// Gathers walk-node features (plus positional rows when enabled) into the
// [B*N, d] layer-0 input.
template <typename T>
TensorT<T> walk_inputs(const Hyper& h, const TensorT<T>& features, std::span<const Walk> walks) {
  const int n = h.walk_len;
  const int d = h.dim;
  if (features.rank() != 2 || features.shape[1] != d) {
    throw ShapeError("walk_inputs: features must be [num_nodes," + std::to_string(d) + "], got " +
                     shape_str(features.shape));
  }
  TensorT<T> pos;
  if (h.use_positional) pos = positional_encoding<T>(n, d);
  TensorT<T> u0({static_cast<int>(walks.size()) * n, d});
  std::int64_t r = 0;
  for (const Walk& w : walks) {
    if (w.length() != n) {
      throw ShapeError("walk_inputs: walk length " + std::to_string(w.length()) +
                       " != configured " + std::to_string(n));
    }
    for (int i = 0; i < n; ++i, ++r) {
      const int v = w.nodes[i];
      if (v < 0 || v >= features.shape[0]) {
        throw DataError("walk_inputs: node " + std::to_string(v) + " has no feature row");
      }
      const T* src = features.row(v);
      T* dst = u0.row(r);
      std::copy(src, src + d, dst);
      if (h.use_positional) {
        const T* ps = pos.row(i);
        for (int j = 0; j < d; ++j) dst[j] += ps[j];
      }
    }
  }
  return u0;
}

// Runs the full K-layer stack over a batch of walks. Returns the id of the
// [B*N, d] final representations. When `attention_ids` is given, it receives
// the softmax node id for every (layer, head); values are [B, N, N].
template <typename T>
typename TapeT<T>::Id encode_walks_on_tape(
    TapeT<T>& tape, const ParamLeaves<T>& leaves, const Hyper& h, const TensorT<T>& features,
    std::span<const Walk> walks,
    std::vector<std::vector<typename TapeT<T>::Id>>* attention_ids = nullptr) {
  using Id = typename TapeT<T>::Id;
  const int batch = static_cast<int>(walks.size());
  const int n = h.walk_len;
  const int d = h.dim;
  const int s = h.head_dim();
  const double inv_scale = 1.0 / h.scale_divisor();

  Id u = tape.leaf(walk_inputs(h, features, walks));
  if (attention_ids) attention_ids->assign(leaves.layers.size(), {});

  for (std::size_t k = 0; k < leaves.layers.size(); ++k) {
    const auto& l = leaves.layers[k];
    Id y = u;
    if (h.use_att) {
      std::vector<Id> head_outs;
      head_outs.reserve(h.heads);
      for (int hd = 0; hd < h.heads; ++hd) {
        const Id q = tape.reshape(tape.matmul(u, tape.transpose(l.wq[hd])), {batch, n, s});
        const Id kk = tape.reshape(tape.matmul(u, tape.transpose(l.wk[hd])), {batch, n, s});
        const Id v = tape.reshape(tape.matmul(u, tape.transpose(l.wv[hd])), {batch, n, s});
        const Id scores = tape.scale(tape.bmm(q, tape.transpose_last2(kk)), inv_scale);
        const Id alpha = tape.softmax_rows(scores);  // [B, N, N], bidirectional
        if (attention_ids) (*attention_ids)[k].push_back(alpha);
        head_outs.push_back(tape.reshape(tape.bmm(alpha, v), {batch * n, s}));
      }
      const Id merged = tape.matmul(tape.concat_last(head_outs), tape.transpose(l.merge));
      y = tape.layer_norm(tape.add(u, merged), l.ln1_gamma, l.ln1_beta, h.ln_eps);
    }
    if (h.use_ff) {
      const Id hidden = tape.relu(tape.bias_add(tape.matmul(y, tape.transpose(l.w1)), l.b1));
      const Id ff = tape.bias_add(tape.matmul(hidden, tape.transpose(l.w2)), l.b2);
      u = tape.layer_norm(tape.add(y, ff), l.ln2_gamma, l.ln2_beta, h.ln_eps);
    } else {
      u = y;
    }
  }
  return u;
}

// Single-walk forward pass without exposing the tape; [N, d] output.
template <typename T>
TensorT<T> encode_walk(const ModelParamsT<T>& params, const Walk& walk,
                       const TensorT<T>& features) {
  TapeT<T> tape;
  const auto leaves = put_params_on_tape(tape, params);
  const Walk* w = &walk;
  const auto out = encode_walks_on_tape<T>(tape, leaves, params.hyper, features, {w, 1});
  return tape.val(out);
}

}  // namespace sanne
