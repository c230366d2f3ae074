#include "sanne/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "sanne/evaluator.hpp"
#include "sanne/objective.hpp"
#include "sanne/rng.hpp"

namespace sanne {

std::string setting_name(Setting s) {
  return s == Setting::kTransductive ? "transductive" : "inductive";
}

Setting setting_from_name(const std::string& name) {
  if (name == "transductive") return Setting::kTransductive;
  if (name == "inductive") return Setting::kInductive;
  throw DataError("unknown setting '" + name + "' (expected transductive|inductive)");
}

// -------------------------------------------------------------------- Adam

AdamState make_adam_state(const ModelParams& params) {
  AdamState st;
  params.for_each([&st](const std::string&, const Tensor& t) {
    st.m.emplace_back(t.shape);
    st.v.emplace_back(t.shape);
  });
  return st;
}

void adam_step(ModelParams& params, const std::vector<const Tensor*>& grads, AdamState& state,
               double lr) {
  ++state.step;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  std::size_t idx = 0;
  params.for_each([&](const std::string& name, Tensor& t) {
    if (idx >= grads.size()) throw ShapeError("adam_step: missing gradient for " + name);
    const Tensor& g = *grads[idx];
    if (g.shape != t.shape) {
      throw ShapeError("adam_step: gradient shape " + shape_str(g.shape) + " != param shape " +
                       shape_str(t.shape) + " for " + name);
    }
    Tensor& m = state.m[idx];
    Tensor& v = state.v[idx];
    for (std::int64_t i = 0; i < t.numel(); ++i) {
      const double gi = g.data[i];
      if (!std::isfinite(gi)) {
        throw NumericError("adam_step: non-finite gradient in " + name + " at index " +
                           std::to_string(i));
      }
      const double mi = state.beta1 * m.data[i] + (1.0 - state.beta1) * gi;
      const double vi = state.beta2 * v.data[i] + (1.0 - state.beta2) * gi * gi;
      m.data[i] = static_cast<float>(mi);
      v.data[i] = static_cast<float>(vi);
      const double step = lr * (mi / bc1) / (std::sqrt(vi / bc2) + state.eps);
      t.data[i] = static_cast<float>(t.data[i] - step);
    }
    ++idx;
  });
  if (idx != grads.size()) throw ShapeError("adam_step: gradient count mismatch");
}

// -------------------------------------------------------------- checkpoint

namespace {

constexpr char kMagic[8] = {'S', 'A', 'N', 'N', 'E', 'v', '1', '\0'};

template <typename T>
void write_le(std::ostream& out, T v) {
  unsigned char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    buf[i] = static_cast<unsigned char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff);
  }
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
  unsigned char buf[sizeof(T)];
  in.read(reinterpret_cast<char*>(buf), sizeof(T));
  if (!in) throw DataError("checkpoint: truncated file");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  }
  return static_cast<T>(v);
}

std::string config_block(const Checkpoint& ckpt) {
  const TrainConfig& c = ckpt.config;
  std::ostringstream os;
  os.precision(17);
  os << "version=" << ckpt.format_version << "\n";
  os << "num_nodes=" << ckpt.params.num_nodes() << "\n";
  os << "d=" << c.hyper.dim << "\n";
  os << "layers=" << c.hyper.layers << "\n";
  os << "heads=" << c.hyper.heads << "\n";
  os << "ff_hidden=" << c.hyper.ff_hidden << "\n";
  os << "walk_len=" << c.hyper.walk_len << "\n";
  os << "use_positional=" << (c.hyper.use_positional ? 1 : 0) << "\n";
  os << "use_ff=" << (c.hyper.use_ff ? 1 : 0) << "\n";
  os << "use_att=" << (c.hyper.use_att ? 1 : 0) << "\n";
  os << "attn_scale=" << c.hyper.attn_scale << "\n";
  os << "ln_eps=" << c.hyper.ln_eps << "\n";
  os << "neighbors=" << c.neighbors << "\n";
  os << "candidates=" << c.candidates << "\n";
  os << "batch_size=" << c.batch_size << "\n";
  os << "walks_per_node=" << c.walks_per_node << "\n";
  os << "max_epochs=" << c.max_epochs << "\n";
  os << "learning_rate=" << c.learning_rate << "\n";
  os << "seed=" << c.seed << "\n";
  os << "setting=" << setting_name(c.setting) << "\n";
  os << "monitor_logreg_epochs=" << c.monitor_logreg_epochs << "\n";
  os << "monitor_logreg_lr=" << c.monitor_logreg_lr << "\n";
  os << "idmap=" << ckpt.idmap_ref << "\n";
  os << "graph_fingerprint=" << ckpt.graph_fingerprint << "\n";
  return os.str();
}

std::map<std::string, std::string> parse_kv(const std::string& block) {
  std::map<std::string, std::string> kv;
  std::istringstream is(block);
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

std::string kv_get(const std::map<std::string, std::string>& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw DataError("checkpoint: missing config key '" + key + "'");
  return it->second;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out.write(kMagic, sizeof(kMagic));
  const std::string cfg = config_block(ckpt);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.size()));
  out.write(cfg.data(), static_cast<std::streamsize>(cfg.size()));

  struct Entry {
    std::string name;
    const Tensor* tensor;
  };
  std::vector<Entry> entries;
  ckpt.params.for_each(
      [&entries](const std::string& name, const Tensor& t) { entries.push_back({name, &t}); });

  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(entries.size()));
  std::uint64_t offset = 0;
  for (const Entry& e : entries) {
    write_le<std::uint16_t>(out, static_cast<std::uint16_t>(e.name.size()));
    out.write(e.name.data(), static_cast<std::streamsize>(e.name.size()));
    write_le<std::uint8_t>(out, 0);  // dtype f32
    write_le<std::uint8_t>(out, static_cast<std::uint8_t>(e.tensor->rank()));
    for (int d : e.tensor->shape) write_le<std::uint32_t>(out, static_cast<std::uint32_t>(d));
    write_le<std::uint64_t>(out, offset);
    offset += static_cast<std::uint64_t>(e.tensor->numel()) * sizeof(float);
  }
  for (const Entry& e : entries) {
    for (float v : e.tensor->data) {
      std::uint32_t bits;
      std::memcpy(&bits, &v, sizeof(bits));
      write_le<std::uint32_t>(out, bits);
    }
  }
  if (!out) throw DataError("checkpoint: write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw DataError(path + ": bad magic, not a SANNEv1 checkpoint");
  }
  const auto cfg_len = read_le<std::uint32_t>(in);
  std::string cfg(cfg_len, '\0');
  in.read(cfg.data(), cfg_len);
  if (!in) throw DataError("checkpoint: truncated config block");
  const auto kv = parse_kv(cfg);

  Checkpoint ckpt;
  ckpt.format_version = std::stoi(kv_get(kv, "version"));
  if (ckpt.format_version != 1) {
    throw DataError("checkpoint: unsupported format version " +
                    std::to_string(ckpt.format_version));
  }
  TrainConfig& c = ckpt.config;
  c.hyper.dim = std::stoi(kv_get(kv, "d"));
  c.hyper.layers = std::stoi(kv_get(kv, "layers"));
  c.hyper.heads = std::stoi(kv_get(kv, "heads"));
  c.hyper.ff_hidden = std::stoi(kv_get(kv, "ff_hidden"));
  c.hyper.walk_len = std::stoi(kv_get(kv, "walk_len"));
  c.hyper.use_positional = kv_get(kv, "use_positional") == "1";
  c.hyper.use_ff = kv_get(kv, "use_ff") == "1";
  c.hyper.use_att = kv_get(kv, "use_att") == "1";
  c.hyper.attn_scale = std::stod(kv_get(kv, "attn_scale"));
  c.hyper.ln_eps = std::stod(kv_get(kv, "ln_eps"));
  c.neighbors = std::stoi(kv_get(kv, "neighbors"));
  c.candidates = std::stoi(kv_get(kv, "candidates"));
  c.batch_size = std::stoi(kv_get(kv, "batch_size"));
  c.walks_per_node = std::stoi(kv_get(kv, "walks_per_node"));
  c.max_epochs = std::stoi(kv_get(kv, "max_epochs"));
  c.learning_rate = std::stod(kv_get(kv, "learning_rate"));
  c.seed = std::stoull(kv_get(kv, "seed"));
  c.setting = setting_from_name(kv_get(kv, "setting"));
  c.monitor_logreg_epochs = std::stoi(kv_get(kv, "monitor_logreg_epochs"));
  c.monitor_logreg_lr = std::stod(kv_get(kv, "monitor_logreg_lr"));
  ckpt.idmap_ref = kv.count("idmap") ? kv.at("idmap") : "";
  ckpt.graph_fingerprint = std::stoull(kv_get(kv, "graph_fingerprint"));
  const int num_nodes = std::stoi(kv_get(kv, "num_nodes"));

  struct Entry {
    std::string name;
    std::vector<int> shape;
    std::uint64_t offset;
  };
  const auto count = read_le<std::uint32_t>(in);
  std::vector<Entry> entries(count);
  for (auto& e : entries) {
    const auto name_len = read_le<std::uint16_t>(in);
    e.name.resize(name_len);
    in.read(e.name.data(), name_len);
    const auto dtype = read_le<std::uint8_t>(in);
    if (dtype != 0) throw DataError("checkpoint: unsupported dtype " + std::to_string(dtype));
    const auto rank = read_le<std::uint8_t>(in);
    for (int r = 0; r < rank; ++r) {
      e.shape.push_back(static_cast<int>(read_le<std::uint32_t>(in)));
    }
    e.offset = read_le<std::uint64_t>(in);
  }

  ckpt.params = init_params<float>(c.hyper, num_nodes, c.seed);
  std::size_t idx = 0;
  std::uint64_t expect_offset = 0;
  ckpt.params.for_each([&](const std::string& name, Tensor& t) {
    if (idx >= entries.size()) throw DataError("checkpoint: missing tensor " + name);
    const Entry& e = entries[idx];
    if (e.name != name || e.shape != t.shape || e.offset != expect_offset) {
      throw DataError("checkpoint: tensor table mismatch at '" + name + "'");
    }
    for (auto& v : t.data) {
      const auto bits = read_le<std::uint32_t>(in);
      float f;
      std::memcpy(&f, &bits, sizeof(f));
      v = f;
    }
    expect_offset += static_cast<std::uint64_t>(t.numel()) * sizeof(float);
    ++idx;
  });
  if (idx != entries.size()) throw DataError("checkpoint: extra tensors in table");
  return ckpt;
}

// -------------------------------------------------------------------- train

TrainResult train(const TrainConfig& cfg, const Graph& graph, const FeatureMatrix& features,
                  const LabelMap& labels, const Split& split) {
  if (graph.present_ids().empty()) throw DataError("train: graph has no present nodes");
  if (features.rank() != 2 || features.shape[0] != graph.num_nodes() ||
      features.shape[1] != cfg.hyper.dim) {
    throw ShapeError("train: features must be [" + std::to_string(graph.num_nodes()) + "," +
                     std::to_string(cfg.hyper.dim) + "], got " + shape_str(features.shape));
  }
  cfg.hyper.head_dim();  // validates H | d
  if (cfg.setting == Setting::kInductive) {
    for (int v : split.test) {
      if (graph.present(v)) {
        throw DataError("train: inductive setting requires test nodes removed from the graph "
                        "(node " + std::to_string(v) + " still present)");
      }
    }
  }

  TrainResult result;
  ModelParams params = init_params<float>(cfg.hyper, graph.num_nodes(), cfg.seed);
  AdamState adam = make_adam_state(params);
  const std::vector<int>& present = graph.present_ids();
  const int cand_size = std::min<int>(cfg.candidates, static_cast<int>(present.size()));
  LogregOptions monitor;
  monitor.epochs = cfg.monitor_logreg_epochs;
  monitor.lr = cfg.monitor_logreg_lr;

  ModelParams best = params;
  int best_epoch = -1;
  double best_acc = -1.0;

  std::vector<Walk> batch_walks;
  std::vector<NeighborSet> neighbor_sets;
  std::vector<int> targets;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const std::uint64_t epoch_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(epoch));
    const WalkSet ws = sample_walks(graph, cfg.walks_per_node, cfg.hyper.walk_len, epoch_seed);

    std::vector<std::int64_t> order(ws.walks.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<std::int64_t>(i);
    SplitMix64 shuffle_rng(derive_seed(cfg.seed, seed_domain::kShuffle,
                                       static_cast<std::uint64_t>(epoch)));
    shuffle(order, shuffle_rng);

    double loss_sum = 0.0;
    int batches = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      batch_walks.clear();
      for (std::size_t i = start; i < end; ++i) batch_walks.push_back(ws.walks[order[i]]);

      neighbor_sets.clear();
      targets.clear();
      SplitMix64 nbr_rng(derive_seed(cfg.seed, seed_domain::kNeighbors,
                                     static_cast<std::uint64_t>(epoch),
                                     static_cast<std::uint64_t>(batches)));
      for (const Walk& w : batch_walks) {
        for (int node : w.nodes) {
          neighbor_sets.push_back(sample_neighbors(graph, node, cfg.neighbors, nbr_rng));
          for (int t : neighbor_sets.back().members) targets.push_back(t);
        }
      }
      SplitMix64 cand_rng(derive_seed(cfg.seed, seed_domain::kCandidates,
                                      static_cast<std::uint64_t>(epoch),
                                      static_cast<std::uint64_t>(batches)));
      const CandidateSet cands = sample_candidates(present, cand_size, targets, cand_rng);

      Tape tape;
      const auto leaves = put_params_on_tape(tape, params);
      const auto encoded = encode_walks_on_tape<float>(tape, leaves, cfg.hyper, features,
                                                       {batch_walks.data(), batch_walks.size()});
      const auto loss = sampled_softmax_loss_on_tape<float>(tape, encoded, neighbor_sets,
                                                            leaves.out_embed, cands,
                                                            static_cast<int>(batch_walks.size()));
      tape.backward(loss.loss);

      std::vector<const Tensor*> grads;
      grads.reserve(leaves.flat.size());
      for (auto id : leaves.flat) grads.push_back(&tape.grad(id));
      adam_step(params, grads, adam, cfg.learning_rate);

      loss_sum += tape.val(loss.loss).data[0];
      ++batches;
    }

    EpochStats stats;
    stats.mean_loss = batches > 0 ? loss_sum / batches : 0.0;
    stats.val_accuracy = validation_accuracy(params.out_embed, labels, split.train,
                                             split.validation, monitor);
    result.history.push_back(stats);
    if (stats.val_accuracy > best_acc) {
      best_acc = stats.val_accuracy;
      best = params;
      best_epoch = epoch;
    }
  }

  result.best_epoch = best_epoch;
  result.best_val_accuracy = best_acc < 0 ? 0.0 : best_acc;
  result.checkpoint.format_version = 1;
  result.checkpoint.config = cfg;
  result.checkpoint.params = best_epoch >= 0 ? std::move(best) : std::move(params);
  result.checkpoint.graph_fingerprint = graph.fingerprint();
  return result;
}

}  // namespace sanne
