#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sanne/encoder.hpp"
#include "sanne/graph.hpp"

namespace sanne {

enum class Setting { kTransductive, kInductive };

std::string setting_name(Setting s);
Setting setting_from_name(const std::string& name);

struct TrainConfig {
  Hyper hyper;              // d=128, K=2, H=8, ff=1024, N=8 by default
  int neighbors = 4;        // M
  int candidates = 512;     // |V'|; saturates to the present-node count
  int batch_size = 64;      // walks per batch
  int walks_per_node = 16;  // T
  int max_epochs = 50;
  double learning_rate = 1e-4;
  std::uint64_t seed = 1;
  Setting setting = Setting::kTransductive;
  // Validation monitoring: logistic-regression budget used after each epoch.
  int monitor_logreg_epochs = 200;
  double monitor_logreg_lr = 0.1;
};

struct AdamState {
  std::vector<Tensor> m, v;  // aligned with ModelParams::for_each order
  std::int64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

AdamState make_adam_state(const ModelParams& params);

// Standard Adam with bias correction. `grads` aligns with for_each order.
void adam_step(ModelParams& params, const std::vector<const Tensor*>& grads, AdamState& state,
               double lr);

struct Checkpoint {
  int format_version = 1;
  TrainConfig config;
  ModelParams params;
  std::string idmap_ref;
  std::uint64_t graph_fingerprint = 0;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

struct EpochStats {
  double mean_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainResult {
  Checkpoint checkpoint;  // parameters of the best validation epoch
  std::vector<EpochStats> history;
  int best_epoch = -1;
  double best_val_accuracy = 0.0;
};

// Algorithm-1 loop: per epoch, regenerate walks, shuffle into batches,
// encode + sampled-softmax loss + backprop + Adam, then score validation
// accuracy on the current output embeddings. In the inductive setting the
// graph must already have the split's test nodes removed.
TrainResult train(const TrainConfig& cfg, const Graph& graph, const FeatureMatrix& features,
                  const LabelMap& labels, const Split& split);

}  // namespace sanne
