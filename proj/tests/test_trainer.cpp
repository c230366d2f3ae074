#include <doctest.h>

#include <cmath>

#include "sanne/trainer.hpp"
#include "test_helpers.hpp"

using namespace sanne;
namespace tst = sanne::testing;

namespace {

// Smallest legal model: every tensor is a handful of scalars.
ModelParams unit_params() {
  Hyper h;
  h.dim = 1;
  h.layers = 1;
  h.heads = 1;
  h.ff_hidden = 1;
  h.walk_len = 1;
  return init_params<float>(h, 1, 3);
}

std::vector<Tensor> zero_grads_like(const ModelParams& p) {
  std::vector<Tensor> grads;
  p.for_each([&grads](const std::string&, const Tensor& t) { grads.emplace_back(t.shape); });
  return grads;
}

std::vector<const Tensor*> ptrs(const std::vector<Tensor>& grads) {
  std::vector<const Tensor*> out;
  for (const auto& g : grads) out.push_back(&g);
  return out;
}

TrainConfig toy_train_config() {
  TrainConfig cfg;
  cfg.hyper.dim = 8;
  cfg.hyper.layers = 2;
  cfg.hyper.heads = 2;
  cfg.hyper.ff_hidden = 16;
  cfg.hyper.walk_len = 4;
  cfg.hyper.use_positional = true;
  cfg.neighbors = 2;
  cfg.candidates = 6;
  cfg.batch_size = 4;
  cfg.walks_per_node = 2;
  cfg.max_epochs = 3;
  cfg.learning_rate = 1e-3;
  cfg.seed = 7;
  cfg.monitor_logreg_epochs = 30;
  return cfg;
}

struct ToyData {
  Graph graph = tst::toy_graph6();
  Tensor features = tst::random_features(6, 8, 5);
  LabelMap labels = tst::labels_from_vector({0, 0, 0, 1, 1, 1}, {"a", "b"});
  Split split;
  ToyData() {
    split.train = {0, 3};
    split.validation = {1, 4};
    split.test = {2, 5};
  }
};

}  // namespace

TEST_CASE("adam first step matches the hand-computed update") {
  ModelParams p = unit_params();
  AdamState st = make_adam_state(p);
  auto grads = zero_grads_like(p);
  // out_embed is the last tensor in for_each order; give it gradient 1.
  grads.back().data[0] = 1.0f;
  const float before = p.out_embed.data[0];
  adam_step(p, ptrs(grads), st, 1e-4);

  CHECK(st.step == 1);
  CHECK(st.m.back().data[0] == doctest::Approx(0.1).epsilon(1e-6));
  CHECK(st.v.back().data[0] == doctest::Approx(0.001).epsilon(1e-6));
  const double expected_step = 1e-4 * 1.0 / (1.0 + 1e-8);
  CHECK(before - p.out_embed.data[0] == doctest::Approx(expected_step).epsilon(1e-4));
}

TEST_CASE("adam with zero gradients leaves parameters alone but advances") {
  ModelParams p = unit_params();
  const ModelParams before = p;
  AdamState st = make_adam_state(p);
  const auto grads = zero_grads_like(p);
  adam_step(p, ptrs(grads), st, 1e-2);
  adam_step(p, ptrs(grads), st, 1e-2);
  CHECK(st.step == 2);
  CHECK(p.out_embed.data == before.out_embed.data);
  CHECK(p.layers[0].w1.data == before.layers[0].w1.data);
}

TEST_CASE("adam rejects non-finite gradients and shape mismatches") {
  ModelParams p = unit_params();
  AdamState st = make_adam_state(p);
  auto grads = zero_grads_like(p);
  grads[0].data[0] = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS(adam_step(p, ptrs(grads), st, 1e-3), NumericError);

  auto bad = zero_grads_like(p);
  bad[0] = Tensor({2, 2});
  AdamState st2 = make_adam_state(p);
  CHECK_THROWS_AS(adam_step(p, ptrs(bad), st2, 1e-3), ShapeError);
}

TEST_CASE("training on the toy graph decreases the loss") {
  const ToyData data;
  TrainConfig cfg = toy_train_config();
  cfg.max_epochs = 12;
  const TrainResult result = train(cfg, data.graph, data.features, data.labels, data.split);
  REQUIRE(result.history.size() == 12u);
  CHECK(result.history.back().mean_loss < result.history.front().mean_loss);
  CHECK(result.best_epoch >= 0);
  double best = -1;
  for (const auto& e : result.history) best = std::max(best, e.val_accuracy);
  CHECK(result.best_val_accuracy == doctest::Approx(best));
}

TEST_CASE("max_epochs = 0 returns the initialized parameters") {
  const ToyData data;
  TrainConfig cfg = toy_train_config();
  cfg.max_epochs = 0;
  const TrainResult result = train(cfg, data.graph, data.features, data.labels, data.split);
  CHECK(result.history.empty());
  CHECK(result.best_epoch == -1);
  const ModelParams init = init_params<float>(cfg.hyper, 6, cfg.seed);
  CHECK(result.checkpoint.params.out_embed.data == init.out_embed.data);
}

TEST_CASE("training is deterministic: identical history and checkpoint bytes") {
  const ToyData data;
  const TrainConfig cfg = toy_train_config();
  const TrainResult a = train(cfg, data.graph, data.features, data.labels, data.split);
  const TrainResult b = train(cfg, data.graph, data.features, data.labels, data.split);
  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].mean_loss == b.history[i].mean_loss);
    CHECK(a.history[i].val_accuracy == b.history[i].val_accuracy);
  }
  CHECK(a.best_epoch == b.best_epoch);

  const auto dir = tst::temp_dir("ckpt_det");
  save_checkpoint(a.checkpoint, (dir / "a.bin").string());
  save_checkpoint(b.checkpoint, (dir / "b.bin").string());
  CHECK(tst::read_file(dir / "a.bin") == tst::read_file(dir / "b.bin"));
}

TEST_CASE("checkpoint round-trip is bit-exact and validates its header") {
  const ToyData data;
  TrainConfig cfg = toy_train_config();
  cfg.max_epochs = 2;
  const TrainResult result = train(cfg, data.graph, data.features, data.labels, data.split);
  const auto dir = tst::temp_dir("ckpt_rt");
  const std::string path = (dir / "model.bin").string();
  save_checkpoint(result.checkpoint, path);
  const Checkpoint back = load_checkpoint(path);

  bool equal = true;
  result.checkpoint.params.for_each([&](const std::string& name, const Tensor& t) {
    back.params.for_each([&](const std::string& n2, const Tensor& t2) {
      if (n2 == name && t.data != t2.data) equal = false;
    });
  });
  CHECK(equal);
  CHECK(back.graph_fingerprint == data.graph.fingerprint());
  CHECK(back.config.seed == cfg.seed);

  // encode_walk outputs identical before/after the round trip
  Walk w;
  w.nodes = {0, 1, 2, 3};
  const Tensor pre = encode_walk(result.checkpoint.params, w, data.features);
  const Tensor post = encode_walk(back.params, w, data.features);
  CHECK(pre.data == post.data);

  SUBCASE("wrong magic is rejected") {
    tst::write_file(dir / "junk.bin", "NOTSANNE-------");
    CHECK_THROWS_WITH_AS(load_checkpoint((dir / "junk.bin").string()),
                         doctest::Contains("bad magic"), DataError);
  }
  SUBCASE("truncation is detected") {
    const std::string full = tst::read_file(dir / "model.bin");
    tst::write_file(dir / "short.bin", full.substr(0, full.size() / 2));
    CHECK_THROWS_AS(load_checkpoint((dir / "short.bin").string()), DataError);
  }
}

TEST_CASE("inductive training never touches output rows of removed nodes") {
  const ToyData data;
  TrainConfig cfg = toy_train_config();
  cfg.setting = Setting::kInductive;
  cfg.max_epochs = 4;
  const Graph reduced = data.graph.remove_nodes(data.split.test);
  const TrainResult result = train(cfg, reduced, data.features, data.labels, data.split);

  const ModelParams init = init_params<float>(cfg.hyper, 6, cfg.seed);
  for (int v : data.split.test) {
    for (int j = 0; j < cfg.hyper.dim; ++j) {
      CHECK(result.checkpoint.params.out_embed.row(v)[j] == init.out_embed.row(v)[j]);
    }
  }
  // present rows did move
  bool moved = false;
  for (int v : reduced.present_ids()) {
    for (int j = 0; j < cfg.hyper.dim; ++j) {
      if (result.checkpoint.params.out_embed.row(v)[j] != init.out_embed.row(v)[j]) moved = true;
    }
  }
  CHECK(moved);
}

TEST_CASE("inductive training demands the test nodes be removed up front") {
  const ToyData data;
  TrainConfig cfg = toy_train_config();
  cfg.setting = Setting::kInductive;
  CHECK_THROWS_WITH_AS(train(cfg, data.graph, data.features, data.labels, data.split),
                       doctest::Contains("test nodes removed"), DataError);
}
