// Command-line driver wiring the SANNE library into reproducible runs.
//
// Subcommands: split | walks | train | infer | eval | convert | verify.
// Every option can also come from a flat key=value file via --config;
// explicit flags override file values. The resolved configuration is echoed
// to <out>/resolved.cfg before any work starts.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "sanne/dataset_convert.hpp"
#include "sanne/graph.hpp"
#include "sanne/infer.hpp"
#include "sanne/protocol.hpp"
#include "sanne/threadpool.hpp"
#include "sanne/trainer.hpp"
#include "sanne/walks.hpp"

namespace fs = std::filesystem;
using namespace sanne;

namespace {

struct CommonOpts {
  std::string out;
  int threads = 0;  // 0 = hardware concurrency
};

void add_common(CLI::App* sub, CommonOpts& opts) {
  sub->add_option("--out", opts.out, "Output directory (default: $SANNE_OUT/<command>)");
  sub->add_option("--threads", opts.threads,
                  "Worker threads; 1 forces the single-threaded path (0 = all cores)");
  sub->set_config("--config", "", "Flat key=value config file; flags override file values");
  sub->allow_config_extras(false);
}

// Resolves the output directory, creates it, and echoes the fully resolved
// configuration (defaults filled in) before the command runs.
fs::path prepare_out(CLI::App* sub, CommonOpts& opts) {
  if (opts.out.empty()) {
    const char* root = std::getenv("SANNE_OUT");
    if (!root || !*root) {
      throw CLI::ValidationError("--out",
                                 "no --out given and SANNE_OUT environment variable not set");
    }
    opts.out = (fs::path(root) / sub->get_name()).string();
  }
  fs::create_directories(opts.out);
  std::ofstream cfg(fs::path(opts.out) / "resolved.cfg");
  cfg << sub->config_to_str(true, false);

  int threads = opts.threads;
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  ThreadPool::instance().configure(std::max(1, threads));
  return {opts.out};
}

struct FeatureOpts {
  std::string features_path;
  std::string bow_path;
  std::uint64_t proj_seed = 1;
};

void add_feature_opts(CLI::App* sub, FeatureOpts& opts) {
  auto* f = sub->add_option("--features", opts.features_path,
                            "Pretrained feature file (node_id<TAB>f_1..f_d)");
  auto* b = sub->add_option("--bow", opts.bow_path,
                            "Bag-of-words file; features derived by seeded random projection");
  sub->add_option("--proj-seed", opts.proj_seed, "Seed for the random projection");
  f->excludes(b);
  b->excludes(f);
}

FeatureMatrix resolve_features(const FeatureOpts& opts, int dim) {
  if (!opts.features_path.empty()) return load_features(opts.features_path, dim);
  if (!opts.bow_path.empty()) return project_features(load_bow(opts.bow_path), dim, opts.proj_seed);
  throw CLI::ValidationError("--features", "one of --features or --bow is required");
}

struct HyperOpts {
  TrainConfig cfg;
  std::string setting = "transductive";
};

void add_hyper_opts(CLI::App* sub, HyperOpts& h) {
  sub->add_option("--d,--dim", h.cfg.hyper.dim, "Feature/embedding dimension d");
  sub->add_option("--layers", h.cfg.hyper.layers, "Attention layers K");
  sub->add_option("--heads", h.cfg.hyper.heads, "Attention heads H (must divide d)");
  sub->add_option("--ff-hidden", h.cfg.hyper.ff_hidden, "Feed-forward hidden size");
  sub->add_option("--walk-len", h.cfg.hyper.walk_len, "Walk length N");
  sub->add_flag("--positional,!--no-positional", h.cfg.hyper.use_positional,
                "Add sinusoidal positional embeddings");
  sub->add_flag("--ff,!--no-ff", h.cfg.hyper.use_ff, "Use the feed-forward sub-layer");
  sub->add_flag("--att,!--no-att", h.cfg.hyper.use_att, "Use the self-attention sub-layer");
  sub->add_option("--attn-scale", h.cfg.hyper.attn_scale,
                  "Attention dot-product divisor override (0 = sqrt(head_dim))");
  sub->add_option("--neighbors", h.cfg.neighbors, "Sampled neighbors M per walk position");
  sub->add_option("--candidates", h.cfg.candidates, "Sampled-softmax candidate count");
  sub->add_option("--batch-size", h.cfg.batch_size, "Walks per training batch");
  sub->add_option("--walks-per-node", h.cfg.walks_per_node, "Walks T per node per epoch");
  sub->add_option("--epochs", h.cfg.max_epochs, "Training epochs");
  sub->add_option("--lr", h.cfg.learning_rate, "Adam learning rate");
  sub->add_option("--seed", h.cfg.seed, "Master seed");
  sub->add_option("--setting", h.setting, "transductive or inductive")
      ->check(CLI::IsMember({"transductive", "inductive"}));
  sub->add_option("--monitor-logreg-epochs", h.cfg.monitor_logreg_epochs,
                  "Logreg epochs for per-epoch validation monitoring");
}

void validate_hyper(HyperOpts& h) {
  h.cfg.setting = setting_from_name(h.setting);
  h.cfg.hyper.head_dim();  // throws "H must divide d" on violation
  if (!h.cfg.hyper.use_ff && !h.cfg.hyper.use_att) {
    throw CLI::ValidationError("--no-ff", "--no-ff and --no-att cannot both be set");
  }
}

int run(int argc, char** argv) {
  CLI::App app{"SANNE node embeddings: self-attention over random walks"};
  app.require_subcommand(1);

  // ------------------------------------------------------------------ split
  auto* split_cmd = app.add_subcommand("split", "Generate train/validation/test splits");
  struct {
    CommonOpts common;
    std::string edges, labels;
    int repeats = 10;
    std::uint64_t seed = 1;
  } sp;
  split_cmd->add_option("--edges", sp.edges, "Edge list file")->required();
  split_cmd->add_option("--labels", sp.labels, "Label file")->required();
  split_cmd->add_option("--repeats", sp.repeats, "Number of splits");
  split_cmd->add_option("--seed", sp.seed, "Master seed");
  add_common(split_cmd, sp.common);
  split_cmd->callback([&] {
    const fs::path out = prepare_out(split_cmd, sp.common);
    const Graph g = load_edge_list(sp.edges);
    const LabelMap labels = load_labels(sp.labels);
    const auto splits = make_splits(g, labels, sp.repeats, sp.seed);
    for (std::size_t r = 0; r < splits.size(); ++r) {
      save_split(splits[r], (out / ("split_" + std::to_string(r) + ".txt")).string());
    }
    save_class_map(labels, (out / "classmap.tsv").string());
    std::cout << "wrote " << splits.size() << " splits to " << out << "\n";
  });

  // ------------------------------------------------------------------ walks
  auto* walks_cmd = app.add_subcommand("walks", "Dump random walks for inspection");
  struct {
    CommonOpts common;
    std::string edges;
    int walks_per_node = 16, walk_len = 8;
    std::uint64_t seed = 1;
  } wk;
  walks_cmd->add_option("--edges", wk.edges, "Edge list file")->required();
  walks_cmd->add_option("--walks-per-node", wk.walks_per_node, "Walks T per node");
  walks_cmd->add_option("--walk-len", wk.walk_len, "Walk length N");
  walks_cmd->add_option("--seed", wk.seed, "Seed");
  add_common(walks_cmd, wk.common);
  walks_cmd->callback([&] {
    const fs::path out = prepare_out(walks_cmd, wk.common);
    const Graph g = load_edge_list(wk.edges);
    const WalkSet ws = sample_walks(g, wk.walks_per_node, wk.walk_len, wk.seed);
    save_walks(ws, (out / "walks.txt").string());
    std::cout << "wrote " << ws.walks.size() << " walks to " << out / "walks.txt" << "\n";
  });

  // ------------------------------------------------------------------ train
  auto* train_cmd = app.add_subcommand("train", "Train SANNE on one split");
  struct {
    CommonOpts common;
    FeatureOpts features;
    HyperOpts hyper;
    std::string edges, labels, split_path;
  } tr;
  train_cmd->add_option("--edges", tr.edges, "Edge list file")->required();
  train_cmd->add_option("--labels", tr.labels, "Label file")->required();
  train_cmd->add_option("--split", tr.split_path, "Split file")->required();
  add_feature_opts(train_cmd, tr.features);
  add_hyper_opts(train_cmd, tr.hyper);
  add_common(train_cmd, tr.common);
  train_cmd->callback([&] {
    validate_hyper(tr.hyper);
    const fs::path out = prepare_out(train_cmd, tr.common);
    Graph g = load_edge_list(tr.edges);
    const LabelMap labels = load_labels(tr.labels);
    const Split split = load_split(tr.split_path);
    const FeatureMatrix features = resolve_features(tr.features, tr.hyper.cfg.hyper.dim);
    if (tr.hyper.cfg.setting == Setting::kInductive) g = g.remove_nodes(split.test);

    const TrainResult result = train(tr.hyper.cfg, g, features, labels, split);
    save_checkpoint(result.checkpoint, (out / "checkpoint.bin").string());
    {
      std::ofstream hist(out / "history.tsv");
      hist << "epoch\tloss\tval_accuracy\n";
      hist.precision(9);
      for (std::size_t e = 0; e < result.history.size(); ++e) {
        hist << e << "\t" << result.history[e].mean_loss << "\t"
             << result.history[e].val_accuracy << "\n";
      }
    }
    save_embeddings_dense(result.checkpoint.params.out_embed, (out / "embeddings.tsv").string());
    save_class_map(labels, (out / "classmap.tsv").string());
    std::cout << "best epoch " << result.best_epoch << " val_accuracy "
              << result.best_val_accuracy << "; checkpoint at " << out / "checkpoint.bin"
              << "\n";
  });

  // ------------------------------------------------------------------ infer
  auto* infer_cmd = app.add_subcommand("infer", "Infer embeddings for unseen nodes");
  struct {
    CommonOpts common;
    FeatureOpts features;
    std::string ckpt, edges, nodes;
    int infer_walks = 8;
    std::uint64_t seed = 1;
  } in;
  infer_cmd->add_option("--ckpt", in.ckpt, "Trained checkpoint")->required();
  infer_cmd->add_option("--edges", in.edges, "Full-graph edge list (new nodes restored)")
      ->required();
  infer_cmd->add_option("--nodes", in.nodes, "File with one node id per line")->required();
  infer_cmd->add_option("--infer-walks", in.infer_walks, "Walks Z per node");
  infer_cmd->add_option("--seed", in.seed, "Seed");
  add_feature_opts(infer_cmd, in.features);
  add_common(infer_cmd, in.common);
  infer_cmd->callback([&] {
    const fs::path out = prepare_out(infer_cmd, in.common);
    const Checkpoint ckpt = load_checkpoint(in.ckpt);
    const Graph g = load_edge_list(in.edges);
    const FeatureMatrix features = resolve_features(in.features, ckpt.config.hyper.dim);
    std::vector<int> nodes;
    {
      std::ifstream nin(in.nodes);
      if (!nin) throw DataError("cannot open " + in.nodes);
      long long id;
      while (nin >> id) nodes.push_back(static_cast<int>(id));
    }
    InferConfig icfg;
    icfg.walks_per_node = in.infer_walks;
    icfg.walk_len = ckpt.config.hyper.walk_len;
    icfg.seed = in.seed;
    const EmbeddingTable table = infer_all(ckpt, g, features, nodes, icfg);
    save_embedding_table(table, (out / "inferred.tsv").string());
    std::cout << "wrote " << table.ids.size() << " embeddings to " << out / "inferred.tsv"
              << "\n";
  });

  // ------------------------------------------------------------------- eval
  auto* eval_cmd = app.add_subcommand("eval", "Run the node-classification protocol");
  struct {
    CommonOpts common;
    FeatureOpts features;
    HyperOpts hyper;
    std::string edges, labels, splits_dir;
    int repeats = 10;
    int logreg_epochs = 1000;
    double logreg_lr = 0.1;
    int infer_walks = 8;
  } ev;
  eval_cmd->add_option("--edges", ev.edges, "Edge list file")->required();
  eval_cmd->add_option("--labels", ev.labels, "Label file")->required();
  eval_cmd->add_option("--splits-dir", ev.splits_dir,
                       "Directory with split_<r>.txt files (default: generate)");
  eval_cmd->add_option("--repeats", ev.repeats, "Number of generated splits");
  eval_cmd->add_option("--logreg-epochs", ev.logreg_epochs, "Final classifier epochs");
  eval_cmd->add_option("--logreg-lr", ev.logreg_lr, "Final classifier learning rate");
  eval_cmd->add_option("--infer-walks", ev.infer_walks, "Walks Z per new node (inductive)");
  add_feature_opts(eval_cmd, ev.features);
  add_hyper_opts(eval_cmd, ev.hyper);
  add_common(eval_cmd, ev.common);
  eval_cmd->callback([&] {
    validate_hyper(ev.hyper);
    const fs::path out = prepare_out(eval_cmd, ev.common);
    DatasetBundle data;
    data.graph = load_edge_list(ev.edges);
    data.labels = load_labels(ev.labels);
    data.features = resolve_features(ev.features, ev.hyper.cfg.hyper.dim);
    if (!ev.splits_dir.empty()) {
      std::vector<std::string> paths;
      for (int r = 0;; ++r) {
        const fs::path p = fs::path(ev.splits_dir) / ("split_" + std::to_string(r) + ".txt");
        if (!fs::exists(p)) break;
        paths.push_back(p.string());
      }
      data.splits = load_splits(paths);
      if (data.splits.empty()) throw DataError("no split_<r>.txt files in " + ev.splits_dir);
    } else {
      data.splits = make_splits(data.graph, data.labels, ev.repeats, ev.hyper.cfg.seed);
      for (std::size_t r = 0; r < data.splits.size(); ++r) {
        save_split(data.splits[r], (out / ("split_" + std::to_string(r) + ".txt")).string());
      }
    }
    LogregOptions logreg;
    logreg.epochs = ev.logreg_epochs;
    logreg.lr = ev.logreg_lr;
    const ProtocolResult result = run_protocol(data, ev.hyper.cfg, logreg, ev.infer_walks);
    write_report(result, ev.hyper.cfg, (out / "report.json").string(),
                 (out / "summary.txt").string());
    std::cout << "mean test accuracy " << result.mean << " +- " << result.stddev << " over "
              << result.outcomes.size() << " splits; report at " << out / "report.json" << "\n";
  });

  // ---------------------------------------------------------------- convert
  auto* convert_cmd = app.add_subcommand("convert", "Convert a content/cites citation dataset");
  struct {
    CommonOpts common;
    std::string raw;
  } cv;
  convert_cmd->add_option("--raw", cv.raw, "Directory with <name>.content and <name>.cites")
      ->required();
  add_common(convert_cmd, cv.common);
  convert_cmd->callback([&] {
    const fs::path out = prepare_out(convert_cmd, cv.common);
    const ConversionReport report = convert_citation_dataset(cv.raw, out.string());
    std::ofstream rep(out / "conversion_report.txt");
    rep << "nodes=" << report.num_nodes << "\nedges=" << report.num_edges
        << "\nclasses=" << report.num_classes << "\nvocab=" << report.vocab
        << "\ndangling_dropped=" << report.dangling_dropped
        << "\nself_loops_dropped=" << report.self_loops_dropped << "\n";
    std::cout << "converted " << report.num_nodes << " nodes, " << report.num_edges
              << " edges, " << report.num_classes << " classes (dropped "
              << report.dangling_dropped << " dangling citations)\n";
  });

  // ----------------------------------------------------------------- verify
  auto* verify_cmd = app.add_subcommand("verify", "Check converted dataset statistics");
  struct {
    CommonOpts common;
    std::string data;
    ExpectedStats expected;
  } vf;
  verify_cmd->add_option("--data", vf.data, "Converted dataset directory")->required();
  verify_cmd->add_option("--nodes", vf.expected.num_nodes, "Expected node count");
  verify_cmd->add_option("--edges", vf.expected.num_edges, "Expected undirected edge count");
  verify_cmd->add_option("--classes", vf.expected.num_classes, "Expected class count");
  verify_cmd->add_option("--vocab", vf.expected.vocab, "Expected vocabulary size");
  verify_cmd->add_option("--avg-degree", vf.expected.avg_degree, "Expected average degree");
  verify_cmd->add_option("--tolerance", vf.expected.edge_tolerance,
                         "Relative tolerance on the edge count");
  add_common(verify_cmd, vf.common);
  verify_cmd->callback([&] {
    const fs::path out = prepare_out(verify_cmd, vf.common);
    const VerifyResult result = verify_stats(vf.data, vf.expected);
    std::ofstream rep(out / "verify_report.txt");
    rep << result.report;
    std::cout << result.report;
    if (!result.ok) throw DataError("dataset statistics mismatch");
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
