#include "sanne/protocol.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "sanne/rng.hpp"

namespace sanne {

ProtocolResult run_protocol(const DatasetBundle& data, const TrainConfig& cfg,
                            const LogregOptions& logreg, int infer_walks) {
  if (data.splits.empty()) throw DataError("run_protocol: no splits");
  ProtocolResult result;
  result.setting = cfg.setting;

  for (std::size_t r = 0; r < data.splits.size(); ++r) {
    const Split& split = data.splits[r];
    TrainConfig split_cfg = cfg;
    split_cfg.seed = derive_seed(cfg.seed, 0x5EEDu, static_cast<std::uint64_t>(r));

    TrainResult trained;
    Tensor embeddings;
    if (cfg.setting == Setting::kInductive) {
      const Graph reduced = data.graph.remove_nodes(split.test);
      trained = train(split_cfg, reduced, data.features, data.labels, split);
      embeddings = trained.checkpoint.params.out_embed;
      InferConfig icfg;
      icfg.walks_per_node = infer_walks;
      icfg.walk_len = cfg.hyper.walk_len;
      icfg.seed = derive_seed(split_cfg.seed, seed_domain::kInfer);
      const EmbeddingTable inferred =
          infer_all(trained.checkpoint, data.graph, data.features, split.test, icfg);
      for (std::size_t i = 0; i < inferred.ids.size(); ++i) {
        const float* src = inferred.rows.row(static_cast<std::int64_t>(i));
        std::copy(src, src + inferred.dim, embeddings.row(inferred.ids[i]));
      }
    } else {
      trained = train(split_cfg, data.graph, data.features, data.labels, split);
      embeddings = trained.checkpoint.params.out_embed;
    }

    const LogregSelection sel =
        select_logreg(embeddings, data.labels, split.train, split.validation, logreg);

    SplitOutcome outcome;
    outcome.split_index = static_cast<int>(r);
    outcome.test_accuracy = accuracy(sel.clf, embeddings, data.labels, split.test);
    outcome.val_accuracy = sel.val_accuracy;
    outcome.lambda = sel.lambda;
    outcome.sanne_best_epoch = trained.best_epoch;
    outcome.logreg_best_epoch = sel.clf.best_epoch;
    outcome.history = trained.history;
    result.outcomes.push_back(std::move(outcome));
  }

  double mean = 0.0;
  for (const auto& o : result.outcomes) mean += o.test_accuracy;
  mean /= static_cast<double>(result.outcomes.size());
  double ss = 0.0;
  for (const auto& o : result.outcomes) {
    const double d = o.test_accuracy - mean;
    ss += d * d;
  }
  result.mean = mean;
  result.stddev = result.outcomes.size() > 1
                      ? std::sqrt(ss / static_cast<double>(result.outcomes.size() - 1))
                      : 0.0;
  return result;
}

void write_report(const ProtocolResult& result, const TrainConfig& cfg,
                  const std::string& json_path, const std::string& summary_path) {
  nlohmann::json report;
  report["setting"] = setting_name(result.setting);
  report["mean_test_accuracy"] = result.mean;
  report["stddev_test_accuracy"] = result.stddev;
  report["num_splits"] = result.outcomes.size();
  report["config"] = {
      {"d", cfg.hyper.dim},
      {"layers", cfg.hyper.layers},
      {"heads", cfg.hyper.heads},
      {"ff_hidden", cfg.hyper.ff_hidden},
      {"walk_len", cfg.hyper.walk_len},
      {"use_positional", cfg.hyper.use_positional},
      {"use_ff", cfg.hyper.use_ff},
      {"use_att", cfg.hyper.use_att},
      {"neighbors", cfg.neighbors},
      {"candidates", cfg.candidates},
      {"batch_size", cfg.batch_size},
      {"walks_per_node", cfg.walks_per_node},
      {"max_epochs", cfg.max_epochs},
      {"learning_rate", cfg.learning_rate},
      {"seed", cfg.seed},
  };
  nlohmann::json splits = nlohmann::json::array();
  for (const auto& o : result.outcomes) {
    nlohmann::json s;
    s["split"] = o.split_index;
    s["test_accuracy"] = o.test_accuracy;
    s["val_accuracy"] = o.val_accuracy;
    s["lambda"] = o.lambda;
    s["sanne_best_epoch"] = o.sanne_best_epoch;
    s["logreg_best_epoch"] = o.logreg_best_epoch;
    nlohmann::json hist = nlohmann::json::array();
    for (const auto& e : o.history) {
      hist.push_back({{"loss", e.mean_loss}, {"val_accuracy", e.val_accuracy}});
    }
    s["history"] = std::move(hist);
    splits.push_back(std::move(s));
  }
  report["splits"] = std::move(splits);

  std::ofstream jout(json_path);
  if (!jout) throw DataError("cannot write " + json_path);
  jout << report.dump(2) << "\n";

  std::ofstream sout(summary_path);
  if (!sout) throw DataError("cannot write " + summary_path);
  sout << "setting: " << setting_name(result.setting) << "\n";
  sout << std::fixed << std::setprecision(4);
  sout << "split  test_acc  val_acc  lambda  best_epoch\n";
  for (const auto& o : result.outcomes) {
    sout << std::setw(5) << o.split_index << "  " << std::setw(8) << o.test_accuracy << "  "
         << std::setw(7) << o.val_accuracy << "  " << std::setw(6) << o.lambda << "  "
         << std::setw(10) << o.sanne_best_epoch << "\n";
  }
  sout << "mean " << result.mean << " +- " << result.stddev << " over "
       << result.outcomes.size() << " splits\n";
}

}  // namespace sanne
