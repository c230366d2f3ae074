#pragma once

#include <string>
#include <vector>

#include "sanne/evaluator.hpp"
#include "sanne/graph.hpp"
#include "sanne/infer.hpp"
#include "sanne/trainer.hpp"

namespace sanne {

struct DatasetBundle {
  Graph graph;
  FeatureMatrix features;
  LabelMap labels;
  std::vector<Split> splits;
};

struct SplitOutcome {
  int split_index = 0;
  double test_accuracy = 0.0;
  double val_accuracy = 0.0;
  double lambda = 0.0;
  int sanne_best_epoch = -1;
  int logreg_best_epoch = -1;
  std::vector<EpochStats> history;
};

struct ProtocolResult {
  std::vector<SplitOutcome> outcomes;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n-1)
  Setting setting = Setting::kTransductive;
};

// Per split: (inductive only) remove the test nodes and train on the rest,
// then restore embeddings for test nodes with Algorithm-2 inference on the
// full graph; finally fit the logistic-regression protocol and score the
// test set. Per-split seeds derive from cfg.seed, so a fixed master seed
// makes the whole run deterministic.
ProtocolResult run_protocol(const DatasetBundle& data, const TrainConfig& cfg,
                            const LogregOptions& logreg, int infer_walks = 8);

// Machine-readable report (JSON) and human-readable summary table.
void write_report(const ProtocolResult& result, const TrainConfig& cfg,
                  const std::string& json_path, const std::string& summary_path);

}  // namespace sanne
