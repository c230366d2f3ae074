// End-to-end tests of the `sanne` binary (path injected by CMake).

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include "sanne/encoder.hpp"
#include "sanne/graph.hpp"
#include "sanne/infer.hpp"
#include "sanne/trainer.hpp"
#include "test_helpers.hpp"

using namespace sanne;
namespace tst = sanne::testing;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  const auto log = fs::temp_directory_path() / "sanne_cli_out.txt";
  const std::string cmd = std::string(SANNE_CLI_PATH) + " " + args + " > " + log.string() +
                          " 2>&1";
  const int rc = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.output = tst::read_file(log);
  return r;
}

// Synthetic dataset large enough for the 20-per-class + 1000 + 1000 split
// rule, saved in the artifact's file formats.
struct DiskDataset {
  fs::path dir;
  DiskDataset() {
    dir = tst::temp_dir("cli_data");
    const auto ds = tst::make_sbm(700, 3, 0.006, 0.0015, 16, 21);
    save_edge_list(ds.graph, (dir / "edges.tsv").string());
    save_features(ds.features, (dir / "features.tsv").string());
    std::ofstream labels(dir / "labels.tsv");
    for (const auto& [id, cls] : ds.labels.label_of) {
      labels << id << "\t" << ds.labels.class_names[cls] << "\n";
    }
  }
  std::string edges() const { return (dir / "edges.tsv").string(); }
  std::string features() const { return (dir / "features.tsv").string(); }
  std::string labels() const { return (dir / "labels.tsv").string(); }
};

const DiskDataset& dataset() {
  static DiskDataset ds;
  return ds;
}

std::string small_model_flags() {
  return "--d 16 --layers 1 --heads 2 --ff-hidden 32 --walk-len 8 --neighbors 2 "
         "--candidates 64 --batch-size 64 --walks-per-node 1 --epochs 2 --lr 1e-3 "
         "--monitor-logreg-epochs 25 --threads 1 --seed 9";
}

}  // namespace

TEST_CASE("split command writes the requested number of split files") {
  const auto& ds = dataset();
  const auto out = tst::temp_dir("cli_split");
  const auto r = run_cli("split --edges " + ds.edges() + " --labels " + ds.labels() +
                         " --repeats 2 --seed 5 --out " + out.string());
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(out / "split_0.txt"));
  CHECK(fs::exists(out / "split_1.txt"));
  CHECK(fs::exists(out / "resolved.cfg"));
  const Split s = load_split((out / "split_0.txt").string());
  CHECK(s.train.size() == 60u);
  CHECK(s.validation.size() == 1000u);
  CHECK(s.test.size() == 1000u);
}

TEST_CASE("walks command dumps valid walks") {
  const auto& ds = dataset();
  const auto out = tst::temp_dir("cli_walks");
  const auto r = run_cli("walks --edges " + ds.edges() +
                         " --walks-per-node 1 --walk-len 5 --seed 3 --out " + out.string());
  CHECK(r.exit_code == 0);
  std::ifstream in(out / "walks.txt");
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 2100);
}

TEST_CASE("rejected configurations name the offending option") {
  const auto& ds = dataset();
  const auto out = tst::temp_dir("cli_badcfg");
  SUBCASE("H must divide d") {
    const auto r = run_cli("train --edges " + ds.edges() + " --labels " + ds.labels() +
                           " --split nowhere.txt --features " + ds.features() +
                           " --d 128 --heads 3 --out " + out.string());
    CHECK(r.exit_code != 0);
    CHECK(r.output.find("H must divide d") != std::string::npos);
  }
  SUBCASE("unknown key in a config file") {
    tst::write_file(out / "bad.cfg", "bogus_key=1\n");
    const auto r = run_cli("split --edges " + ds.edges() + " --labels " + ds.labels() +
                           " --out " + out.string() + " --config " +
                           (out / "bad.cfg").string());
    CHECK(r.exit_code != 0);
    CHECK(r.output.find("bogus_key") != std::string::npos);
  }
  SUBCASE("both ablation flags off is rejected") {
    const auto r = run_cli("train --edges " + ds.edges() + " --labels " + ds.labels() +
                           " --split nowhere.txt --features " + ds.features() +
                           " --no-ff --no-att --out " + out.string());
    CHECK(r.exit_code != 0);
  }
}

TEST_CASE("train/infer pipeline produces artifacts; inductive rows stay at init") {
  const auto& ds = dataset();
  const auto split_dir = tst::temp_dir("cli_tr_splits");
  REQUIRE(run_cli("split --edges " + ds.edges() + " --labels " + ds.labels() +
                  " --repeats 1 --seed 5 --out " + split_dir.string())
              .exit_code == 0);

  const auto out = tst::temp_dir("cli_train");
  const auto r = run_cli("train --edges " + ds.edges() + " --labels " + ds.labels() +
                         " --features " + ds.features() + " --split " +
                         (split_dir / "split_0.txt").string() + " --setting inductive " +
                         small_model_flags() + " --out " + out.string());
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(out / "checkpoint.bin"));
  CHECK(fs::exists(out / "history.tsv"));
  CHECK(fs::exists(out / "embeddings.tsv"));
  CHECK(fs::exists(out / "resolved.cfg"));
  const std::string resolved = tst::read_file(out / "resolved.cfg");
  CHECK(resolved.find("epochs=") != std::string::npos);  // defaults echoed

  // O rows of removed test nodes equal their initialization
  const Checkpoint ckpt = load_checkpoint((out / "checkpoint.bin").string());
  const Split split = load_split((split_dir / "split_0.txt").string());
  const ModelParams init =
      init_params<float>(ckpt.config.hyper, ckpt.params.num_nodes(), ckpt.config.seed);
  for (int v : split.test) {
    for (int j = 0; j < ckpt.config.hyper.dim; ++j) {
      REQUIRE(ckpt.params.out_embed.row(v)[j] == init.out_embed.row(v)[j]);
    }
  }

  // inference for the removed nodes on the full graph
  const auto nodes_file = out / "new_nodes.txt";
  {
    std::ofstream nf(nodes_file);
    for (int i = 0; i < 5; ++i) nf << split.test[i] << "\n";
  }
  const auto iout = tst::temp_dir("cli_infer");
  const auto ri = run_cli("infer --ckpt " + (out / "checkpoint.bin").string() + " --edges " +
                          ds.edges() + " --features " + ds.features() + " --nodes " +
                          nodes_file.string() + " --infer-walks 4 --seed 2 --threads 1 --out " +
                          iout.string());
  CHECK(ri.exit_code == 0);
  std::ifstream emb(iout / "inferred.tsv");
  std::string line;
  int rows = 0;
  while (std::getline(emb, line)) ++rows;
  CHECK(rows == 5);
}

TEST_CASE("eval with a fixed seed and --threads 1 is byte-identical") {
  const auto& ds = dataset();
  const auto out1 = tst::temp_dir("cli_eval1");
  const auto out2 = tst::temp_dir("cli_eval2");
  const std::string common = "eval --edges " + ds.edges() + " --labels " + ds.labels() +
                             " --features " + ds.features() + " --repeats 2 " +
                             small_model_flags() + " --logreg-epochs 60 ";
  const auto r1 = run_cli(common + "--out " + out1.string());
  REQUIRE(r1.exit_code == 0);
  const auto r2 = run_cli(common + "--out " + out2.string());
  REQUIRE(r2.exit_code == 0);
  CHECK(tst::read_file(out1 / "report.json") == tst::read_file(out2 / "report.json"));
  CHECK(tst::read_file(out1 / "summary.txt") == tst::read_file(out2 / "summary.txt"));
  CHECK(!tst::read_file(out1 / "report.json").empty());
}

TEST_CASE("SANNE_OUT provides the default output root") {
  const auto& ds = dataset();
  const auto root = tst::temp_dir("cli_envroot");
  setenv("SANNE_OUT", root.string().c_str(), 1);
  const auto r = run_cli("walks --edges " + ds.edges() +
                         " --walks-per-node 1 --walk-len 3 --seed 1");
  unsetenv("SANNE_OUT");
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(root / "walks" / "walks.txt"));
}
