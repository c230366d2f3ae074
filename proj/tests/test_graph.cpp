#include <doctest.h>

#include <filesystem>

#include "sanne/graph.hpp"
#include "test_helpers.hpp"

using namespace sanne;
namespace tst = sanne::testing;

TEST_CASE("load_edge_list collapses duplicates and symmetrizes") {
  const auto dir = tst::temp_dir("edges");
  tst::write_file(dir / "e.tsv", "0\t1\n1\t0\n");
  const Graph g = load_edge_list((dir / "e.tsv").string());
  CHECK(g.num_nodes() == 2);
  CHECK(g.num_edges() == 1);
  REQUIRE(g.neighbors(0).size() == 1);
  CHECK(g.neighbors(0)[0] == 1);
  CHECK(g.neighbors(1)[0] == 0);
}

TEST_CASE("load_edge_list honors nodes= header on an empty edge set") {
  const auto dir = tst::temp_dir("edges_hdr");
  tst::write_file(dir / "e.tsv", "nodes=5\n# comment line\n");
  const Graph g = load_edge_list((dir / "e.tsv").string());
  CHECK(g.num_nodes() == 5);
  CHECK(g.num_edges() == 0);
  for (int v = 0; v < 5; ++v) {
    CHECK(g.neighbors(v).empty());
    REQUIRE(g.step_targets(v).size() == 1);
    CHECK(g.step_targets(v)[0] == v);  // isolated-node self-loop
  }
}

TEST_CASE("load_edge_list reports the offending line") {
  const auto dir = tst::temp_dir("edges_bad");
  tst::write_file(dir / "e.tsv", "0\t1\n2\n");
  CHECK_THROWS_WITH_AS(load_edge_list((dir / "e.tsv").string()),
                       doctest::Contains(":2:"), DataError);
  tst::write_file(dir / "neg.tsv", "0\t-3\n");
  CHECK_THROWS_AS(load_edge_list((dir / "neg.tsv").string()), DataError);
  tst::write_file(dir / "over.tsv", "nodes=2\n0\t5\n");
  CHECK_THROWS_AS(load_edge_list((dir / "over.tsv").string()), DataError);
}

TEST_CASE("graph symmetry holds after loading random edge lists") {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + static_cast<int>(rng.next_below(12));
    std::vector<std::pair<int, int>> edges;
    for (int e = 0; e < n * 2; ++e) {
      const int u = static_cast<int>(rng.next_below(n));
      const int v = static_cast<int>(rng.next_below(n));
      edges.emplace_back(u, v);
    }
    const Graph g = Graph::from_edges(n, edges);
    for (int v = 0; v < n; ++v) {
      for (int u : g.neighbors(v)) {
        const auto nu = g.neighbors(u);
        CHECK(std::find(nu.begin(), nu.end(), v) != nu.end());
        CHECK(u != v);
      }
    }
  }
}

TEST_CASE("loaders are deterministic on byte-identical input") {
  const auto dir = tst::temp_dir("edges_det");
  tst::write_file(dir / "e.tsv", "0\t1\n1\t2\n3\t4\n");
  const Graph a = load_edge_list((dir / "e.tsv").string());
  const Graph b = load_edge_list((dir / "e.tsv").string());
  CHECK(a.fingerprint() == b.fingerprint());
}

TEST_CASE("save/load edge list round-trips the structure") {
  const Graph g = tst::toy_graph6();
  const auto dir = tst::temp_dir("edges_rt");
  save_edge_list(g, (dir / "e.tsv").string());
  const Graph h = load_edge_list((dir / "e.tsv").string());
  CHECK(g.fingerprint() == h.fingerprint());
}

TEST_CASE("load_features validates rows") {
  const auto dir = tst::temp_dir("feats");
  tst::write_file(dir / "zero.tsv", "0\t0\t0\t0\n");
  const FeatureMatrix m = load_features((dir / "zero.tsv").string(), 3);
  CHECK(m.shape == std::vector<int>{1, 3});
  CHECK(m.data == std::vector<float>{0.f, 0.f, 0.f});

  tst::write_file(dir / "short.tsv", "0\t1.0\t2.0\n");
  CHECK_THROWS_WITH_AS(load_features((dir / "short.tsv").string(), 3),
                       doctest::Contains("expected 3 values"), DataError);

  tst::write_file(dir / "gap.tsv", "0\t1\t2\t3\n2\t1\t2\t3\n");
  CHECK_THROWS_WITH_AS(load_features((dir / "gap.tsv").string(), 3),
                       doctest::Contains("missing row for node 1"), DataError);

  tst::write_file(dir / "nan.tsv", "0\tnan\t2\t3\n");
  CHECK_THROWS_AS(load_features((dir / "nan.tsv").string(), 3), DataError);

  tst::write_file(dir / "dup.tsv", "0\t1\t2\t3\n0\t1\t2\t3\n");
  CHECK_THROWS_AS(load_features((dir / "dup.tsv").string(), 3), DataError);
}

TEST_CASE("project_features normalizes nonzero rows and is deterministic") {
  BowMatrix bow;
  bow.vocab = 50;
  SplitMix64 rng(3);
  for (int v = 0; v < 16; ++v) {
    std::vector<std::pair<int, float>> row;
    for (int k = 0; k < 6; ++k) {
      row.emplace_back(static_cast<int>(rng.next_below(50)), 1.0f + static_cast<float>(k % 3));
    }
    bow.rows.push_back(row);
  }
  bow.rows.push_back({});                // all-zero row
  bow.rows.push_back(bow.rows[0]);       // duplicate of row 0

  const FeatureMatrix a = project_features(bow, 8, 42);
  const FeatureMatrix b = project_features(bow, 8, 42);
  CHECK(a.data == b.data);

  for (int v = 0; v < 16; ++v) {
    double norm = 0;
    for (int j = 0; j < 8; ++j) norm += static_cast<double>(a.row(v)[j]) * a.row(v)[j];
    CHECK(std::abs(std::sqrt(norm) - 1.0) < 1e-5);
  }
  for (int j = 0; j < 8; ++j) CHECK(a.row(16)[j] == 0.0f);  // zero row stays zero
  for (int j = 0; j < 8; ++j) CHECK(a.row(17)[j] == a.row(0)[j]);

  CHECK_THROWS_AS(project_features(bow, 0, 1), DataError);
  BowMatrix empty_vocab;
  empty_vocab.rows.push_back({});
  CHECK_THROWS_AS(project_features(empty_vocab, 8, 1), DataError);
}

namespace {

tst::SyntheticDataset splits_fixture() {
  // 3 classes x 700 nodes > 20*3 + 2000 labeled nodes.
  return tst::make_sbm(700, 3, 0.004, 0.001, 4, 11);
}

}  // namespace

TEST_CASE("make_splits produces disjoint sets of the prescribed sizes") {
  const auto ds = splits_fixture();
  const auto splits = make_splits(ds.graph, ds.labels, 3, 5);
  REQUIRE(splits.size() == 3);
  for (const Split& s : splits) {
    CHECK(s.train.size() == 20u * 3);
    CHECK(s.validation.size() == 1000u);
    CHECK(s.test.size() == 1000u);
    std::vector<char> seen(ds.graph.num_nodes(), 0);
    std::vector<int> per_class(3, 0);
    for (int v : s.train) {
      CHECK(!seen[v]);
      seen[v] = 1;
      ++per_class[ds.labels.label_of.at(v)];
    }
    for (int c = 0; c < 3; ++c) CHECK(per_class[c] == 20);
    for (int v : s.validation) {
      CHECK(!seen[v]);
      seen[v] = 1;
    }
    for (int v : s.test) {
      CHECK(!seen[v]);
      seen[v] = 1;
    }
  }
  // distinct repeats draw different sets
  CHECK(splits[0].train != splits[1].train);
}

TEST_CASE("make_splits is deterministic and validates preconditions") {
  const auto ds = splits_fixture();
  const auto a = make_splits(ds.graph, ds.labels, 2, 9);
  const auto b = make_splits(ds.graph, ds.labels, 2, 9);
  CHECK(a[0].train == b[0].train);
  CHECK(a[1].test == b[1].test);

  LabelMap tiny;
  tiny.class_names = {"a", "b"};
  for (int v = 0; v < 30; ++v) tiny.label_of[v] = v % 2;
  CHECK_THROWS_AS(make_splits(ds.graph, tiny, 1, 1), DataError);
}

TEST_CASE("split files round-trip") {
  const auto ds = splits_fixture();
  const auto splits = make_splits(ds.graph, ds.labels, 1, 5);
  const auto dir = tst::temp_dir("splits");
  save_split(splits[0], (dir / "split_0.txt").string());
  const Split back = load_split((dir / "split_0.txt").string());
  CHECK(back.train == splits[0].train);
  CHECK(back.validation == splits[0].validation);
  CHECK(back.test == splits[0].test);
  CHECK(back.seed == splits[0].seed);
}

TEST_CASE("remove_nodes drops incident edges and flags absence") {
  const Graph g = tst::toy_graph6();

  SUBCASE("empty removal is the identity") {
    const Graph h = g.remove_nodes({});
    CHECK(h.fingerprint() == g.fingerprint());
  }

  SUBCASE("removed nodes cannot appear in adjacency") {
    const Graph h = g.remove_nodes({1, 4});
    CHECK(!h.present(1));
    CHECK(!h.present(4));
    CHECK(h.present_ids() == std::vector<int>{0, 2, 3, 5});
    for (int v : h.present_ids()) {
      for (int u : h.neighbors(v)) {
        CHECK(u != 1);
        CHECK(u != 4);
      }
    }
  }

  SUBCASE("adjacency among survivors is unchanged") {
    SplitMix64 rng(13);
    for (int trial = 0; trial < 25; ++trial) {
      const int n = 5 + static_cast<int>(rng.next_below(10));
      std::vector<std::pair<int, int>> edges;
      for (int e = 0; e < 2 * n; ++e) {
        edges.emplace_back(static_cast<int>(rng.next_below(n)),
                           static_cast<int>(rng.next_below(n)));
      }
      const Graph big = Graph::from_edges(n, edges);
      std::vector<int> removed;
      for (int v = 0; v < n; ++v) {
        if (rng.next_below(3) == 0) removed.push_back(v);
      }
      const Graph small = big.remove_nodes(removed);
      std::vector<char> gone(n, 0);
      for (int v : removed) gone[v] = 1;
      for (int v = 0; v < n; ++v) {
        if (gone[v]) continue;
        std::vector<int> expect;
        for (int u : big.neighbors(v)) {
          if (!gone[u]) expect.push_back(u);
        }
        const auto got = small.neighbors(v);
        CHECK(std::vector<int>(got.begin(), got.end()) == expect);
      }
    }
  }

  SUBCASE("survivor isolated by removal falls back to the self-loop rule") {
    const Graph star = tst::make_graph(4, {{0, 1}, {0, 2}, {0, 3}});
    const Graph h = star.remove_nodes({0});
    for (int v : {1, 2, 3}) {
      CHECK(h.neighbors(v).empty());
      REQUIRE(h.step_targets(v).size() == 1);
      CHECK(h.step_targets(v)[0] == v);
    }
  }

  SUBCASE("out-of-range id is rejected") {
    CHECK_THROWS_AS(g.remove_nodes({17}), DataError);
  }
}

TEST_CASE("labels load with first-seen class order") {
  const auto dir = tst::temp_dir("labels");
  tst::write_file(dir / "l.tsv", "0\tneural\n1\ttheory\n2\tneural\n");
  const LabelMap lm = load_labels((dir / "l.tsv").string());
  CHECK(lm.num_classes() == 2);
  CHECK(lm.class_names == std::vector<std::string>{"neural", "theory"});
  CHECK(lm.label_of.at(0) == 0);
  CHECK(lm.label_of.at(1) == 1);
  CHECK(lm.label_of.at(2) == 0);

  tst::write_file(dir / "conflict.tsv", "0\ta\n0\tb\n");
  CHECK_THROWS_AS(load_labels((dir / "conflict.tsv").string()), DataError);
}
