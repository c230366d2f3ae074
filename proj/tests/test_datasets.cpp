#include <doctest.h>

#include <filesystem>

#include "sanne/dataset_convert.hpp"
#include "test_helpers.hpp"

using namespace sanne;
namespace tst = sanne::testing;
namespace fs = std::filesystem;

namespace {

// Six papers, two topics, vocabulary of four words, a couple of dangling
// citations and one self-citation.
void write_mini_raw(const fs::path& dir) {
  tst::write_file(dir / "mini.content",
                  "p0\t1\t0\t0\t1\tml\n"
                  "p1\t0\t1\t0\t0\tml\n"
                  "p2\t1\t1\t0\t0\tdb\n"
                  "p3\t0\t0\t1\t0\tdb\n"
                  "p4\t0\t0\t1\t1\tml\n"
                  "p5\t1\t0\t1\t0\tdb\n");
  tst::write_file(dir / "mini.cites",
                  "p0\tp1\n"
                  "p1\tp0\n"      // duplicate orientation
                  "p2\tp2\n"      // self-citation
                  "p3\tp4\n"
                  "p4\tp5\n"
                  "ghost\tp1\n"   // dangling
                  "p5\tphantom\n" // dangling
                  "p0\tp2\n");
}

}  // namespace

TEST_CASE("convert_citation_dataset emits the artifact files and counts") {
  const auto raw = tst::temp_dir("raw_mini");
  const auto out = tst::temp_dir("conv_mini");
  write_mini_raw(raw);

  const ConversionReport report = convert_citation_dataset(raw.string(), out.string());
  CHECK(report.num_nodes == 6);
  CHECK(report.num_edges == 4);  // p0-p1 (dedup), p3-p4, p4-p5, p0-p2
  CHECK(report.num_classes == 2);
  CHECK(report.vocab == 4);
  CHECK(report.dangling_dropped == 2);
  CHECK(report.self_loops_dropped == 1);

  const Graph g = load_edge_list((out / "edges.tsv").string());
  CHECK(g.num_nodes() == 6);
  CHECK(g.num_edges() == 4);
  for (int v = 0; v < g.num_nodes(); ++v) {
    for (int u : g.neighbors(v)) {
      CHECK(u >= 0);
      CHECK(u < 6);
    }
  }
  const LabelMap labels = load_labels((out / "labels.tsv").string());
  CHECK(labels.num_classes() == 2);
  CHECK(labels.class_names == std::vector<std::string>{"ml", "db"});
  const BowMatrix bow = load_bow((out / "bow.tsv").string());
  CHECK(bow.vocab == 4);
  CHECK(bow.num_nodes() == 6);
  CHECK(bow.rows[0].size() == 2u);  // p0 has two nonzero words

  // id map preserves content order
  const std::string idmap = tst::read_file(out / "idmap.tsv");
  CHECK(idmap.find("p0\t0") != std::string::npos);
  CHECK(idmap.find("p5\t5") != std::string::npos);
}

TEST_CASE("conversion is idempotent") {
  const auto raw = tst::temp_dir("raw_idem");
  write_mini_raw(raw);
  const auto out1 = tst::temp_dir("conv_idem1");
  const auto out2 = tst::temp_dir("conv_idem2");
  convert_citation_dataset(raw.string(), out1.string());
  convert_citation_dataset(raw.string(), out2.string());
  for (const char* f : {"edges.tsv", "bow.tsv", "labels.tsv", "idmap.tsv"}) {
    CHECK(tst::read_file(out1 / f) == tst::read_file(out2 / f));
  }
}

TEST_CASE("duplicate node ids in content are rejected") {
  const auto raw = tst::temp_dir("raw_dup");
  tst::write_file(raw / "dup.content", "p0\t1\t0\tml\np0\t0\t1\tdb\n");
  tst::write_file(raw / "dup.cites", "p0\tp0\n");
  const auto out = tst::temp_dir("conv_dup");
  CHECK_THROWS_WITH_AS(convert_citation_dataset(raw.string(), out.string()),
                       doctest::Contains("duplicate node id"), DataError);
}

TEST_CASE("missing raw files are reported") {
  const auto raw = tst::temp_dir("raw_missing");
  tst::write_file(raw / "x.content", "p0\t1\tml\n");
  const auto out = tst::temp_dir("conv_missing");
  CHECK_THROWS_WITH_AS(convert_citation_dataset(raw.string(), out.string()),
                       doctest::Contains(".cites"), DataError);
}

TEST_CASE("verify_stats passes on matching expectations and names mismatches") {
  const auto raw = tst::temp_dir("raw_verify");
  const auto out = tst::temp_dir("conv_verify");
  write_mini_raw(raw);
  convert_citation_dataset(raw.string(), out.string());

  ExpectedStats expected;
  expected.num_nodes = 6;
  expected.num_edges = 4;
  expected.num_classes = 2;
  expected.vocab = 4;
  expected.avg_degree = 2.0 * 4 / 6;
  const VerifyResult ok = verify_stats(out.string(), expected);
  CHECK(ok.ok);
  CHECK(ok.report.find("MISMATCH") == std::string::npos);

  ExpectedStats wrong = expected;
  wrong.num_classes = 3;
  const VerifyResult bad = verify_stats(out.string(), wrong);
  CHECK(!bad.ok);
  CHECK(bad.report.find("classes") != std::string::npos);
  CHECK(bad.report.find("MISMATCH") != std::string::npos);

  SUBCASE("edge counts get a relative tolerance") {
    // corrupt the edge file with one extra edge
    std::string edges = tst::read_file(out / "edges.tsv");
    edges += "1\t3\n";
    tst::write_file(out / "edges.tsv", edges);
    ExpectedStats five;
    five.num_edges = 5;  // exact match again
    CHECK(verify_stats(out.string(), five).ok);
    ExpectedStats four;
    four.num_edges = 4;  // off by 25%, far past the 1% tolerance
    const VerifyResult r = verify_stats(out.string(), four);
    CHECK(!r.ok);
    CHECK(r.report.find("edges") != std::string::npos);
  }
}
