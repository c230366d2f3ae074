#include "sanne/dataset_convert.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace fs = std::filesystem;

namespace sanne {

namespace {

std::string find_with_suffix(const std::string& dir, const std::string& suffix) {
  std::vector<std::string> hits;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.size() > suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
      hits.push_back(entry.path().string());
    }
  }
  if (hits.empty()) throw DataError("no *" + suffix + " file in " + dir);
  if (hits.size() > 1) throw DataError("multiple *" + suffix + " files in " + dir);
  return hits[0];
}

}  // namespace

ConversionReport convert_citation_dataset(const std::string& raw_dir, const std::string& out_dir) {
  ConversionReport report;
  report.content_file = find_with_suffix(raw_dir, ".content");
  report.cites_file = find_with_suffix(raw_dir, ".cites");
  fs::create_directories(out_dir);

  // Pass 1: content rows define the node universe, features and labels.
  std::ifstream content(report.content_file);
  if (!content) throw DataError("cannot open " + report.content_file);
  std::unordered_map<std::string, int> dense_id;
  std::vector<std::string> orig_ids;
  std::vector<std::string> label_strings;
  BowMatrix bow;
  std::string line;
  int line_no = 0;
  int vocab = -1;
  while (std::getline(content, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream is(line);
    std::vector<std::string> tokens;
    std::string tok;
    while (is >> tok) tokens.push_back(std::move(tok));
    if (tokens.size() < 3) {
      throw DataError(report.content_file + ":" + std::to_string(line_no) +
                      ": expected 'id w_1..w_V label'");
    }
    const int row_vocab = static_cast<int>(tokens.size()) - 2;
    if (vocab < 0) {
      vocab = row_vocab;
    } else if (vocab != row_vocab) {
      throw DataError(report.content_file + ":" + std::to_string(line_no) +
                      ": inconsistent vocabulary size " + std::to_string(row_vocab) + " vs " +
                      std::to_string(vocab));
    }
    const auto [it, fresh] = dense_id.try_emplace(tokens[0], static_cast<int>(orig_ids.size()));
    if (!fresh) {
      throw DataError(report.content_file + ":" + std::to_string(line_no) +
                      ": duplicate node id '" + tokens[0] + "'");
    }
    orig_ids.push_back(tokens[0]);
    label_strings.push_back(tokens.back());
    std::vector<std::pair<int, float>> entries;
    for (int w = 0; w < row_vocab; ++w) {
      const float c = std::stof(tokens[w + 1]);
      if (c != 0.0f) entries.emplace_back(w, c);
    }
    bow.rows.push_back(std::move(entries));
  }
  bow.vocab = vocab < 0 ? 0 : vocab;
  report.num_nodes = static_cast<int>(orig_ids.size());
  report.vocab = bow.vocab;
  if (report.num_nodes == 0) throw DataError(report.content_file + ": no content rows");

  // Pass 2: cites rows become undirected edges; unknown endpoints dropped.
  std::ifstream cites(report.cites_file);
  if (!cites) throw DataError("cannot open " + report.cites_file);
  std::set<std::pair<int, int>> edges;
  line_no = 0;
  while (std::getline(cites, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream is(line);
    std::string a, b;
    if (!(is >> a >> b)) {
      throw DataError(report.cites_file + ":" + std::to_string(line_no) +
                      ": expected 'cited citing'");
    }
    const auto ia = dense_id.find(a);
    const auto ib = dense_id.find(b);
    if (ia == dense_id.end() || ib == dense_id.end()) {
      ++report.dangling_dropped;
      continue;
    }
    if (ia->second == ib->second) {
      ++report.self_loops_dropped;
      continue;
    }
    const int u = std::min(ia->second, ib->second);
    const int v = std::max(ia->second, ib->second);
    edges.emplace(u, v);
  }
  report.num_edges = static_cast<std::int64_t>(edges.size());

  std::set<std::string> classes(label_strings.begin(), label_strings.end());
  report.num_classes = static_cast<int>(classes.size());

  // Emit artifact-format files.
  const Graph g =
      Graph::from_edges(report.num_nodes, {edges.begin(), edges.end()});
  save_edge_list(g, (fs::path(out_dir) / "edges.tsv").string());
  save_bow(bow, (fs::path(out_dir) / "bow.tsv").string());
  {
    std::ofstream out(fs::path(out_dir) / "labels.tsv");
    if (!out) throw DataError("cannot write labels.tsv");
    for (int v = 0; v < report.num_nodes; ++v) out << v << "\t" << label_strings[v] << "\n";
  }
  {
    std::ofstream out(fs::path(out_dir) / "idmap.tsv");
    if (!out) throw DataError("cannot write idmap.tsv");
    for (int v = 0; v < report.num_nodes; ++v) out << orig_ids[v] << "\t" << v << "\n";
  }
  return report;
}

VerifyResult verify_stats(const std::string& converted_dir, const ExpectedStats& expected) {
  const Graph g = load_edge_list((fs::path(converted_dir) / "edges.tsv").string());
  const BowMatrix bow = load_bow((fs::path(converted_dir) / "bow.tsv").string());
  const LabelMap labels = load_labels((fs::path(converted_dir) / "labels.tsv").string());

  VerifyResult result;
  std::ostringstream os;
  auto check_exact = [&](const char* field, std::int64_t got, std::int64_t want) {
    if (want < 0) return;
    const bool ok = got == want;
    if (!ok) result.ok = false;
    os << field << ": got " << got << ", expected " << want << (ok ? " [ok]" : " [MISMATCH]")
       << "\n";
  };
  check_exact("nodes", g.num_nodes(), expected.num_nodes);
  check_exact("classes", labels.num_classes(), expected.num_classes);
  check_exact("vocab", bow.vocab, expected.vocab);
  if (expected.num_edges >= 0) {
    const double rel = std::abs(static_cast<double>(g.num_edges() - expected.num_edges)) /
                       static_cast<double>(expected.num_edges);
    const bool ok = rel <= expected.edge_tolerance;
    if (!ok) result.ok = false;
    os << "edges: got " << g.num_edges() << ", expected " << expected.num_edges << " (rel diff "
       << rel << ", tolerance " << expected.edge_tolerance << ")" << (ok ? " [ok]" : " [MISMATCH]")
       << "\n";
  }
  if (expected.avg_degree >= 0.0) {
    const double avg = g.num_nodes() > 0
                           ? 2.0 * static_cast<double>(g.num_edges()) / g.num_nodes()
                           : 0.0;
    const bool ok = std::abs(avg - expected.avg_degree) <= 0.1;
    if (!ok) result.ok = false;
    os << "avg_degree: got " << avg << ", expected " << expected.avg_degree << " +-0.1"
       << (ok ? " [ok]" : " [MISMATCH]") << "\n";
  }
  result.report = os.str();
  return result;
}

}  // namespace sanne
