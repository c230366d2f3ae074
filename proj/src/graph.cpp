#include "sanne/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sanne/rng.hpp"

namespace sanne {

namespace {

[[noreturn]] void parse_fail(const std::string& path, int line_no, const std::string& what) {
  throw DataError(path + ":" + std::to_string(line_no) + ": " + what);
}

bool is_comment_or_blank(const std::string& line) {
  for (char ch : line) {
    if (ch == '#') return true;
    if (!isspace(static_cast<unsigned char>(ch))) return false;
  }
  return true;
}

std::ifstream open_or_fail(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

}  // namespace

// ----------------------------------------------------------------- Graph

Graph Graph::from_edges(int num_nodes, const std::vector<std::pair<int, int>>& edges) {
  Graph g;
  g.num_nodes_ = num_nodes;
  g.adj_.assign(num_nodes, {});
  g.present_.assign(num_nodes, 1);
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= num_nodes || v >= num_nodes) {
      throw DataError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                      ") out of range for " + std::to_string(num_nodes) + " nodes");
    }
    if (u == v) continue;  // self-loops only ever arise from the isolated-node rule
    g.adj_[u].push_back(v);
    g.adj_[v].push_back(u);
  }
  for (auto& nbrs : g.adj_) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  }
  g.rebuild_cached();
  return g;
}

void Graph::rebuild_cached() {
  std::int64_t deg = 0;
  present_ids_.clear();
  identity_.resize(num_nodes_);
  for (int v = 0; v < num_nodes_; ++v) {
    identity_[v] = v;
    deg += static_cast<std::int64_t>(adj_[v].size());
    if (present_[v]) present_ids_.push_back(v);
  }
  num_edges_ = deg / 2;
}

Graph Graph::remove_nodes(const std::vector<int>& removed) const {
  std::vector<char> gone(num_nodes_, 0);
  for (int v : removed) {
    if (v < 0 || v >= num_nodes_) {
      throw DataError("remove_nodes: id " + std::to_string(v) + " out of range");
    }
    gone[v] = 1;
  }
  Graph g;
  g.num_nodes_ = num_nodes_;
  g.adj_.assign(num_nodes_, {});
  g.present_ = present_;
  for (int v = 0; v < num_nodes_; ++v) {
    if (gone[v]) {
      g.present_[v] = 0;
      continue;
    }
    if (!present_[v]) continue;
    for (int u : adj_[v]) {
      if (!gone[u]) g.adj_[v].push_back(u);
    }
  }
  g.rebuild_cached();
  return g;
}

std::uint64_t Graph::fingerprint() const {
  // FNV-1a over the structural content.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (i * 8)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  mix(static_cast<std::uint64_t>(num_nodes_));
  for (int v = 0; v < num_nodes_; ++v) {
    mix(present_[v] ? 0x50 : 0x41);
    mix(adj_[v].size());
    for (int u : adj_[v]) mix(static_cast<std::uint64_t>(u));
  }
  return h;
}

// --------------------------------------------------------------- loaders

Graph load_edge_list(const std::string& path) {
  std::ifstream in = open_or_fail(path);
  std::string line;
  int line_no = 0;
  long long header_nodes = -1;
  long long max_id = -1;
  std::vector<std::pair<int, int>> edges;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_comment_or_blank(line)) continue;
    if (first_content_line && line.rfind("nodes=", 0) == 0) {
      first_content_line = false;
      std::istringstream is(line.substr(6));
      if (!(is >> header_nodes) || header_nodes < 0) parse_fail(path, line_no, "bad nodes= header");
      continue;
    }
    first_content_line = false;
    std::istringstream is(line);
    long long u, v;
    std::string extra;
    if (!(is >> u >> v) || (is >> extra)) {
      parse_fail(path, line_no, "expected two integer node ids, got '" + line + "'");
    }
    if (u < 0 || v < 0) parse_fail(path, line_no, "negative node id");
    max_id = std::max({max_id, u, v});
    edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
  }
  const long long num_nodes = header_nodes >= 0 ? header_nodes : max_id + 1;
  if (header_nodes >= 0 && max_id >= header_nodes) {
    throw DataError(path + ": node id " + std::to_string(max_id) +
                    " exceeds nodes= header " + std::to_string(header_nodes));
  }
  return Graph::from_edges(static_cast<int>(num_nodes), edges);
}

void save_edge_list(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "nodes=" << g.num_nodes() << "\n";
  for (int v = 0; v < g.num_nodes(); ++v) {
    for (int u : g.neighbors(v)) {
      if (v < u) out << v << "\t" << u << "\n";
    }
  }
}

FeatureMatrix load_features(const std::string& path, int expected_dim) {
  std::ifstream in = open_or_fail(path);
  std::string line;
  int line_no = 0;
  std::vector<std::pair<int, std::vector<float>>> rows;
  long long max_id = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_comment_or_blank(line)) continue;
    std::istringstream is(line);
    long long id;
    if (!(is >> id) || id < 0) parse_fail(path, line_no, "bad node id");
    std::vector<float> vals;
    vals.reserve(expected_dim);
    double x;
    while (is >> x) vals.push_back(static_cast<float>(x));
    if (static_cast<int>(vals.size()) != expected_dim) {
      parse_fail(path, line_no,
                 "expected " + std::to_string(expected_dim) + " values, got " +
                     std::to_string(vals.size()));
    }
    for (float v : vals) {
      if (!std::isfinite(v)) parse_fail(path, line_no, "non-finite feature value");
    }
    max_id = std::max(max_id, id);
    rows.emplace_back(static_cast<int>(id), std::move(vals));
  }
  const std::int64_t n = max_id + 1;
  FeatureMatrix m({static_cast<int>(n), expected_dim});
  std::vector<char> seen(n, 0);
  for (auto& [id, vals] : rows) {
    if (seen[id]) throw DataError(path + ": duplicate row for node " + std::to_string(id));
    seen[id] = 1;
    std::copy(vals.begin(), vals.end(), m.row(id));
  }
  for (std::int64_t v = 0; v < n; ++v) {
    if (!seen[v]) throw DataError(path + ": missing row for node " + std::to_string(v));
  }
  return m;
}

void save_features(const FeatureMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out.precision(9);
  for (std::int64_t v = 0; v < m.shape[0]; ++v) {
    out << v;
    const float* row = m.row(v);
    for (int j = 0; j < m.shape[1]; ++j) out << "\t" << row[j];
    out << "\n";
  }
}

LabelMap load_labels(const std::string& path) {
  std::ifstream in = open_or_fail(path);
  LabelMap labels;
  std::map<std::string, int> index_of;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_comment_or_blank(line)) continue;
    std::istringstream is(line);
    long long id;
    std::string cls, extra;
    if (!(is >> id >> cls) || (is >> extra) || id < 0) {
      parse_fail(path, line_no, "expected 'node_id<TAB>class'");
    }
    auto [it, fresh] = index_of.try_emplace(cls, static_cast<int>(labels.class_names.size()));
    if (fresh) labels.class_names.push_back(cls);
    auto [lit, inserted] = labels.label_of.try_emplace(static_cast<int>(id), it->second);
    if (!inserted && lit->second != it->second) {
      parse_fail(path, line_no, "conflicting label for node " + std::to_string(id));
    }
  }
  return labels;
}

void save_class_map(const LabelMap& labels, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  for (std::size_t i = 0; i < labels.class_names.size(); ++i) {
    out << labels.class_names[i] << "\t" << i << "\n";
  }
}

std::vector<int> LabelMap::labeled_ids() const {
  std::vector<int> ids;
  ids.reserve(label_of.size());
  for (const auto& [id, cls] : label_of) ids.push_back(id);
  return ids;
}

BowMatrix load_bow(const std::string& path) {
  std::ifstream in = open_or_fail(path);
  BowMatrix bow;
  std::string line;
  int line_no = 0;
  std::vector<std::pair<int, std::vector<std::pair<int, float>>>> rows;
  long long max_id = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_comment_or_blank(line)) continue;
    if (line.rfind("vocab=", 0) == 0) {
      bow.vocab = std::stoi(line.substr(6));
      continue;
    }
    std::istringstream is(line);
    long long id;
    if (!(is >> id) || id < 0) parse_fail(path, line_no, "bad node id");
    std::vector<std::pair<int, float>> entries;
    std::string tok;
    while (is >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) parse_fail(path, line_no, "expected word:count token");
      const int w = std::stoi(tok.substr(0, colon));
      const float c = std::stof(tok.substr(colon + 1));
      if (w < 0 || w >= bow.vocab) parse_fail(path, line_no, "word index out of range");
      entries.emplace_back(w, c);
    }
    max_id = std::max(max_id, id);
    rows.emplace_back(static_cast<int>(id), std::move(entries));
  }
  bow.rows.assign(max_id + 1, {});
  std::vector<char> seen(max_id + 1, 0);
  for (auto& [id, entries] : rows) {
    if (seen[id]) throw DataError(path + ": duplicate row for node " + std::to_string(id));
    seen[id] = 1;
    bow.rows[id] = std::move(entries);
  }
  for (long long v = 0; v <= max_id; ++v) {
    if (!seen[v]) throw DataError(path + ": missing row for node " + std::to_string(v));
  }
  return bow;
}

void save_bow(const BowMatrix& bow, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "vocab=" << bow.vocab << "\n";
  for (std::size_t v = 0; v < bow.rows.size(); ++v) {
    out << v;
    for (auto [w, c] : bow.rows[v]) out << "\t" << w << ":" << c;
    out << "\n";
  }
}

Split load_split(const std::string& path) {
  std::ifstream in = open_or_fail(path);
  Split s;
  std::vector<int>* section = nullptr;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_comment_or_blank(line)) continue;
    if (line == "[train]") {
      section = &s.train;
    } else if (line == "[validation]") {
      section = &s.validation;
    } else if (line == "[test]") {
      section = &s.test;
    } else if (line.rfind("seed=", 0) == 0) {
      s.seed = std::stoull(line.substr(5));
    } else {
      if (!section) parse_fail(path, line_no, "node id before any section header");
      std::istringstream is(line);
      long long id;
      std::string extra;
      if (!(is >> id) || (is >> extra) || id < 0) parse_fail(path, line_no, "bad node id");
      section->push_back(static_cast<int>(id));
    }
  }
  return s;
}

std::vector<Split> load_splits(const std::vector<std::string>& paths) {
  std::vector<Split> out;
  out.reserve(paths.size());
  for (const auto& p : paths) out.push_back(load_split(p));
  return out;
}

void save_split(const Split& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "seed=" << s.seed << "\n";
  out << "[train]\n";
  for (int v : s.train) out << v << "\n";
  out << "[validation]\n";
  for (int v : s.validation) out << v << "\n";
  out << "[test]\n";
  for (int v : s.test) out << v << "\n";
}

// ------------------------------------------------------------ transforms

FeatureMatrix project_features(const BowMatrix& bow, int d, std::uint64_t seed) {
  if (d <= 0) throw DataError("project_features: d must be positive");
  if (bow.vocab <= 0) throw DataError("project_features: empty vocabulary");
  // One Gaussian matrix (vocab x d) drawn with a fixed traversal order.
  SplitMix64 rng(derive_seed(seed, seed_domain::kProjection));
  std::vector<float> gauss(static_cast<std::size_t>(bow.vocab) * d);
  for (auto& g : gauss) g = static_cast<float>(rng.next_gauss());
  const int n = bow.num_nodes();
  FeatureMatrix out({n, d});
  for (int v = 0; v < n; ++v) {
    float* row = out.row(v);
    for (auto [w, c] : bow.rows[v]) {
      const float* grow = gauss.data() + static_cast<std::size_t>(w) * d;
      for (int j = 0; j < d; ++j) row[j] += c * grow[j];
    }
    double norm = 0.0;
    for (int j = 0; j < d; ++j) norm += static_cast<double>(row[j]) * row[j];
    norm = std::sqrt(norm);
    if (norm > 0.0) {
      for (int j = 0; j < d; ++j) row[j] = static_cast<float>(row[j] / norm);
    }
  }
  return out;
}

std::vector<Split> make_splits(const Graph& g, const LabelMap& labels, int repeats,
                               std::uint64_t seed) {
  constexpr int kTrainPerClass = 20;
  constexpr int kValSize = 1000;
  constexpr int kTestSize = 1000;

  const int num_classes = labels.num_classes();
  std::vector<std::vector<int>> per_class(num_classes);
  for (const auto& [id, cls] : labels.label_of) per_class[cls].push_back(id);
  for (int c = 0; c < num_classes; ++c) {
    if (static_cast<int>(per_class[c].size()) < kTrainPerClass) {
      throw DataError("make_splits: class '" + labels.class_names[c] + "' has only " +
                      std::to_string(per_class[c].size()) + " labeled nodes, need " +
                      std::to_string(kTrainPerClass));
    }
  }
  const std::int64_t labeled = static_cast<std::int64_t>(labels.label_of.size());
  const std::int64_t needed =
      static_cast<std::int64_t>(kTrainPerClass) * num_classes + kValSize + kTestSize;
  if (labeled < needed || g.num_nodes() < needed) {
    throw DataError("make_splits: need at least " + std::to_string(needed) +
                    " labeled nodes, have " + std::to_string(labeled));
  }

  std::vector<Split> splits;
  splits.reserve(repeats);
  for (int r = 0; r < repeats; ++r) {
    SplitMix64 rng(derive_seed(seed, seed_domain::kSplits, static_cast<std::uint64_t>(r)));
    Split s;
    s.seed = seed;
    std::vector<char> taken(g.num_nodes(), 0);
    for (int c = 0; c < num_classes; ++c) {
      auto picked = sample_without_replacement(per_class[c], kTrainPerClass, rng);
      for (int v : picked) {
        taken[v] = 1;
        s.train.push_back(v);
      }
    }
    std::vector<int> pool;
    pool.reserve(labeled);
    for (const auto& [id, cls] : labels.label_of) {
      if (!taken[id]) pool.push_back(id);
    }
    auto rest = sample_without_replacement(pool, kValSize + kTestSize, rng);
    s.validation.assign(rest.begin(), rest.begin() + kValSize);
    s.test.assign(rest.begin() + kValSize, rest.end());
    splits.push_back(std::move(s));
  }
  return splits;
}

}  // namespace sanne
