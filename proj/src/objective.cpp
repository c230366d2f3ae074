#include "sanne/objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sanne {

CandidateSet sample_candidates(const std::vector<int>& present, int size,
                               const std::vector<int>& targets, SplitMix64& rng) {
  if (size > static_cast<int>(present.size())) {
    throw std::invalid_argument("sample_candidates: size " + std::to_string(size) +
                                " exceeds present node count " +
                                std::to_string(present.size()));
  }
  CandidateSet cs;
  cs.ids = sample_without_replacement(present, static_cast<std::size_t>(size), rng);
  int max_id = 0;
  for (int v : present) max_id = std::max(max_id, v);
  for (int v : targets) max_id = std::max(max_id, v);
  std::vector<char> in_set(max_id + 1, 0);
  for (int v : cs.ids) in_set[v] = 1;
  for (int t : targets) {
    if (!in_set[t]) {
      in_set[t] = 1;
      cs.ids.push_back(t);
    }
  }
  return cs;
}

double full_softmax_loss(const Tensor64& encoded, const std::vector<NeighborSet>& neighbor_sets,
                         const Tensor64& out_embed, const std::vector<int>& present,
                         int num_walks) {
  const std::int64_t positions = encoded.shape[0];
  const int d = encoded.shape[1];
  if (static_cast<std::int64_t>(neighbor_sets.size()) != positions) {
    throw std::invalid_argument("full_softmax_loss: one NeighborSet per position required");
  }
  double loss = 0.0;
  std::vector<double> scores(present.size());
  for (std::int64_t p = 0; p < positions; ++p) {
    const double* u = encoded.row(p);
    double mx = -1e300;
    for (std::size_t c = 0; c < present.size(); ++c) {
      const double* o = out_embed.row(present[c]);
      double dot = 0.0;
      for (int j = 0; j < d; ++j) dot += o[j] * u[j];
      scores[c] = dot;
      mx = std::max(mx, dot);
    }
    double sum = 0.0;
    for (double sc : scores) sum += std::exp(sc - mx);
    const double lse = mx + std::log(sum);
    for (int t : neighbor_sets[p].members) {
      const double* o = out_embed.row(t);
      double dot = 0.0;
      for (int j = 0; j < d; ++j) dot += o[j] * u[j];
      loss += lse - dot;
    }
  }
  return loss / num_walks;
}

}  // namespace sanne
