#pragma once

#include <cstdint>
#include <vector>

#include "sanne/rng.hpp"
#include "sanne/tape.hpp"
#include "sanne/tensor.hpp"
#include "sanne/walks.hpp"

namespace sanne {

// Denominator node ids for the sampled softmax. Unique, and guaranteed to
// contain every target of the batch it was sampled for.
struct CandidateSet {
  std::vector<int> ids;
  int size() const { return static_cast<int>(ids.size()); }
};

// Uniform sample of `size` ids without replacement from `present`, then the
// batch's target ids are unioned in so every numerator term also scores in
// its own denominator.
CandidateSet sample_candidates(const std::vector<int>& present, int size,
                               const std::vector<int>& targets, SplitMix64& rng);

template <typename T>
struct SampledLossIds {
  typename TapeT<T>::Id loss = -1;    // scalar, mean over walks
  typename TapeT<T>::Id logits = -1;  // [positions, |candidates|]
};

// Builds the sampled-softmax neighbor-prediction loss on the tape:
//   loss = (1/B) * sum_p ( M_p * logsumexp(logits_p) - sum_{t in C_p} logits_p[t] )
// `encoded` is [P, d] with P = B*N positions; neighbor_sets has one entry
// per position. Throws if any target is missing from the candidate set.
template <typename T>
SampledLossIds<T> sampled_softmax_loss_on_tape(TapeT<T>& tape, typename TapeT<T>::Id encoded,
                                               const std::vector<NeighborSet>& neighbor_sets,
                                               typename TapeT<T>::Id out_embed,
                                               const CandidateSet& cands, int num_walks) {
  using Id = typename TapeT<T>::Id;
  const auto& u = tape.val(encoded);
  if (u.rank() != 2) throw ShapeError("sampled_softmax_loss: encoded must be 2-D");
  const std::int64_t positions = u.shape[0];
  if (static_cast<std::int64_t>(neighbor_sets.size()) != positions) {
    throw ShapeError("sampled_softmax_loss: one NeighborSet per position required");
  }
  const int num_cands = cands.size();
  std::vector<int> col_of(tape.val(out_embed).shape[0], -1);
  for (int c = 0; c < num_cands; ++c) col_of[cands.ids[c]] = c;

  std::vector<std::int64_t> target_cells;
  TensorT<T> weights({static_cast<int>(positions), 1});
  for (std::int64_t p = 0; p < positions; ++p) {
    weights.data[p] = static_cast<T>(neighbor_sets[p].members.size());
    for (int t : neighbor_sets[p].members) {
      if (t < 0 || t >= static_cast<int>(col_of.size()) || col_of[t] < 0) {
        throw DataError("sampled_softmax_loss: target " + std::to_string(t) +
                        " absent from candidate set");
      }
      target_cells.push_back(p * num_cands + col_of[t]);
    }
  }

  SampledLossIds<T> out;
  const Id gathered = tape.row_gather(out_embed, cands.ids);          // [C, d]
  out.logits = tape.matmul(encoded, tape.transpose(gathered));       // [P, C]
  const Id lse = tape.logsumexp_rows(out.logits);                    // [P, 1]
  const Id weighted = tape.sum_all(tape.mul(lse, tape.leaf(std::move(weights))));
  const Id numer = tape.pick_sum(out.logits, std::move(target_cells));
  out.loss = tape.scale(tape.add(weighted, tape.scale(numer, -1.0)), 1.0 / num_walks);
  return out;
}

// Brute-force oracle: the same quantity with the candidate set fixed to all
// present nodes, computed by straight-line double loops independent of the
// tape. Used to cross-check the sampled path.
double full_softmax_loss(const Tensor64& encoded, const std::vector<NeighborSet>& neighbor_sets,
                         const Tensor64& out_embed, const std::vector<int>& present,
                         int num_walks);

}  // namespace sanne
