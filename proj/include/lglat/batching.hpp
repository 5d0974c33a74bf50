#pragma once

#include <cstdint>
#include <vector>

#include "lglat/corpus.hpp"

namespace lglat {

// Rows padded with Vocab::kPad to the batch-wide maxima; masks mark real tokens.
struct Batch {
  std::vector<std::vector<int>> src_ids;
  std::vector<std::vector<int>> tgt_ids;
  std::vector<std::vector<uint8_t>> src_mask;
  std::vector<std::vector<uint8_t>> tgt_mask;
  std::vector<size_t> pair_indices;

  size_t rows() const { return src_ids.size(); }
  std::vector<int> src_row(size_t i) const;  // unpadded
  std::vector<int> tgt_row(size_t i) const;  // unpadded
};

// Token-budget batching: shuffle order is a pure function of (seed, epoch),
// each batch holds at most max_tokens raw target tokens.
std::vector<Batch> batch_iter(const ParallelCorpus& corpus, int max_tokens, uint64_t seed,
                              int epoch);

}  // namespace lglat
