#include "lglat/batching.hpp"

#include <algorithm>
#include <stdexcept>

#include "lglat/rng.hpp"

namespace lglat {

std::vector<int> Batch::src_row(size_t i) const {
  std::vector<int> out;
  for (size_t t = 0; t < src_ids[i].size(); ++t)
    if (src_mask[i][t]) out.push_back(src_ids[i][t]);
  return out;
}

std::vector<int> Batch::tgt_row(size_t i) const {
  std::vector<int> out;
  for (size_t t = 0; t < tgt_ids[i].size(); ++t)
    if (tgt_mask[i][t]) out.push_back(tgt_ids[i][t]);
  return out;
}

namespace {

Batch make_batch(const ParallelCorpus& corpus, const std::vector<size_t>& indices) {
  size_t max_src = 0, max_tgt = 0;
  for (size_t idx : indices) {
    max_src = std::max(max_src, corpus.pairs[idx].src.size());
    max_tgt = std::max(max_tgt, corpus.pairs[idx].tgt.size());
  }
  Batch b;
  b.pair_indices = indices;
  for (size_t idx : indices) {
    const auto& pair = corpus.pairs[idx];
    std::vector<int> src(max_src, Vocab::kPad), tgt(max_tgt, Vocab::kPad);
    std::vector<uint8_t> sm(max_src, 0), tm(max_tgt, 0);
    std::copy(pair.src.begin(), pair.src.end(), src.begin());
    std::copy(pair.tgt.begin(), pair.tgt.end(), tgt.begin());
    std::fill(sm.begin(), sm.begin() + static_cast<long>(pair.src.size()), 1);
    std::fill(tm.begin(), tm.begin() + static_cast<long>(pair.tgt.size()), 1);
    b.src_ids.push_back(std::move(src));
    b.tgt_ids.push_back(std::move(tgt));
    b.src_mask.push_back(std::move(sm));
    b.tgt_mask.push_back(std::move(tm));
  }
  return b;
}

}  // namespace

std::vector<Batch> batch_iter(const ParallelCorpus& corpus, int max_tokens, uint64_t seed,
                              int epoch) {
  size_t longest = 0;
  for (const auto& pair : corpus.pairs) longest = std::max(longest, pair.tgt.size());
  if (static_cast<size_t>(max_tokens) < longest)
    throw std::invalid_argument("max_tokens " + std::to_string(max_tokens) +
                                " smaller than longest target length " + std::to_string(longest));

  std::vector<size_t> order(corpus.pairs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng = Rng(seed).substream("batch").at(static_cast<uint64_t>(epoch));
  for (size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng.uniform_int(i)]);

  std::vector<Batch> batches;
  std::vector<size_t> current;
  int used = 0;
  for (size_t idx : order) {
    int need = static_cast<int>(corpus.pairs[idx].tgt.size());
    if (!current.empty() && used + need > max_tokens) {
      batches.push_back(make_batch(corpus, current));
      current.clear();
      used = 0;
    }
    current.push_back(idx);
    used += need;
  }
  if (!current.empty()) batches.push_back(make_batch(corpus, current));
  return batches;
}

}  // namespace lglat
