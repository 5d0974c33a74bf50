#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lglat/vocab.hpp"

namespace lglat {

struct SentencePair {
  std::vector<int> src;
  std::vector<int> tgt;
};

struct ParallelCorpus {
  std::vector<SentencePair> pairs;
  Vocab src_vocab;
  Vocab tgt_vocab;
  std::string name;

  size_t size() const { return pairs.size(); }
};

// Whitespace-tokenized UTF-8 files, one sentence per line, equal line counts.
// Vocabularies are built from the data unless supplied. Sequences longer than
// max_len are rejected.
ParallelCorpus load_parallel_corpus(const std::string& src_path, const std::string& tgt_path,
                                    const std::optional<std::pair<Vocab, Vocab>>& vocabs = std::nullopt,
                                    int max_len = 64, const std::string& name = "corpus");

void write_corpus_files(const ParallelCorpus& corpus, const std::string& src_path,
                        const std::string& tgt_path);

struct SyntheticSpec {
  int num_symbols = 40;
  int modes = 2;  // M: realizations per symbol
  int realization_len_min = 1;
  int realization_len_max = 2;
  int sentence_len_min = 4;
  int sentence_len_max = 12;
  int size = 10000;
  uint64_t seed = 1;
};

// (symbol, mode) -> target token strings; the generating map the oracles use
struct ModeMap {
  int modes = 0;
  std::vector<std::vector<std::vector<std::string>>> realizations;  // [symbol][mode]

  void build_index();
  // mode tag of a target token, or -1 when unrecognized
  int token_mode(const std::string& token) const;
  // renders the source symbol sequence in mode k
  std::vector<std::string> render(const std::vector<int>& symbols, int mode) const;

 private:
  std::unordered_map<std::string, std::pair<int, int>> index_;  // token -> (symbol, mode)
};

struct SyntheticCorpus {
  ParallelCorpus corpus;
  SyntheticSpec spec;
  ModeMap mode_map;
  std::vector<int> pair_modes;            // sampled mode per sentence
  std::vector<std::vector<int>> symbols;  // sampled symbol indices per sentence
};

// Each sentence draws one global mode and renders every symbol with it.
// Deterministic in the spec: sentence i depends only on (seed, i).
SyntheticCorpus gen_synthetic_multimodal(const SyntheticSpec& spec);

// pair range [from, to) with shared vocabularies and mode map
SyntheticCorpus synthetic_slice(const SyntheticCorpus& synth, size_t from, size_t to);

// src/tgt text plus a JSON sidecar carrying the spec, realizations and modes
void write_synthetic(const SyntheticCorpus& synth, const std::string& out_dir);
SyntheticCorpus load_synthetic(const std::string& out_dir);

std::string synthetic_sidecar_json(const SyntheticCorpus& synth);

}  // namespace lglat
