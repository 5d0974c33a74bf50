#include "lglat/corpus.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "lglat/rng.hpp"

namespace lglat {

namespace {

constexpr int kSyntheticVocabBudget = 4096;

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream in(line);
  std::string t;
  while (in >> t) toks.push_back(t);
  return toks;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

ParallelCorpus load_parallel_corpus(const std::string& src_path, const std::string& tgt_path,
                                    const std::optional<std::pair<Vocab, Vocab>>& vocabs,
                                    int max_len, const std::string& name) {
  auto src_lines = read_lines(src_path);
  auto tgt_lines = read_lines(tgt_path);
  if (src_lines.size() != tgt_lines.size()) {
    throw std::runtime_error("line count " + std::to_string(src_lines.size()) + " ≠ " +
                             std::to_string(tgt_lines.size()));
  }

  std::vector<std::vector<std::string>> src_toks(src_lines.size()), tgt_toks(tgt_lines.size());
  for (size_t i = 0; i < src_lines.size(); ++i) {
    src_toks[i] = split_ws(src_lines[i]);
    tgt_toks[i] = split_ws(tgt_lines[i]);
    if (src_toks[i].empty())
      throw std::runtime_error("empty source line " + std::to_string(i + 1) + " in " + src_path);
    if (tgt_toks[i].empty())
      throw std::runtime_error("empty target line " + std::to_string(i + 1) + " in " + tgt_path);
    if (static_cast<int>(src_toks[i].size()) > max_len ||
        static_cast<int>(tgt_toks[i].size()) > max_len)
      throw std::runtime_error("line " + std::to_string(i + 1) + " exceeds max_len " +
                               std::to_string(max_len));
  }

  ParallelCorpus corpus;
  corpus.name = name;
  if (vocabs) {
    corpus.src_vocab = vocabs->first;
    corpus.tgt_vocab = vocabs->second;
  } else {
    corpus.src_vocab = Vocab::build(src_toks);
    corpus.tgt_vocab = Vocab::build(tgt_toks);
  }
  corpus.pairs.reserve(src_lines.size());
  for (size_t i = 0; i < src_lines.size(); ++i)
    corpus.pairs.push_back({corpus.src_vocab.encode(src_toks[i]), corpus.tgt_vocab.encode(tgt_toks[i])});
  return corpus;
}

void write_corpus_files(const ParallelCorpus& corpus, const std::string& src_path,
                        const std::string& tgt_path) {
  std::ofstream src(src_path, std::ios::binary), tgt(tgt_path, std::ios::binary);
  if (!src || !tgt) throw std::runtime_error("cannot write corpus files");
  for (const auto& pair : corpus.pairs) {
    auto s = corpus.src_vocab.decode(pair.src);
    auto t = corpus.tgt_vocab.decode(pair.tgt);
    for (size_t i = 0; i < s.size(); ++i) src << (i ? " " : "") << s[i];
    src << "\n";
    for (size_t i = 0; i < t.size(); ++i) tgt << (i ? " " : "") << t[i];
    tgt << "\n";
  }
}

int ModeMap::token_mode(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? -1 : it->second.second;
}

void ModeMap::build_index() {
  index_.clear();
  for (size_t s = 0; s < realizations.size(); ++s)
    for (size_t k = 0; k < realizations[s].size(); ++k)
      for (const auto& tok : realizations[s][k])
        index_.emplace(tok, std::make_pair(static_cast<int>(s), static_cast<int>(k)));
}

std::vector<std::string> ModeMap::render(const std::vector<int>& symbols, int mode) const {
  std::vector<std::string> out;
  for (int s : symbols) {
    const auto& toks = realizations.at(static_cast<size_t>(s)).at(static_cast<size_t>(mode));
    out.insert(out.end(), toks.begin(), toks.end());
  }
  return out;
}

SyntheticCorpus gen_synthetic_multimodal(const SyntheticSpec& spec) {
  if (spec.modes < 1) throw std::invalid_argument("modes must be >= 1");
  if (spec.num_symbols < 1) throw std::invalid_argument("num_symbols must be >= 1");
  if (spec.realization_len_min < 1 || spec.realization_len_max < spec.realization_len_min)
    throw std::invalid_argument("bad realization_len range");
  if (spec.sentence_len_min < 1 || spec.sentence_len_max < spec.sentence_len_min)
    throw std::invalid_argument("bad sentence_len range");
  long long budget_need =
      static_cast<long long>(spec.num_symbols) * spec.modes * spec.realization_len_max + 4;
  if (budget_need > kSyntheticVocabBudget)
    throw std::invalid_argument("num_symbols x modes exceeds target vocab budget (" +
                                std::to_string(budget_need) + " > " +
                                std::to_string(kSyntheticVocabBudget) + ")");

  SyntheticCorpus out;
  out.spec = spec;
  Rng root(spec.seed);

  // realization tokens are unique per (symbol, mode, position)
  Rng real_rng = root.substream("real");
  out.mode_map.modes = spec.modes;
  out.mode_map.realizations.resize(static_cast<size_t>(spec.num_symbols));
  for (int s = 0; s < spec.num_symbols; ++s) {
    out.mode_map.realizations[static_cast<size_t>(s)].resize(static_cast<size_t>(spec.modes));
    for (int k = 0; k < spec.modes; ++k) {
      Rng r = real_rng.at(static_cast<uint64_t>(s) * static_cast<uint64_t>(spec.modes) +
                          static_cast<uint64_t>(k));
      int len = spec.realization_len_min +
                static_cast<int>(r.uniform_int(
                    static_cast<uint64_t>(spec.realization_len_max - spec.realization_len_min + 1)));
      std::vector<std::string> toks;
      for (int p = 0; p < len; ++p) {
        std::string tok = "y" + std::to_string(s) + "m" + std::to_string(k);
        if (p > 0) tok += std::string(1, static_cast<char>('b' + p - 1));
        toks.push_back(tok);
      }
      out.mode_map.realizations[static_cast<size_t>(s)][static_cast<size_t>(k)] = std::move(toks);
    }
  }
  out.mode_map.build_index();

  std::vector<std::string> src_tokens, tgt_tokens;
  for (int s = 0; s < spec.num_symbols; ++s) src_tokens.push_back("s" + std::to_string(s));
  for (const auto& per_symbol : out.mode_map.realizations)
    for (const auto& toks : per_symbol)
      for (const auto& tok : toks) tgt_tokens.push_back(tok);

  out.corpus.name = "synthetic";
  out.corpus.src_vocab = Vocab::from_tokens(src_tokens);
  out.corpus.tgt_vocab = Vocab::from_tokens(tgt_tokens);

  // sentence i is a pure function of (seed, i)
  Rng sent_rng = root.substream("sent");
  out.pair_modes.reserve(static_cast<size_t>(spec.size));
  for (int i = 0; i < spec.size; ++i) {
    Rng r = sent_rng.at(static_cast<uint64_t>(i));
    int len = spec.sentence_len_min +
              static_cast<int>(r.uniform_int(
                  static_cast<uint64_t>(spec.sentence_len_max - spec.sentence_len_min + 1)));
    int mode = static_cast<int>(r.uniform_int(static_cast<uint64_t>(spec.modes)));
    std::vector<int> symbols(static_cast<size_t>(len));
    for (int t = 0; t < len; ++t)
      symbols[static_cast<size_t>(t)] =
          static_cast<int>(r.uniform_int(static_cast<uint64_t>(spec.num_symbols)));

    std::vector<std::string> src;
    for (int s : symbols) src.push_back("s" + std::to_string(s));
    auto tgt = out.mode_map.render(symbols, mode);

    out.corpus.pairs.push_back(
        {out.corpus.src_vocab.encode(src), out.corpus.tgt_vocab.encode(tgt)});
    out.pair_modes.push_back(mode);
    out.symbols.push_back(std::move(symbols));
  }
  return out;
}

SyntheticCorpus synthetic_slice(const SyntheticCorpus& synth, size_t from, size_t to) {
  if (from > to || to > synth.corpus.pairs.size()) throw std::invalid_argument("bad slice range");
  SyntheticCorpus part = synth;
  part.corpus.pairs.assign(synth.corpus.pairs.begin() + static_cast<long>(from),
                           synth.corpus.pairs.begin() + static_cast<long>(to));
  part.pair_modes.assign(synth.pair_modes.begin() + static_cast<long>(from),
                         synth.pair_modes.begin() + static_cast<long>(to));
  part.symbols.assign(synth.symbols.begin() + static_cast<long>(from),
                      synth.symbols.begin() + static_cast<long>(to));
  part.spec.size = static_cast<int>(to - from);
  return part;
}

std::string synthetic_sidecar_json(const SyntheticCorpus& synth) {
  nlohmann::json j;
  j["spec"] = {{"num_symbols", synth.spec.num_symbols},
               {"modes", synth.spec.modes},
               {"realization_len_min", synth.spec.realization_len_min},
               {"realization_len_max", synth.spec.realization_len_max},
               {"sentence_len_min", synth.spec.sentence_len_min},
               {"sentence_len_max", synth.spec.sentence_len_max},
               {"size", synth.spec.size},
               {"seed", synth.spec.seed}};
  j["realizations"] = synth.mode_map.realizations;
  j["pair_modes"] = synth.pair_modes;
  return j.dump(2);
}

void write_synthetic(const SyntheticCorpus& synth, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_corpus_files(synth.corpus, out_dir + "/src.txt", out_dir + "/tgt.txt");
  std::ofstream side(out_dir + "/synthetic.json", std::ios::binary);
  if (!side) throw std::runtime_error("cannot write " + out_dir + "/synthetic.json");
  side << synthetic_sidecar_json(synth) << "\n";
}

SyntheticCorpus load_synthetic(const std::string& out_dir) {
  std::ifstream side(out_dir + "/synthetic.json", std::ios::binary);
  if (!side) throw std::runtime_error("cannot open " + out_dir + "/synthetic.json");
  nlohmann::json j = nlohmann::json::parse(side);

  SyntheticCorpus out;
  out.spec.num_symbols = j["spec"]["num_symbols"];
  out.spec.modes = j["spec"]["modes"];
  out.spec.realization_len_min = j["spec"]["realization_len_min"];
  out.spec.realization_len_max = j["spec"]["realization_len_max"];
  out.spec.sentence_len_min = j["spec"]["sentence_len_min"];
  out.spec.sentence_len_max = j["spec"]["sentence_len_max"];
  out.spec.size = j["spec"]["size"];
  out.spec.seed = j["spec"]["seed"];
  out.mode_map.modes = out.spec.modes;
  out.mode_map.realizations = j["realizations"].get<std::vector<std::vector<std::vector<std::string>>>>();
  out.mode_map.build_index();
  out.pair_modes = j["pair_modes"].get<std::vector<int>>();

  std::vector<std::string> src_tokens, tgt_tokens;
  for (int s = 0; s < out.spec.num_symbols; ++s) src_tokens.push_back("s" + std::to_string(s));
  for (const auto& per_symbol : out.mode_map.realizations)
    for (const auto& toks : per_symbol)
      for (const auto& tok : toks) tgt_tokens.push_back(tok);
  auto vocabs = std::make_pair(Vocab::from_tokens(src_tokens), Vocab::from_tokens(tgt_tokens));
  out.corpus = load_parallel_corpus(out_dir + "/src.txt", out_dir + "/tgt.txt", vocabs, 1 << 20,
                                    "synthetic");
  return out;
}

}  // namespace lglat
