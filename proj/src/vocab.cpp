#include "lglat/vocab.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace lglat {

Vocab::Vocab() {
  push("<pad>");
  push("<bos>");
  push("<eos>");
  push("<unk>");
}

void Vocab::push(const std::string& token) {
  index_.emplace(token, static_cast<int>(tokens_.size()));
  tokens_.push_back(token);
}

Vocab Vocab::build(const std::vector<std::vector<std::string>>& sentences) {
  std::map<std::string, long long> freq;  // ordered map fixes tie order
  for (const auto& sent : sentences)
    for (const auto& tok : sent) ++freq[tok];

  std::vector<std::pair<std::string, long long>> items(freq.begin(), freq.end());
  std::stable_sort(items.begin(), items.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  Vocab v;
  for (const auto& [tok, n] : items) {
    (void)n;
    if (v.index_.count(tok) == 0) v.push(tok);
  }
  return v;
}

Vocab Vocab::from_tokens(const std::vector<std::string>& tokens) {
  Vocab v;
  for (const auto& tok : tokens)
    if (v.index_.count(tok) == 0) v.push(tok);
  return v;
}

int Vocab::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnk : it->second;
}

const std::string& Vocab::token(int id) const {
  if (id < 0 || id >= size()) throw std::out_of_range("token id " + std::to_string(id) + " out of range");
  return tokens_[static_cast<size_t>(id)];
}

std::vector<int> Vocab::encode(const std::vector<std::string>& tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& tok : tokens) ids.push_back(id(tok));
  return ids;
}

std::vector<std::string> Vocab::decode(const std::vector<int>& ids) const {
  std::vector<std::string> tokens;
  tokens.reserve(ids.size());
  for (int i : ids) tokens.push_back(token(i));
  return tokens;
}

}  // namespace lglat
