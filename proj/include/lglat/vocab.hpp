#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lglat {

// Token inventory with four reserved slots. IDs 0..3 are never assigned to
// corpus tokens; out-of-vocabulary text encodes to kUnk.
class Vocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;
  static constexpr int kUnk = 3;

  Vocab();

  // Builds from tokenized sentences: descending frequency, ties broken by
  // lexicographic token order.
  static Vocab build(const std::vector<std::vector<std::string>>& sentences);
  // Builds from an explicit token list (reserved tokens prepended).
  static Vocab from_tokens(const std::vector<std::string>& tokens);

  int id(std::string_view token) const;
  const std::string& token(int id) const;
  int size() const { return static_cast<int>(tokens_.size()); }

  std::vector<int> encode(const std::vector<std::string>& tokens) const;
  std::vector<std::string> decode(const std::vector<int>& ids) const;

  const std::vector<std::string>& tokens() const { return tokens_; }

  bool operator==(const Vocab& other) const { return tokens_ == other.tokens_; }

 private:
  void push(const std::string& token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace lglat
