#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "mlstm/autodiff/tensor.hpp"
#include "mlstm/data/squad.hpp"

namespace mlstm::data {

/// Token -> column index. Index 0 is reserved for unknown tokens and always
/// maps to a zero embedding column.
class Vocabulary {
 public:
  static constexpr std::size_t kUnknown = 0;
  static constexpr const char* kUnknownToken = "<unk>";

  Vocabulary();
  explicit Vocabulary(const std::vector<std::string>& tokens);

  /// Every passage and question token, in first-appearance order.
  static Vocabulary from_examples(const std::vector<const std::vector<TokenizedExample>*>& sets);

  std::size_t add(const std::string& token);
  std::size_t index(const std::string& token) const;
  bool contains(const std::string& token) const { return map_.count(token) > 0; }
  const std::string& token(std::size_t i) const { return tokens_.at(i); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::size_t size() const { return tokens_.size(); }

  std::vector<std::size_t> encode(const std::vector<std::string>& tokens) const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> map_;
};

struct EmbeddingMatrix {
  Tensor table;  // d x |V|
  std::size_t found = 0;  // vocabulary entries filled from the file
  bool frozen = true;

  std::size_t dim() const { return table.rows(); }
};

/// Reads GloVe text vectors ("token v1 ... vd" per line). Lookup is
/// case-sensitive first with a lowercase fallback; tokens missing from the
/// file keep a zero column.
EmbeddingMatrix load_glove(const std::filesystem::path& path, const Vocabulary& vocab);

}  // namespace mlstm::data
