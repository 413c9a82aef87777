#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "mlstm/data/squad.hpp"

namespace mlstm::data {

/// 64-bit FNV-1a.
std::uint64_t content_hash(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

/// Tokenized examples stored as JSON under `dir`, keyed by a hash of the raw
/// dataset bytes, the load mode and the tokenizer version.
class PreprocessCache {
 public:
  explicit PreprocessCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  std::filesystem::path entry_path(std::uint64_t key) const;
  std::optional<std::vector<TokenizedExample>> load(std::uint64_t key) const;
  void store(std::uint64_t key, const std::vector<TokenizedExample>& examples) const;

 private:
  std::filesystem::path dir_;
};

/// load_squad_json + tokenize_examples, served from `cache_dir` when an entry
/// for the same file contents exists. An empty cache_dir disables caching.
std::vector<TokenizedExample> load_tokenized(const std::filesystem::path& squad_path, LoadMode mode,
                                             const std::filesystem::path& cache_dir,
                                             bool* cache_hit = nullptr);

}  // namespace mlstm::data
