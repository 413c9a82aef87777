#include "mlstm/data/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <unordered_set>

namespace mlstm::data {
namespace {

std::string ascii_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
    return static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
  });
  return s;
}

}  // namespace

Vocabulary::Vocabulary() { add(kUnknownToken); }

Vocabulary::Vocabulary(const std::vector<std::string>& tokens) {
  if (tokens.empty() || tokens.front() != kUnknownToken) add(kUnknownToken);
  for (const auto& t : tokens) add(t);
}

Vocabulary Vocabulary::from_examples(const std::vector<const std::vector<TokenizedExample>*>& sets) {
  Vocabulary vocab;
  std::unordered_set<const TokenizedPassage*> seen;
  for (const auto* set : sets) {
    for (const TokenizedExample& ex : *set) {
      if (seen.insert(ex.passage.get()).second) {
        for (const auto& t : ex.passage->tokens.tokens) vocab.add(t);
      }
      for (const auto& t : ex.question_tokens.tokens) vocab.add(t);
    }
  }
  return vocab;
}

std::size_t Vocabulary::add(const std::string& token) {
  auto [it, inserted] = map_.emplace(token, tokens_.size());
  if (inserted) tokens_.push_back(token);
  return it->second;
}

std::size_t Vocabulary::index(const std::string& token) const {
  auto it = map_.find(token);
  return it == map_.end() ? kUnknown : it->second;
}

std::vector<std::size_t> Vocabulary::encode(const std::vector<std::string>& tokens) const {
  std::vector<std::size_t> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(index(t));
  return out;
}

EmbeddingMatrix load_glove(const std::filesystem::path& path, const Vocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open GloVe file " + path.string());

  // Lowercased vocabulary entries, used when the exact-case token is absent.
  std::unordered_map<std::string, std::vector<std::size_t>> by_lower;
  for (std::size_t i = 1; i < vocab.size(); ++i) by_lower[ascii_lower(vocab.token(i))].push_back(i);

  std::vector<std::vector<Real>> columns(vocab.size());
  std::vector<bool> exact(vocab.size(), false);
  std::size_t dim = 0;
  std::string line;
  std::size_t line_no = 0;
  std::vector<Real> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t sp = line.find(' ');
    if (sp == std::string::npos || sp == 0) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": no vector values");
    }
    const std::string token = line.substr(0, sp);

    values.clear();
    const char* p = line.data() + sp;
    const char* end = line.data() + line.size();
    while (p < end) {
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      double v = 0;
      auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc() || (next < end && *next != ' ')) {
        throw DataError(path.string() + ":" + std::to_string(line_no) +
                        ": unparseable float in vector for '" + token + "'");
      }
      values.push_back(static_cast<Real>(v));
      p = next;
    }
    if (dim == 0) dim = values.size();
    if (values.size() != dim) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": dimension " +
                      std::to_string(values.size()) + " differs from " + std::to_string(dim));
    }

    const std::size_t idx = vocab.index(token);
    if (idx != Vocabulary::kUnknown && token != Vocabulary::kUnknownToken) {
      columns[idx] = values;
      exact[idx] = true;
    }
    if (auto it = by_lower.find(token); it != by_lower.end()) {
      for (std::size_t j : it->second) {
        if (!exact[j] && columns[j].empty()) columns[j] = values;
      }
    }
  }
  if (dim == 0) throw DataError("GloVe file " + path.string() + " contains no vectors");

  EmbeddingMatrix out;
  out.table = Tensor(dim, vocab.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].empty()) continue;
    ++out.found;
    for (std::size_t r = 0; r < dim; ++r) out.table(r, j) = columns[j][r];
  }
  return out;
}

}  // namespace mlstm::data
