#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "mlstm/data/tokenizer.hpp"

namespace mlstm::data {

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class LoadMode {
  kTraining,    // every question must carry at least one answer
  kEvaluation,  // questions without answers are kept (scored against nothing)
};

struct GoldAnswer {
  std::string text;
  std::size_t answer_start = 0;  // code-point offset into the passage
};

struct RawExample {
  std::shared_ptr<const std::string> passage;  // shared by the paragraph's questions
  std::string question;
  std::string id;
  std::vector<GoldAnswer> answers;
};

/// Reads SQuAD v1.1: data[].paragraphs[].{context, qas[].{id, question,
/// answers[].{text, answer_start}}}. Errors name the offending JSON path.
std::vector<RawExample> load_squad_json(const std::filesystem::path& path, LoadMode mode);
std::vector<RawExample> parse_squad_json(const nlohmann::json& doc, LoadMode mode);

/// Inclusive token indices, 0-based.
struct TokenSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::size_t length() const { return end - start + 1; }
  bool operator==(const TokenSpan&) const = default;
};

struct TokenizedPassage {
  std::string text;
  Utf8Index index;
  TokenizedText tokens;

  static std::shared_ptr<const TokenizedPassage> build(std::string text);
  std::size_t size() const { return tokens.tokens.size(); }
  /// Original passage text from the start of token `span.start` to the end
  /// of token `span.end`.
  std::string span_text(TokenSpan span) const;
  std::string char_substring(std::size_t begin, std::size_t end) const;
};

/// Minimal token span covering [answer_start, answer_start + |answer|) in code
/// points, or nullopt when no token intersects that range.
std::optional<TokenSpan> covering_span(const TokenizedPassage& passage,
                                       std::size_t answer_start, std::size_t answer_length);

/// covering_span() plus the recoverability check: the span's original text
/// must contain `answer_text`. nullopt means alignment failure.
std::optional<TokenSpan> align_answer_span(const TokenizedPassage& passage,
                                           const std::string& answer_text,
                                           std::size_t answer_start);

struct TokenizedExample {
  std::shared_ptr<const TokenizedPassage> passage;
  std::string id;
  std::string question;
  TokenizedText question_tokens;
  std::vector<std::string> gold_texts;
  /// Aligned spans, one per gold answer that could be placed (best effort in
  /// evaluation mode). gold_spans.front() is the training target.
  std::vector<TokenSpan> gold_spans;
};

struct TokenizeStats {
  std::size_t total = 0;
  std::size_t dropped = 0;  // training examples whose first answer failed to align
};

/// Tokenizes passages once per paragraph. In training mode examples whose
/// first gold answer cannot be aligned are dropped and counted.
std::vector<TokenizedExample> tokenize_examples(const std::vector<RawExample>& raw, LoadMode mode,
                                                TokenizeStats* stats = nullptr);

std::size_t code_point_length(std::string_view text);

}  // namespace mlstm::data
