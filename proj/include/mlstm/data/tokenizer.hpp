#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mlstm::data {

/// Half-open [begin, end) range in Unicode code points. SQuAD character
/// offsets count code points, so every offset in this module does too.
struct CharSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool operator==(const CharSpan&) const = default;
};

/// Code-point view of a UTF-8 string: byte_offsets[i] is where code point i
/// starts; byte_offsets.back() == text.size().
struct Utf8Index {
  std::vector<char32_t> code_points;
  std::vector<std::size_t> byte_offsets;

  static Utf8Index build(std::string_view text);
  std::size_t length() const { return code_points.size(); }
};

struct TokenizedText {
  std::vector<std::string> tokens;
  std::vector<CharSpan> spans;
};

bool is_unicode_space(char32_t c);
bool is_ascii_punctuation(char32_t c);

/// Splits on whitespace, then peels leading and trailing ASCII punctuation
/// off each chunk as single-character tokens. Internal punctuation (hyphens,
/// apostrophes, decimal points) stays inside the word. Total: invalid UTF-8
/// bytes are treated as opaque single code points.
TokenizedText tokenize(std::string_view text);
TokenizedText tokenize(std::string_view text, const Utf8Index& index);

}  // namespace mlstm::data
