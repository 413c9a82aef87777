#include "mlstm/data/tokenizer.hpp"

namespace mlstm::data {

Utf8Index Utf8Index::build(std::string_view text) {
  Utf8Index idx;
  idx.code_points.reserve(text.size());
  idx.byte_offsets.reserve(text.size() + 1);
  std::size_t i = 0;
  while (i < text.size()) {
    const auto b0 = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    char32_t cp = b0;
    if (b0 >= 0xF0 && b0 < 0xF8) {
      len = 4;
      cp = b0 & 0x07;
    } else if (b0 >= 0xE0) {
      len = b0 < 0xF0 ? 3 : 1;
      cp = b0 & 0x0F;
    } else if (b0 >= 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if (b0 >= 0x80) {
      len = 1;  // stray continuation byte
    }
    if (len > 1) {
      bool valid = i + len <= text.size();
      for (std::size_t k = 1; valid && k < len; ++k) {
        const auto b = static_cast<unsigned char>(text[i + k]);
        if ((b & 0xC0) != 0x80) valid = false;
        else cp = (cp << 6) | (b & 0x3F);
      }
      if (!valid) {
        len = 1;
        cp = 0xFFFD;
      }
    } else if (b0 >= 0x80) {
      cp = 0xFFFD;
    }
    idx.byte_offsets.push_back(i);
    idx.code_points.push_back(cp);
    i += len;
  }
  idx.byte_offsets.push_back(text.size());
  return idx;
}

bool is_unicode_space(char32_t c) {
  switch (c) {
    case U' ': case U'\t': case U'\n': case U'\v': case U'\f': case U'\r':
    case 0x1C: case 0x1D: case 0x1E: case 0x1F:
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

bool is_ascii_punctuation(char32_t c) {
  return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
         (c >= 0x7B && c <= 0x7E);
}

TokenizedText tokenize(std::string_view text) { return tokenize(text, Utf8Index::build(text)); }

TokenizedText tokenize(std::string_view text, const Utf8Index& index) {
  TokenizedText out;
  const std::size_t n = index.length();
  auto emit = [&](std::size_t b, std::size_t e) {
    const std::size_t bb = index.byte_offsets[b], be = index.byte_offsets[e];
    out.tokens.emplace_back(text.substr(bb, be - bb));
    out.spans.push_back({b, e});
  };

  std::size_t i = 0;
  while (i < n) {
    if (is_unicode_space(index.code_points[i])) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < n && !is_unicode_space(index.code_points[end])) ++end;

    std::size_t lo = i, hi = end;
    while (lo < hi && is_ascii_punctuation(index.code_points[lo])) {
      emit(lo, lo + 1);
      ++lo;
    }
    std::size_t trail = hi;
    while (trail > lo && is_ascii_punctuation(index.code_points[trail - 1])) --trail;
    if (lo < trail) emit(lo, trail);
    for (std::size_t k = trail; k < hi; ++k) emit(k, k + 1);
    i = end;
  }
  return out;
}

}  // namespace mlstm::data
