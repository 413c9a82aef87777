#include "mlstm/data/squad.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace mlstm::data {
namespace {

using nlohmann::json;

const json& field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw DataError("expected an object at " + path);
  auto it = obj.find(key);
  if (it == obj.end()) throw DataError("missing required field " + path + "." + key);
  return *it;
}

const json& array_field(const json& obj, const char* key, const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_array()) throw DataError(path + "." + key + " is not an array");
  return v;
}

std::string string_field(const json& obj, const char* key, const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_string()) throw DataError(path + "." + key + " is not a string");
  return v.get<std::string>();
}

}  // namespace

std::size_t code_point_length(std::string_view text) {
  std::size_t n = 0;
  for (char c : text) {
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::vector<RawExample> parse_squad_json(const json& doc, LoadMode mode) {
  std::vector<RawExample> out;
  const json& data = array_field(doc, "data", "$");
  for (std::size_t a = 0; a < data.size(); ++a) {
    const std::string apath = "data[" + std::to_string(a) + "]";
    const json& paragraphs = array_field(data[a], "paragraphs", apath);
    for (std::size_t p = 0; p < paragraphs.size(); ++p) {
      const std::string ppath = apath + ".paragraphs[" + std::to_string(p) + "]";
      auto context = std::make_shared<const std::string>(string_field(paragraphs[p], "context", ppath));
      const json& qas = array_field(paragraphs[p], "qas", ppath);
      for (std::size_t q = 0; q < qas.size(); ++q) {
        const std::string qpath = ppath + ".qas[" + std::to_string(q) + "]";
        RawExample ex;
        ex.passage = context;
        ex.id = string_field(qas[q], "id", qpath);
        ex.question = string_field(qas[q], "question", qpath);
        const json& answers = array_field(qas[q], "answers", qpath);
        if (answers.empty() && mode == LoadMode::kTraining) {
          throw DataError(qpath + ".answers is empty; training data needs at least one answer");
        }
        for (std::size_t k = 0; k < answers.size(); ++k) {
          const std::string kpath = qpath + ".answers[" + std::to_string(k) + "]";
          GoldAnswer ans;
          ans.text = string_field(answers[k], "text", kpath);
          const json& start = field(answers[k], "answer_start", kpath);
          if (!start.is_number_integer() || start.get<long long>() < 0) {
            throw DataError(kpath + ".answer_start is not a non-negative integer");
          }
          ans.answer_start = start.get<std::size_t>();
          ex.answers.push_back(std::move(ans));
        }
        out.push_back(std::move(ex));
      }
    }
  }
  return out;
}

std::vector<RawExample> load_squad_json(const std::filesystem::path& path, LoadMode mode) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError("malformed JSON in " + path.string() + ": " + e.what());
  }
  return parse_squad_json(doc, mode);
}

std::shared_ptr<const TokenizedPassage> TokenizedPassage::build(std::string text) {
  auto p = std::make_shared<TokenizedPassage>();
  p->text = std::move(text);
  p->index = Utf8Index::build(p->text);
  p->tokens = tokenize(p->text, p->index);
  return p;
}

std::string TokenizedPassage::char_substring(std::size_t begin, std::size_t end) const {
  const std::size_t b = index.byte_offsets.at(begin);
  const std::size_t e = index.byte_offsets.at(end);
  return text.substr(b, e - b);
}

std::string TokenizedPassage::span_text(TokenSpan span) const {
  if (span.start > span.end || span.end >= size()) {
    throw std::out_of_range("token span [" + std::to_string(span.start) + ", " +
                            std::to_string(span.end) + "] outside passage of " +
                            std::to_string(size()) + " tokens");
  }
  return char_substring(tokens.spans[span.start].begin, tokens.spans[span.end].end);
}

std::optional<TokenSpan> covering_span(const TokenizedPassage& passage, std::size_t answer_start,
                                       std::size_t answer_length) {
  const std::size_t begin = answer_start;
  const std::size_t end = answer_start + std::max<std::size_t>(answer_length, 1);
  if (begin >= passage.index.length()) return std::nullopt;
  const auto& spans = passage.tokens.spans;
  std::optional<std::size_t> first, last;
  for (std::size_t t = 0; t < spans.size(); ++t) {
    if (spans[t].end > begin && spans[t].begin < end) {
      if (!first) first = t;
      last = t;
    }
  }
  if (!first) return std::nullopt;
  return TokenSpan{*first, *last};
}

std::optional<TokenSpan> align_answer_span(const TokenizedPassage& passage,
                                           const std::string& answer_text,
                                           std::size_t answer_start) {
  auto span = covering_span(passage, answer_start, code_point_length(answer_text));
  if (!span) return std::nullopt;
  if (passage.span_text(*span).find(answer_text) == std::string::npos) return std::nullopt;
  return span;
}

std::vector<TokenizedExample> tokenize_examples(const std::vector<RawExample>& raw, LoadMode mode,
                                                TokenizeStats* stats) {
  std::map<const std::string*, std::shared_ptr<const TokenizedPassage>> passages;
  std::vector<TokenizedExample> out;
  out.reserve(raw.size());
  TokenizeStats local;
  for (const RawExample& r : raw) {
    ++local.total;
    auto& passage = passages[r.passage.get()];
    if (!passage) passage = TokenizedPassage::build(*r.passage);

    TokenizedExample ex;
    ex.passage = passage;
    ex.id = r.id;
    ex.question = r.question;
    ex.question_tokens = tokenize(r.question);
    bool first_aligned = false;
    for (std::size_t k = 0; k < r.answers.size(); ++k) {
      const GoldAnswer& ans = r.answers[k];
      ex.gold_texts.push_back(ans.text);
      auto span = align_answer_span(*passage, ans.text, ans.answer_start);
      if (!span && mode == LoadMode::kEvaluation) {
        span = covering_span(*passage, ans.answer_start, code_point_length(ans.text));
      }
      if (span) {
        if (k == 0) first_aligned = true;
        ex.gold_spans.push_back(*span);
      }
    }
    if (mode == LoadMode::kTraining &&
        (!first_aligned || passage->size() == 0 || ex.question_tokens.tokens.empty())) {
      ++local.dropped;
      continue;
    }
    out.push_back(std::move(ex));
  }
  if (local.dropped > 0) {
    std::cerr << "[data] dropped " << local.dropped << " of " << local.total
              << " training examples whose answer could not be aligned\n";
  }
  if (stats) *stats = local;
  return out;
}

}  // namespace mlstm::data
