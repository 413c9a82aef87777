#include "mlstm/evaluation/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"
#include "mlstm/data/tokenizer.hpp"

namespace mlstm::evaluation {
namespace {

// Only ASCII letters and the Latin-1 / Latin Extended-A uppercase ranges are
// folded; other scripts pass through unchanged.
std::string lowercase(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (c < 0x80) {
      out.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c + 32 : c));
      continue;
    }
    if ((c == 0xC3 || c == 0xC4 || c == 0xC5) && i + 1 < text.size()) {
      unsigned cp = ((c & 0x1Fu) << 6) | (static_cast<unsigned char>(text[i + 1]) & 0x3Fu);
      if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) {
        cp += 0x20;
      } else if (cp >= 0x100 && cp <= 0x17F && cp != 0x130 && cp != 0x138 && cp != 0x149 && cp != 0x178 && cp != 0x17F) {
        // Latin Extended-A pairs upper/lower on even/odd code points, with
        // the run 0x139..0x148 and 0x179..0x17E shifted by one.
        const bool odd_run = (cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E);
        if ((cp % 2 == 0) != odd_run) cp += 1;
      }
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
      ++i;
      continue;
    }
    out.push_back(static_cast<char>(c));
  }
  return out;
}

bool is_article(const std::string& t) { return t == "a" || t == "an" || t == "the"; }

double f1_single(const std::vector<std::string>& pred, const std::vector<std::string>& gold) {
  std::unordered_map<std::string, int> counts;
  for (const auto& t : gold) ++counts[t];
  std::size_t same = 0;
  for (const auto& t : pred) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++same;
    }
  }
  if (same == 0) return 0.0;
  const double precision = static_cast<double>(same) / static_cast<double>(pred.size());
  const double recall = static_cast<double>(same) / static_cast<double>(gold.size());
  return 2 * precision * recall / (precision + recall);
}

void require_golds(const std::vector<std::string>& golds) {
  if (golds.empty()) throw std::invalid_argument("gold answer list is empty");
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

std::vector<std::string> normalize_answer(const std::string& text) {
  std::string lowered = lowercase(text);
  std::string stripped;
  stripped.reserve(lowered.size());
  for (char c : lowered) {
    if (!data::is_ascii_punctuation(static_cast<unsigned char>(c))) stripped.push_back(c);
  }
  std::vector<std::string> tokens;
  std::istringstream in(stripped);
  for (std::string t; in >> t;) {
    if (!is_article(t)) tokens.push_back(std::move(t));
  }
  return tokens;
}

int exact_match(const std::string& prediction, const std::vector<std::string>& golds) {
  require_golds(golds);
  const auto pred = normalize_answer(prediction);
  for (const auto& g : golds) {
    if (normalize_answer(g) == pred) return 1;
  }
  return 0;
}

double token_f1(const std::string& prediction, const std::vector<std::string>& golds) {
  require_golds(golds);
  const auto pred = normalize_answer(prediction);
  double best = 0;
  for (const auto& g : golds) best = std::max(best, f1_single(pred, normalize_answer(g)));
  return best;
}

std::string question_type(const std::vector<std::string>& question_tokens) {
  for (const auto& raw : question_tokens) {
    const std::string t = lowercase(raw);
    for (const char* w : kQuestionWords) {
      if (t == w) return w;
    }
  }
  return "other";
}

std::string length_bucket(std::size_t tokens) {
  if (tokens > 9) return ">9";
  return std::to_string(std::max<std::size_t>(tokens, 1));
}

EvalReport evaluate(const decoding::Predictions& predictions,
                    const std::vector<data::TokenizedExample>& gold) {
  EvalReport r;
  for (int i = 1; i <= 9; ++i) r.by_length.push_back({std::to_string(i)});
  r.by_length.push_back({">9"});
  for (const char* w : kQuestionWords) r.by_type.push_back({w});
  r.by_type.push_back({"other"});

  auto bucket = [](std::vector<Bucket>& buckets, const std::string& label) -> Bucket& {
    return *std::find_if(buckets.begin(), buckets.end(), [&](const Bucket& b) { return b.label == label; });
  };

  for (const auto& ex : gold) {
    double em = 0, f1 = 0;
    auto it = predictions.find(ex.id);
    if (it == predictions.end()) {
      ++r.missing;
    } else {
      em = exact_match(it->second, ex.gold_texts);
      f1 = token_f1(it->second, ex.gold_texts);
    }
    r.em += em;
    r.f1 += f1;
    ++r.total;

    const std::size_t len = ex.gold_spans.empty() ? data::tokenize(ex.gold_texts.front()).tokens.size()
                                                  : ex.gold_spans.front().length();
    for (Bucket* b : {&bucket(r.by_length, length_bucket(len)),
                      &bucket(r.by_type, question_type(ex.question_tokens.tokens))}) {
      b->em += em;
      b->f1 += f1;
      ++b->count;
    }
  }

  auto finish = [](double& em, double& f1, std::size_t n) {
    if (n == 0) return;
    em = 100.0 * em / static_cast<double>(n);
    f1 = 100.0 * f1 / static_cast<double>(n);
  };
  finish(r.em, r.f1, r.total);
  for (auto* list : {&r.by_length, &r.by_type})
    for (Bucket& b : *list) finish(b.em, b.f1, b.count);

  if (r.missing > 0) {
    std::cerr << "warning: " << r.missing << " of " << r.total
              << " questions have no prediction and were scored 0\n";
  }
  return r;
}

std::string report_json(const EvalReport& report) {
  auto buckets = [](const std::vector<Bucket>& list) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& b : list) arr.push_back({{"bucket", b.label}, {"em", b.em}, {"f1", b.f1}, {"count", b.count}});
    return arr;
  };
  nlohmann::json j = {{"exact_match", report.em}, {"f1", report.f1},
                      {"total", report.total},    {"missing", report.missing},
                      {"by_answer_length", buckets(report.by_length)},
                      {"by_question_type", buckets(report.by_type)}};
  return j.dump(2);
}

std::string report_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "breakdown,bucket,count,em,f1\n";
  for (const auto& b : report.by_length)
    out << "answer_length," << b.label << ',' << b.count << ',' << percent(b.em) << ',' << percent(b.f1) << '\n';
  for (const auto& b : report.by_type)
    out << "question_type," << b.label << ',' << b.count << ',' << percent(b.em) << ',' << percent(b.f1) << '\n';
  return out.str();
}

}  // namespace mlstm::evaluation
