#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mlstm/data/squad.hpp"
#include "mlstm/decoding/decode.hpp"

namespace mlstm::evaluation {

/// Official SQuAD v1.1 normalization: lowercase, drop ASCII punctuation,
/// drop the articles a/an/the, split on whitespace.
std::vector<std::string> normalize_answer(const std::string& text);

/// 1 if the normalized prediction equals any normalized gold answer.
int exact_match(const std::string& prediction, const std::vector<std::string>& golds);
/// Best multiset-overlap F1 over the gold answers, in [0, 1].
double token_f1(const std::string& prediction, const std::vector<std::string>& golds);

inline constexpr std::array<const char*, 7> kQuestionWords = {"what", "how", "who", "when",
                                                              "which", "where", "why"};
/// First question word found scanning tokens left to right, else "other".
std::string question_type(const std::vector<std::string>& question_tokens);
/// Bucket label for a gold answer length in tokens: "1".."9" or ">9".
std::string length_bucket(std::size_t tokens);

struct Bucket {
  std::string label;
  double em = 0;  // percent
  double f1 = 0;  // percent
  std::size_t count = 0;
};

struct EvalReport {
  double em = 0;
  double f1 = 0;
  std::size_t total = 0;
  std::size_t missing = 0;
  std::vector<Bucket> by_length;  // 1..9, >9
  std::vector<Bucket> by_type;    // what how who when which where why other
};

/// A gold question absent from the predictions scores zero and is counted
/// in `missing`. The length bucket uses the first gold answer's token count.
EvalReport evaluate(const decoding::Predictions& predictions,
                    const std::vector<data::TokenizedExample>& gold);

std::string report_json(const EvalReport& report);
/// Header plus one row per length bucket, then one per question-type bucket.
std::string report_csv(const EvalReport& report);

}  // namespace mlstm::evaluation
