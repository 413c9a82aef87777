#include "mlstm/data/cache.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "json.hpp"

namespace mlstm::data {
namespace {

using nlohmann::json;

constexpr int kCacheVersion = 1;  // bump when tokenizer or layout changes

json encode_text(const TokenizedText& t) {
  json spans = json::array();
  for (const auto& s : t.spans) spans.push_back({s.begin, s.end});
  return {{"tokens", t.tokens}, {"spans", spans}};
}

TokenizedText decode_text(const json& j) {
  TokenizedText t;
  t.tokens = j.at("tokens").get<std::vector<std::string>>();
  for (const auto& s : j.at("spans")) t.spans.push_back({s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>()});
  return t;
}

}  // namespace

std::uint64_t content_hash(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::filesystem::path PreprocessCache::entry_path(std::uint64_t key) const {
  char name[32];
  std::snprintf(name, sizeof(name), "%016llx.json", static_cast<unsigned long long>(key));
  return dir_ / name;
}

std::optional<std::vector<TokenizedExample>> PreprocessCache::load(std::uint64_t key) const {
  std::ifstream in(entry_path(key));
  if (!in) return std::nullopt;
  json doc;
  try {
    doc = json::parse(in);
    if (doc.at("version").get<int>() != kCacheVersion) return std::nullopt;
  } catch (const json::exception&) {
    return std::nullopt;
  }

  std::vector<std::shared_ptr<const TokenizedPassage>> passages;
  for (const auto& p : doc.at("passages")) {
    auto tp = std::make_shared<TokenizedPassage>();
    tp->text = p.at("text").get<std::string>();
    tp->index = Utf8Index::build(tp->text);
    tp->tokens = decode_text(p.at("tokenized"));
    passages.push_back(std::move(tp));
  }
  std::vector<TokenizedExample> out;
  for (const auto& e : doc.at("examples")) {
    TokenizedExample ex;
    ex.passage = passages.at(e.at("passage").get<std::size_t>());
    ex.id = e.at("id").get<std::string>();
    ex.question = e.at("question").get<std::string>();
    ex.question_tokens = decode_text(e.at("question_tokenized"));
    ex.gold_texts = e.at("gold_texts").get<std::vector<std::string>>();
    for (const auto& s : e.at("gold_spans")) ex.gold_spans.push_back({s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>()});
    out.push_back(std::move(ex));
  }
  return out;
}

void PreprocessCache::store(std::uint64_t key, const std::vector<TokenizedExample>& examples) const {
  std::map<const TokenizedPassage*, std::size_t> ids;
  json passages = json::array();
  json items = json::array();
  for (const auto& ex : examples) {
    auto [it, inserted] = ids.emplace(ex.passage.get(), ids.size());
    if (inserted) {
      passages.push_back({{"text", ex.passage->text}, {"tokenized", encode_text(ex.passage->tokens)}});
    }
    json spans = json::array();
    for (const auto& s : ex.gold_spans) spans.push_back({s.start, s.end});
    items.push_back({{"passage", it->second},
                     {"id", ex.id},
                     {"question", ex.question},
                     {"question_tokenized", encode_text(ex.question_tokens)},
                     {"gold_texts", ex.gold_texts},
                     {"gold_spans", spans}});
  }
  std::filesystem::create_directories(dir_);
  const auto final_path = entry_path(key);
  const auto tmp = final_path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    out << json{{"version", kCacheVersion}, {"passages", passages}, {"examples", items}}.dump();
  }
  std::filesystem::rename(tmp, final_path);
}

std::vector<TokenizedExample> load_tokenized(const std::filesystem::path& squad_path, LoadMode mode,
                                             const std::filesystem::path& cache_dir, bool* cache_hit) {
  if (cache_hit) *cache_hit = false;
  if (cache_dir.empty()) return tokenize_examples(load_squad_json(squad_path, mode), mode);

  std::ifstream in(squad_path, std::ios::binary);
  if (!in) throw DataError("cannot open " + squad_path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::uint64_t key = content_hash(bytes);
  const std::string salt = "v" + std::to_string(kCacheVersion) +
                           (mode == LoadMode::kTraining ? "/train" : "/eval");
  key = content_hash(salt, key);

  PreprocessCache cache(cache_dir);
  if (auto hit = cache.load(key)) {
    if (cache_hit) *cache_hit = true;
    return std::move(*hit);
  }
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw DataError("malformed JSON in " + squad_path.string() + ": " + e.what());
  }
  auto examples = tokenize_examples(parse_squad_json(doc, mode), mode);
  cache.store(key, examples);
  return examples;
}

}  // namespace mlstm::data
