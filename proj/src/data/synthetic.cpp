#include "mlstm/data/synthetic.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace mlstm::data {
namespace {

using nlohmann::json;

struct Qa {
  std::string question;
  std::string answer;
  std::size_t answer_start;  // byte offset; the generated text is ASCII
};

json paragraph(const std::string& context, const std::vector<Qa>& qas, const std::string& id_prefix) {
  json q = json::array();
  for (std::size_t i = 0; i < qas.size(); ++i) {
    q.push_back({{"id", id_prefix + "-" + std::to_string(i)},
                 {"question", qas[i].question},
                 {"answers", json::array({{{"text", qas[i].answer}, {"answer_start", qas[i].answer_start}}})}});
  }
  return {{"context", context}, {"qas", q}};
}

std::string squad(const json& paragraphs, const std::string& title) {
  return json({{"version", "1.1"}, {"data", json::array({{{"title", title}, {"paragraphs", paragraphs}}})}}).dump();
}

std::string join(const std::vector<std::string>& words, std::size_t begin, std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) out += ' ';
    out += words[i];
  }
  return out;
}

template <typename T>
const T& pick(const std::vector<T>& v, std::mt19937_64& rng) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

const std::vector<std::string> kSyllables = {"ka", "lo", "mi", "ra", "ven", "tor", "bel", "sa", "dun", "qui",
                                             "mar", "zo", "fen", "lu", "gra", "pel", "ost", "ni", "ber", "ta"};
const std::vector<std::string> kFirstNames = {"Anna", "Boris", "Clara", "Dmitri", "Elena", "Felix", "Greta",
                                              "Hugo", "Ida",   "Jonas", "Karin", "Lars",   "Mira",  "Nils",
                                              "Olga", "Pavel", "Rosa",  "Stefan", "Tanja", "Viktor"};
const std::vector<std::string> kSurnames = {"Adler", "Brandt", "Novak", "Dvorak", "Eriksen", "Fischer", "Horvat",
                                            "Jansen", "Kovac", "Lindqvist", "Meyer", "Nowak", "Petrov", "Quist",
                                            "Richter", "Sorensen", "Tamm", "Urban", "Vogel", "Wolf"};
const std::vector<std::string> kCities = {"Karlovac", "Graz", "Tartu", "Bergen", "Lyon", "Porto", "Brno",
                                          "Ghent", "Split", "Turku", "Kaunas", "Bologna", "Malmo", "Aarhus",
                                          "Kosice", "Ljubljana", "Utrecht", "Basel", "Leipzig", "Krakow"};
const std::vector<std::string> kProducts = {"bicycles", "lamps", "violins", "clocks", "boats", "cameras",
                                            "radios", "tractors", "pianos", "maps", "glassware", "textiles",
                                            "turbines", "telescopes", "furniture", "bridges"};

std::string org_name(std::mt19937_64& rng) {
  std::string n = pick(kSyllables, rng) + pick(kSyllables, rng);
  if (std::uniform_int_distribution<int>(0, 1)(rng)) n += pick(kSyllables, rng);
  n[0] = static_cast<char>(n[0] - 'a' + 'A');
  return n;
}

}  // namespace

SyntheticCorpus make_memorization_corpus(std::size_t count, std::size_t vocab, std::size_t min_passage,
                                         std::size_t max_passage, std::uint64_t seed) {
  if (vocab < 4 || min_passage < 3 || max_passage < min_passage) {
    throw std::invalid_argument("memorization corpus needs vocab >= 4 and 3 <= min_passage <= max_passage");
  }
  std::mt19937_64 rng(seed);
  SyntheticCorpus out;
  std::vector<std::string> words;
  for (std::size_t i = 0; i < vocab; ++i) words.push_back("w" + std::to_string(i));
  std::uniform_int_distribution<std::size_t> word(0, vocab - 1);
  std::uniform_int_distribution<std::size_t> length(min_passage, max_passage);

  json paragraphs = json::array();
  for (std::size_t n = 0; n < count; ++n) {
    std::vector<std::string> tokens(length(rng));
    for (auto& t : tokens) t = words[word(rng)];
    const std::size_t span = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
    const std::size_t start = std::uniform_int_distribution<std::size_t>(2, tokens.size() - std::min(span, tokens.size() - 2))(rng);
    const std::size_t end = std::min(tokens.size(), start + span);
    const std::string before = join(tokens, 0, start);
    const std::string question = tokens[start - 2] + " " + tokens[start - 1] + " " + words[word(rng)];
    paragraphs.push_back(paragraph(join(tokens, 0, tokens.size()),
                                   {{question, join(tokens, start, end), before.size() + 1}},
                                   "mem" + std::to_string(n)));
  }
  out.train_json = squad(paragraphs, "memorization");
  return out;
}

SyntheticCorpus make_facts_corpus(std::size_t train_count, std::size_t dev_count, std::uint64_t seed,
                                  std::size_t organisations, std::size_t per_passage) {
  if (per_passage == 0 || organisations < per_passage) {
    throw std::invalid_argument("facts corpus needs 1 <= per_passage <= organisations");
  }
  std::mt19937_64 rng(seed);
  // A closed pool of organisation names shared by both splits, so the
  // question-to-passage match is over tokens seen in training.
  std::vector<std::string> orgs;
  for (std::set<std::string> seen; orgs.size() < organisations;) {
    std::string name = org_name(rng);
    if (seen.insert(name).second) orgs.push_back(std::move(name));
  }

  auto build = [&](std::size_t count, const std::string& tag) {
    json paragraphs = json::array();
    std::size_t made = 0;
    while (made < count) {
      // Several organisations per passage, one question about one of them.
      std::string text;
      auto put = [&text](const std::string& piece) {
        const std::size_t at = text.size();
        text += piece;
        return at;
      };
      struct Fact {
        std::string org, founder, city, year, product;
        std::size_t founder_at = 0, city_at = 0, year_at = 0, product_at = 0;
      };
      std::vector<Fact> facts;
      std::vector<std::string> chosen;
      std::sample(orgs.begin(), orgs.end(), std::back_inserter(chosen), per_passage, rng);
      std::shuffle(chosen.begin(), chosen.end(), rng);
      for (const auto& org : chosen) {
        Fact f;
        f.org = org;
        f.founder = pick(kFirstNames, rng) + " " + pick(kSurnames, rng);
        f.city = pick(kCities, rng);
        f.year = std::to_string(std::uniform_int_distribution<int>(1820, 1990)(rng));
        f.product = pick(kProducts, rng);
        if (!text.empty()) put(" ");
        if (std::uniform_int_distribution<int>(0, 1)(rng) == 0) {
          put(f.org + " was founded by ");
          f.founder_at = put(f.founder);
          put(" in ");
          f.city_at = put(f.city);
          put(" in ");
          f.year_at = put(f.year);
          put(".");
        } else {
          put("In ");
          f.year_at = put(f.year);
          put(", ");
          f.founder_at = put(f.founder);
          put(" opened " + f.org + " in ");
          f.city_at = put(f.city);
          put(".");
        }
        put(" The company made ");
        f.product_at = put(f.product);
        put(".");
        facts.push_back(f);
      }
      const Fact& f = facts[std::uniform_int_distribution<std::size_t>(0, facts.size() - 1)(rng)];
      std::vector<Qa> qas;
      switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
        case 0: qas.push_back({"Who founded " + f.org + "?", f.founder, f.founder_at}); break;
        case 1: qas.push_back({"Where was " + f.org + " founded?", f.city, f.city_at}); break;
        case 2: qas.push_back({"When was " + f.org + " founded?", f.year, f.year_at}); break;
        default: qas.push_back({"What did " + f.org + " make?", f.product, f.product_at}); break;
      }
      paragraphs.push_back(paragraph(text, qas, tag + std::to_string(made)));
      ++made;
    }
    return paragraphs;
  };

  SyntheticCorpus out;
  out.train_json = squad(build(train_count, "train"), "facts");
  if (dev_count > 0) out.dev_json = squad(build(dev_count, "dev"), "facts");
  return out;
}

void write_random_vectors(const std::vector<std::string>& words, std::size_t dim, std::uint64_t seed,
                          const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const auto& w : words) {
    out << w;
    for (std::size_t i = 0; i < dim; ++i) out << ' ' << u(rng);
    out << '\n';
  }
}

}  // namespace mlstm::data
