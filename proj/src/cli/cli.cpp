#include "mlstm/cli/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "mlstm/autodiff/gradcheck.hpp"
#include "mlstm/data/cache.hpp"
#include "mlstm/data/embeddings.hpp"
#include "mlstm/decoding/decode.hpp"
#include "mlstm/evaluation/metrics.hpp"
#include "mlstm/model/checkpoint.hpp"
#include "mlstm/training/trainer.hpp"

#ifndef MLSTM_GIT_DESCRIBE
#define MLSTM_GIT_DESCRIBE "unknown"
#endif

namespace mlstm::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Options that can also come from a --config JSON file. A key applies only
// when the matching flag was not given on the command line.
class Settings {
 public:
  explicit Settings(CLI::App* app) : app_(app) {}

  template <typename T>
  CLI::Option* option(const std::string& name, T& var, const std::string& help) {
    add_access(name, var);
    return app_->add_option("--" + name, var, help)->capture_default_str();
  }
  CLI::Option* flag(const std::string& name, bool& var, const std::string& help) {
    add_access(name, var);
    return app_->add_flag("--" + name, var, help);
  }

  void apply_config(const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file " + path);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw UsageError("config file " + path + " is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw UsageError("config file " + path + " must hold a JSON object");
    for (const auto& [key, value] : j.items()) {
      auto it = setters_.find(key);
      if (it == setters_.end()) throw UsageError("unknown key '" + key + "' in config file " + path);
      if (app_->count("--" + key) > 0) continue;
      try {
        it->second(value);
      } catch (const json::exception& e) {
        throw UsageError("config key '" + key + "': " + e.what());
      }
    }
  }

  json resolved() const {
    json out = json::object();
    for (const auto& [name, get] : getters_) out[name] = get();
    return out;
  }

  bool given(const std::string& name) const { return app_->count("--" + name) > 0 || from_config_.count(name) > 0; }

 private:
  template <typename T>
  void add_access(const std::string& name, T& var) {
    setters_[name] = [this, name, &var](const json& j) {
      var = j.get<T>();
      from_config_.insert(name);
    };
    getters_[name] = [&var] { return json(var); };
  }

  CLI::App* app_;
  std::map<std::string, std::function<void(const json&)>> setters_;
  std::map<std::string, std::function<json()>> getters_;
  std::set<std::string> from_config_;
};

model::HeadKind head_option(const std::string& name) {
  try {
    return model::parse_head(name);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--head: ") + e.what());
  }
}

std::string timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Relative paths that do not exist are looked up under $MLSTM_DATA_DIR.
fs::path data_path(const std::string& p) {
  fs::path path(p);
  if (path.empty() || path.is_absolute() || fs::exists(path)) return path;
  if (const char* dir = std::getenv("MLSTM_DATA_DIR"); dir && *dir) {
    const fs::path candidate = fs::path(dir) / path;
    if (fs::exists(candidate)) return candidate;
  }
  return path;
}

void require_file(const std::string& flag, const fs::path& path) {
  if (!fs::exists(path)) throw std::runtime_error(flag + ": no such file " + path.string());
}

std::size_t default_threads() {
  if (const char* env = std::getenv("MLSTM_THREADS"); env && *env) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    throw UsageError(std::string("MLSTM_THREADS must be a positive integer, got '") + env + "'");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string config_file;
  std::string train_json, dev_json, glove, out_dir, cache_dir;
  std::size_t hidden_dim = 150;
  std::string head = "boundary";
  bool bi_preprocess = false, bi_ans_ptr = false, separate_preprocess = false;
  std::size_t batch_size = 30;
  double lr = 0.002;
  std::size_t epochs = 10;
  std::uint64_t seed = 1;
  std::size_t patience = 3;
  double clip_norm = 0;
  std::size_t checkpoint_every = 0;
  std::size_t threads = 0;
  std::size_t max_span = 15;
};

void write_manifest(const fs::path& dir, const json& manifest) {
  fs::create_directories(dir);
  std::ofstream out(dir / "manifest.json");
  if (!out) throw std::runtime_error("cannot write manifest in " + dir.string());
  out << manifest.dump(2) << '\n';
}

int cmd_train(TrainArgs& a, const Settings& settings, std::ostream& out, std::ostream& err) {
  for (const auto& [flag, value] : {std::pair{"--train-json", &a.train_json}, std::pair{"--glove", &a.glove},
                                    std::pair{"--out-dir", &a.out_dir}}) {
    if (value->empty()) throw UsageError(std::string(flag) + " is required");
  }
  model::ModelConfig config;
  config.hidden_dim = a.hidden_dim;
  config.head = head_option(a.head);
  config.bi_preprocess = a.bi_preprocess;
  config.bi_answer_pointer = a.bi_ans_ptr;
  config.shared_preprocess = !a.separate_preprocess;

  training::TrainConfig tc;
  tc.learning_rate = a.lr;
  tc.batch_size = a.batch_size;
  tc.max_epochs = a.epochs;
  tc.seed = a.seed;
  tc.patience = a.patience;
  if (a.clip_norm > 0) tc.clip_norm = a.clip_norm;
  tc.checkpoint_every = a.checkpoint_every;
  tc.threads = settings.given("threads") ? a.threads : default_threads();
  tc.out_dir = a.out_dir;
  tc.dev_decode.max_span = a.max_span;
  try {
    tc.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const fs::path train_path = data_path(a.train_json), glove_path = data_path(a.glove);
  const fs::path dev_path = a.dev_json.empty() ? fs::path() : data_path(a.dev_json);
  require_file("--train-json", train_path);
  require_file("--glove", glove_path);
  if (!dev_path.empty()) require_file("--dev-json", dev_path);

  out << "seed " << a.seed << ", threads " << tc.threads << '\n';
  const fs::path dir(a.out_dir);
  json resolved = settings.resolved();
  resolved["threads"] = tc.threads;
  json manifest = {{"command", "train"},
                   {"config", resolved},
                   {"seed", a.seed},
                   {"git_describe", MLSTM_GIT_DESCRIBE},
                   {"started", timestamp()},
                   {"finished", nullptr},
                   {"artifacts", json::object()}};
  write_manifest(dir, manifest);

  const auto train_set = data::load_tokenized(train_path, data::LoadMode::kTraining, a.cache_dir);
  std::vector<data::TokenizedExample> dev_set;
  if (!dev_path.empty()) dev_set = data::load_tokenized(dev_path, data::LoadMode::kEvaluation, a.cache_dir);
  const auto vocab = data::Vocabulary::from_examples({&train_set, &dev_set});
  auto embedding = data::load_glove(glove_path, vocab);
  config.embed_dim = embedding.dim();
  out << train_set.size() << " training and " << dev_set.size() << " dev questions; vocabulary " << vocab.size()
      << ", " << embedding.found << " with vectors (d=" << embedding.dim() << ")\n";

  std::mt19937_64 rng(a.seed);
  model::Model model = model::Model::create(config, vocab, std::move(embedding.table), rng);
  out << model::head_name(config.head) << " model, l=" << config.hidden_dim << ", "
      << model.params().scalar_count() << " trainable parameters\n";

  const auto result = training::train(model, train_set, dev_set, tc, [&](const training::EpochMetrics& m) {
    out << "epoch " << m.epoch << "  loss " << std::fixed << std::setprecision(4) << m.train_loss;
    if (m.dev_f1) out << "  dev EM " << std::setprecision(1) << *m.dev_em << "  F1 " << *m.dev_f1;
    out << "  (" << std::setprecision(1) << m.wall_seconds << "s)\n" << std::defaultfloat << std::flush;
  });
  if (result.stopped_early) out << "stopped early after epoch " << result.epochs.size() << '\n';
  if (result.best_epoch > 0) {
    out << "best dev F1 " << std::fixed << std::setprecision(1) << result.best_dev_f1 << " at epoch "
        << result.best_epoch << '\n' << std::defaultfloat;
  }

  manifest["finished"] = timestamp();
  json artifacts = {{"metrics", (dir / "metrics.jsonl").string()}, {"last_checkpoint", (dir / "last.ckpt").string()}};
  if (result.best_epoch > 0) artifacts["best_checkpoint"] = (dir / "best.ckpt").string();
  json periodic = json::array();
  for (const auto& m : result.epochs) {
    if (tc.checkpoint_every > 0 && m.epoch % tc.checkpoint_every == 0)
      periodic.push_back((dir / ("epoch-" + std::to_string(m.epoch) + ".ckpt")).string());
  }
  if (!periodic.empty()) artifacts["periodic_checkpoints"] = periodic;
  manifest["artifacts"] = artifacts;
  manifest["epochs_run"] = result.epochs.size();
  write_manifest(dir, manifest);
  (void)err;
  return kSuccess;
}

// ---------------------------------------------------------------- predict

struct PredictArgs {
  std::vector<std::string> checkpoints;
  std::string input_json, out_path, strategy = "search", cache_dir;
  std::size_t max_span = 15;
};

int cmd_predict(PredictArgs& a, const CLI::App& sub, std::ostream& out, std::ostream& err) {
  if (a.checkpoints.empty()) throw UsageError("--checkpoints needs at least one path");
  if (a.input_json.empty()) throw UsageError("--input-json is required");
  if (a.out_path.empty()) throw UsageError("--out is required");
  decoding::DecodeConfig dc;
  try {
    dc.strategy = decoding::parse_strategy(a.strategy);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (a.max_span == 0) throw UsageError("--max-span must be at least 1");
  dc.max_span = a.max_span;

  std::vector<model::Model> models;
  for (const auto& c : a.checkpoints) {
    require_file("--checkpoints", data_path(c));
    models.push_back(model::load_checkpoint(data_path(c)));
  }
  const model::HeadKind head = models.front().config().head;
  for (std::size_t i = 1; i < models.size(); ++i) {
    if (models[i].config().head != head) {
      throw std::runtime_error("checkpoint " + a.checkpoints[i] + " has a " +
                               std::string(model::head_name(models[i].config().head)) + " head, " +
                               a.checkpoints[0] + " has " + std::string(model::head_name(head)));
    }
  }
  if (head == model::HeadKind::kSequence) {
    if (sub.count("--max-span") > 0) err << "warning: --max-span does not apply to sequence-head models; ignored\n";
    if (sub.count("--strategy") > 0) err << "warning: --strategy does not apply to sequence-head models; ignored\n";
    if (models.size() > 1) throw std::runtime_error("ensembles are defined for boundary models only");
  } else if (models.size() > 1 && dc.strategy == decoding::Strategy::kGreedy) {
    err << "warning: ensembles always use span search; --strategy greedy ignored\n";
  }

  const fs::path input = data_path(a.input_json);
  require_file("--input-json", input);
  const auto examples = data::load_tokenized(input, data::LoadMode::kEvaluation, a.cache_dir);
  std::vector<const model::Model*> members;
  for (const auto& m : models) members.push_back(&m);
  const auto predictions = decoding::predict(members, examples, dc);
  decoding::write_predictions(predictions, a.out_path);
  out << "wrote " << predictions.size() << " predictions to " << a.out_path << " ("
      << (models.size() > 1 ? std::to_string(models.size()) + "-model ensemble"
                            : head == model::HeadKind::kSequence ? "sequence decoding"
                                                                 : std::string(decoding::strategy_name(dc.strategy)) + " decoding")
      << ")\n";
  return kSuccess;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string pred, gold, report_out;
};

int cmd_evaluate(EvaluateArgs& a, std::ostream& out) {
  if (a.pred.empty() || a.gold.empty()) throw UsageError("--pred and --gold are required");
  const fs::path gold_path = data_path(a.gold);
  require_file("--gold", gold_path);
  const auto predictions = decoding::read_predictions(data_path(a.pred));
  const auto gold = data::tokenize_examples(data::load_squad_json(gold_path, data::LoadMode::kEvaluation),
                                            data::LoadMode::kEvaluation);
  const auto report = evaluation::evaluate(predictions, gold);
  char line[64];
  std::snprintf(line, sizeof(line), "EM: %.1f  F1: %.1f", report.em, report.f1);
  out << line << '\n';
  if (!a.report_out.empty()) {
    fs::path json_path(a.report_out);
    if (json_path.has_parent_path()) fs::create_directories(json_path.parent_path());
    fs::path csv_path = json_path;
    csv_path.replace_extension(".csv");
    if (csv_path == json_path) csv_path += ".csv";
    std::ofstream(json_path) << evaluation::report_json(report) << '\n';
    std::ofstream(csv_path) << evaluation::report_csv(report);
    if (!fs::exists(json_path) || !fs::exists(csv_path)) throw std::runtime_error("cannot write report files");
    out << "report: " << json_path.string() << ", " << csv_path.string() << '\n';
  }
  return kSuccess;
}

// ---------------------------------------------------------------- gradcheck

struct GradcheckArgs {
  std::size_t hidden_dim = 4, embed_dim = 4, passage_len = 7, question_len = 5;
  std::string head = "boundary";
  bool bi_preprocess = false, bi_ans_ptr = false, separate_preprocess = false;
  std::uint64_t seed = 1;
  double tolerance = 1e-4, epsilon = 1e-5, init_scale = 1.0;
  std::string corrupt;
};

std::optional<ad::Op> parse_fault(const std::string& name) {
  if (name.empty()) return std::nullopt;
  for (ad::Op op : {ad::Op::kTanh, ad::Op::kSigmoid, ad::Op::kSoftmaxRows, ad::Op::kLog}) {
    if (ad::op_name(op) == name) return op;
  }
  throw UsageError("--corrupt-backward accepts tanh, sigmoid, softmax_rows or log, got '" + name + "'");
}

int cmd_gradcheck(GradcheckArgs& a, std::ostream& out) {
  if constexpr (sizeof(Real) < 8) throw UsageError("gradcheck needs the 64-bit build");
  if (a.hidden_dim == 0 || a.embed_dim == 0 || a.passage_len == 0 || a.question_len == 0) {
    throw UsageError("dimensions and lengths must be at least 1");
  }
  if (a.hidden_dim > 16 || a.embed_dim > 16 || a.passage_len > 40 || a.question_len > 40) {
    throw UsageError("gradcheck sizes are capped at l, d <= 16 and P, Q <= 40 to keep the run short");
  }
  if (a.epsilon < 1e-7 || a.epsilon > 1e-4) throw UsageError("--epsilon must lie in [1e-7, 1e-4]");
  if (!(a.tolerance > 0)) throw UsageError("--tolerance must be positive");

  model::ModelConfig config;
  config.hidden_dim = a.hidden_dim;
  config.embed_dim = a.embed_dim;
  config.head = head_option(a.head);
  config.bi_preprocess = a.bi_preprocess;
  config.bi_answer_pointer = a.bi_ans_ptr;
  config.shared_preprocess = !a.separate_preprocess;
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  constexpr std::size_t kVocab = 30;
  const model::Model m = model::random_model(config, kVocab, a.seed, a.init_scale);
  std::mt19937_64 rng(a.seed + 1);
  const model::EncodedExample input = model::random_input(a.passage_len, a.question_len, kVocab, rng);
  const std::size_t P = a.passage_len;
  const data::TokenSpan target{P / 3, std::min(P - 1, P / 3 + 2)};

  const auto fault = parse_fault(a.corrupt);
  ad::debug::set_backward_fault(fault);
  const auto started = std::chrono::steady_clock::now();
  model::NetworkGraph net = m.build(input, target);
  const auto report = ad::check_gradients(net.graph, m.bindings(), *net.loss, a.epsilon, a.tolerance);
  ad::debug::set_backward_fault(std::nullopt);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  out << model::head_name(config.head) << " head, l=" << a.hidden_dim << " d=" << a.embed_dim << " P=" << P
      << " Q=" << a.question_len << ", target (" << target.start << ", " << target.end << "), seed " << a.seed
      << ", eps " << a.epsilon << ", tolerance " << a.tolerance;
  if (fault) out << ", corrupted backward: " << ad::op_name(*fault);
  out << '\n';
  out << std::left << std::setw(18) << "parameter" << std::right << std::setw(9) << "elements" << std::setw(14)
      << "max rel err" << std::setw(14) << "max |grad|" << "  status\n";
  for (const auto& p : report.parameters) {
    out << std::left << std::setw(18) << p.name << std::right << std::setw(9) << p.elements << std::setw(14)
        << std::scientific << std::setprecision(3) << p.max_relative_error << std::setw(14) << p.max_abs_analytic
        << std::defaultfloat << "  " << (p.passed ? "ok" : "FAIL") << '\n';
  }
  out << "max relative error " << std::scientific << std::setprecision(3) << report.max_relative_error
      << std::defaultfloat << " over " << report.parameters.size() << " parameters in " << std::fixed
      << std::setprecision(2) << secs << "s: " << (report.passed ? "PASS" : "FAIL") << '\n'
      << std::defaultfloat;
  return report.passed ? kSuccess : kFailure;
}

// ---------------------------------------------------------------- dump-attention

struct DumpArgs {
  std::string checkpoint, input_json, question_id, out_prefix;
};

void write_attention_csv(const fs::path& path, const Tensor& alpha, const std::vector<std::string>& passage,
                         const std::vector<std::string>& question) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "passage\\question";
  for (const auto& q : question) out << ',' << csv_field(q);
  out << '\n';
  char buf[40];
  for (std::size_t i = 0; i < alpha.rows(); ++i) {
    out << csv_field(passage[i]);
    for (std::size_t j = 0; j < alpha.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), ",%.17g", static_cast<double>(alpha(i, j)));
      out << buf;
    }
    out << '\n';
  }
}

// Binary graymap, one pixel per weight: passage positions are rows,
// question tokens columns, darker means more attention.
void write_heatmap(const fs::path& path, const Tensor& alpha) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "P5\n" << alpha.cols() << ' ' << alpha.rows() << "\n255\n";
  for (std::size_t i = 0; i < alpha.rows(); ++i) {
    for (std::size_t j = 0; j < alpha.cols(); ++j) {
      const double w = std::clamp(static_cast<double>(alpha(i, j)), 0.0, 1.0);
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * (1.0 - w)))));
    }
  }
}

int cmd_dump_attention(DumpArgs& a, std::ostream& out) {
  if (a.checkpoint.empty() || a.input_json.empty() || a.question_id.empty() || a.out_prefix.empty()) {
    throw UsageError("--checkpoint, --input-json, --question-id and --out-prefix are required");
  }
  const fs::path ckpt = data_path(a.checkpoint), input = data_path(a.input_json);
  require_file("--checkpoint", ckpt);
  require_file("--input-json", input);
  const model::Model m = model::load_checkpoint(ckpt);
  const auto examples = data::tokenize_examples(data::load_squad_json(input, data::LoadMode::kEvaluation),
                                                data::LoadMode::kEvaluation);
  auto it = std::find_if(examples.begin(), examples.end(), [&](const auto& e) { return e.id == a.question_id; });
  if (it == examples.end()) throw std::runtime_error("question id '" + a.question_id + "' not found in " + input.string());
  if (it->passage->size() == 0 || it->question_tokens.tokens.empty()) {
    throw std::runtime_error("question '" + a.question_id + "' has an empty passage or question");
  }

  const auto maps = m.attention(m.encode(*it));
  const fs::path prefix(a.out_prefix);
  if (prefix.has_parent_path()) fs::create_directories(prefix.parent_path());
  const auto& ptoks = it->passage->tokens.tokens;
  const auto& qtoks = it->question_tokens.tokens;
  for (const auto& [name, alpha] : {std::pair<std::string, const Tensor*>{"forward", &maps.forward},
                                    std::pair<std::string, const Tensor*>{"backward", &maps.backward}}) {
    const fs::path csv = prefix.string() + "." + name + ".csv";
    const fs::path pgm = prefix.string() + "." + name + ".pgm";
    write_attention_csv(csv, *alpha, ptoks, qtoks);
    write_heatmap(pgm, *alpha);
    out << name << ": " << csv.string() << ", " << pgm.string() << " (" << alpha->rows() << "x" << alpha->cols()
        << ")\n";
  }
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const CliOptions& options) {
  CLI::App app{"match-LSTM reader with answer-pointer heads"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  TrainArgs ta;
  CLI::App* train = app.add_subcommand("train", "Train a model and write checkpoints, metrics and a manifest");
  Settings ts(train);
  train->add_option("--config", ta.config_file, "JSON file of option values; flags take precedence");
  ts.option("train-json", ta.train_json, "SQuAD-format training file");
  ts.option("dev-json", ta.dev_json, "SQuAD-format dev file for per-epoch scoring and early stopping");
  ts.option("glove", ta.glove, "Word vectors in GloVe text format");
  ts.option("out-dir", ta.out_dir, "Directory for checkpoints, metrics.jsonl and manifest.json");
  ts.option("hidden-dim", ta.hidden_dim, "Hidden size l");
  ts.option("head", ta.head, "Answer head: boundary or sequence");
  ts.flag("bi-preprocess", ta.bi_preprocess, "Bidirectional preprocessing LSTM");
  ts.flag("bi-ans-ptr", ta.bi_ans_ptr, "Add a reverse-order boundary pointer and average the two");
  ts.flag("separate-preprocess", ta.separate_preprocess, "Separate passage and question preprocessing LSTMs");
  ts.option("batch-size", ta.batch_size, "Minibatch size");
  ts.option("lr", ta.lr, "Adamax learning rate");
  ts.option("epochs", ta.epochs, "Maximum number of epochs");
  ts.option("seed", ta.seed, "Seed for initialisation and shuffling");
  ts.option("patience", ta.patience, "Epochs without dev F1 improvement before stopping (0 = never)");
  ts.option("clip-norm", ta.clip_norm, "Global gradient norm clip (0 = off)");
  ts.option("checkpoint-every", ta.checkpoint_every, "Also keep epoch-N checkpoints every N epochs (0 = off)");
  ts.option("threads", ta.threads, "Worker threads (default: $MLSTM_THREADS or all cores)");
  ts.option("max-span", ta.max_span, "Longest span considered when scoring the dev set");
  ts.option("cache-dir", ta.cache_dir, "Directory for the tokenization cache (empty = off)");

  PredictArgs pa;
  CLI::App* predict = app.add_subcommand("predict", "Write SQuAD-format predictions from one or more checkpoints");
  predict->add_option("--checkpoints", pa.checkpoints, "One checkpoint, or several boundary models to ensemble");
  predict->add_option("--input-json", pa.input_json, "SQuAD-format questions");
  predict->add_option("--max-span", pa.max_span, "Longest span in tokens")->capture_default_str();
  predict->add_option("--strategy", pa.strategy, "greedy or search")->capture_default_str();
  predict->add_option("--out", pa.out_path, "Predictions JSON to write");
  predict->add_option("--cache-dir", pa.cache_dir, "Directory for the tokenization cache (empty = off)");

  EvaluateArgs ea;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Score predictions: EM, F1 and breakdowns");
  evaluate->add_option("--pred", ea.pred, "Predictions JSON");
  evaluate->add_option("--gold", ea.gold, "SQuAD-format gold file");
  evaluate->add_option("--report-out", ea.report_out, "Report JSON path; the CSV breakdown goes next to it");

  GradcheckArgs ga;
  CLI::App* gradcheck = app.add_subcommand("gradcheck", "Compare backprop with central finite differences");
  gradcheck->add_option("--hidden-dim", ga.hidden_dim, "Hidden size l")->capture_default_str();
  gradcheck->add_option("--embed-dim", ga.embed_dim, "Embedding size d")->capture_default_str();
  gradcheck->add_option("--passage-len", ga.passage_len, "Passage length P")->capture_default_str();
  gradcheck->add_option("--question-len", ga.question_len, "Question length Q")->capture_default_str();
  gradcheck->add_option("--head", ga.head, "boundary or sequence")->capture_default_str();
  gradcheck->add_flag("--bi-preprocess", ga.bi_preprocess, "Bidirectional preprocessing LSTM");
  gradcheck->add_flag("--bi-ans-ptr", ga.bi_ans_ptr, "Bidirectional boundary pointer");
  gradcheck->add_flag("--separate-preprocess", ga.separate_preprocess, "Separate preprocessing LSTMs");
  gradcheck->add_option("--seed", ga.seed, "Seed for the random model and input")->capture_default_str();
  gradcheck->add_option("--tolerance", ga.tolerance, "Largest accepted relative error")->capture_default_str();
  gradcheck->add_option("--epsilon", ga.epsilon, "Finite-difference step")->capture_default_str();
  gradcheck->add_option("--init-scale", ga.init_scale, "Parameters drawn from uniform(-s, s)")->capture_default_str();
  if (options.allow_fault_injection) {
    gradcheck->add_option("--corrupt-backward", ga.corrupt, "Scale one op's backward rule by 1.1 (negative control)");
  }

  DumpArgs da;
  CLI::App* dump = app.add_subcommand("dump-attention", "Write match-LSTM attention as CSV and PGM heatmaps");
  dump->add_option("--checkpoint", da.checkpoint, "Model checkpoint");
  dump->add_option("--input-json", da.input_json, "SQuAD-format file holding the question");
  dump->add_option("--question-id", da.question_id, "Question to visualise");
  dump->add_option("--out-prefix", da.out_prefix, "Output prefix for <prefix>.{forward,backward}.{csv,pgm}");

  std::vector<std::string> storage = args.empty() ? std::vector<std::string>{"mlstm"} : args;
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help("", CLI::AppFormatMode::All);
      return kSuccess;
    }
    err << "error: " << e.what() << "\nrun with --help for usage\n";
    return kUsage;
  }

  try {
    if (train->parsed()) {
      ts.apply_config(ta.config_file);
      return cmd_train(ta, ts, out, err);
    }
    if (predict->parsed()) return cmd_predict(pa, *predict, out, err);
    if (evaluate->parsed()) return cmd_evaluate(ea, out);
    if (gradcheck->parsed()) return cmd_gradcheck(ga, out);
    if (dump->parsed()) return cmd_dump_attention(da, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

int main_entry(int argc, char** argv, const CliOptions& options) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args, std::cout, std::cerr, options);
}

}  // namespace mlstm::cli
