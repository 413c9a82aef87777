#include "mlstm/training/trainer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>

#include "json.hpp"
#include "mlstm/data/batching.hpp"
#include "mlstm/evaluation/metrics.hpp"
#include "mlstm/model/checkpoint.hpp"

namespace mlstm::training {
namespace {

struct Item {
  model::EncodedExample input;
  data::TokenSpan target;
  const data::TokenizedExample* source;
};

std::vector<Item> prepare(const model::Model& model, const std::vector<data::TokenizedExample>& examples) {
  std::vector<Item> items;
  items.reserve(examples.size());
  for (const auto& ex : examples) {
    if (ex.gold_spans.empty()) throw TrainingError("training example '" + ex.id + "' has no gold span");
    items.push_back({model.encode(ex), ex.gold_spans.front(), &ex});
  }
  return items;
}

// Loss and gradients for each example of one batch, computed on up to
// `threads` workers. Results are indexed by position in the batch.
std::vector<model::LossAndGradients> run_batch(const model::Model& model, const std::vector<Item>& items,
                                               const std::vector<std::size_t>& batch, std::size_t threads) {
  std::vector<model::LossAndGradients> out(batch.size());
  std::vector<std::exception_ptr> errors(batch.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      try {
        out[k] = model.loss_and_gradients(items[batch[k]].input, items[batch[k]].target);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min(threads, batch.size());
  if (workers <= 1) {
    work(0, batch.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (batch.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t b = w * chunk, e = std::min(batch.size(), b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

nlohmann::json metrics_json(const EpochMetrics& m) {
  nlohmann::json j = {{"epoch", m.epoch}, {"train_loss", m.train_loss}, {"wall_seconds", m.wall_seconds}};
  j["dev_em"] = m.dev_em ? nlohmann::json(*m.dev_em) : nlohmann::json(nullptr);
  j["dev_f1"] = m.dev_f1 ? nlohmann::json(*m.dev_f1) : nlohmann::json(nullptr);
  return j;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0)) throw std::invalid_argument("learning rate must be positive");
  if (batch_size == 0) throw std::invalid_argument("batch size must be at least 1");
  if (threads == 0) throw std::invalid_argument("thread count must be at least 1");
  if (clip_norm && !(*clip_norm > 0)) throw std::invalid_argument("clip norm must be positive");
}

Real mean_loss(const model::Model& model, const std::vector<data::TokenizedExample>& examples) {
  if (examples.empty()) return 0;
  Real total = 0;
  for (const Item& it : prepare(model, examples)) total += model.loss(it.input, it.target);
  return total / static_cast<Real>(examples.size());
}

TrainResult train(model::Model& model, const std::vector<data::TokenizedExample>& train_set,
                  const std::vector<data::TokenizedExample>& dev_set, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  config.validate();
  if (train_set.empty()) throw std::invalid_argument("training set is empty");

  const std::vector<Item> items = prepare(model, train_set);
  std::mt19937_64 rng(config.seed);
  AdamaxState state;
  TrainResult result;
  model::ModelParams best = model.params();
  std::size_t since_best = 0;

  std::ofstream metrics_log;
  if (!config.out_dir.empty()) {
    std::filesystem::create_directories(config.out_dir);
    metrics_log.open(config.out_dir / "metrics.jsonl", std::ios::app);
    if (!metrics_log) throw TrainingError("cannot open metrics log in " + config.out_dir.string());
  }

  const auto started = std::chrono::steady_clock::now();
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    Real epoch_loss = 0;
    for (const auto& batch : data::batchify(items.size(), config.batch_size, rng)) {
      auto per_example = run_batch(model, items, batch, config.threads);

      ad::Gradients mean;
      for (std::size_t k = 0; k < per_example.size(); ++k) {
        const Real loss = per_example[k].loss;
        if (!std::isfinite(loss)) {
          throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) + " on example '" +
                              items[batch[k]].source->id + "'");
        }
        epoch_loss += loss;
        for (auto& [name, g] : per_example[k].gradients) {
          auto it = mean.find(name);
          if (it == mean.end()) {
            mean.emplace(name, std::move(g));
          } else {
            for (std::size_t i = 0; i < g.size(); ++i) it->second[i] += g[i];
          }
        }
      }
      const Real inv = Real(1) / static_cast<Real>(batch.size());
      for (auto& [name, g] : mean)
        for (Real& v : g.data()) v *= inv;
      if (config.clip_norm) clip_gradients(mean, *config.clip_norm);
      try {
        adamax_step(model.params(), mean, state, config.learning_rate);
      } catch (const NonFiniteGradient& e) {
        throw TrainingError(std::string(e.what()) + " at epoch " + std::to_string(epoch) + ", step " +
                            std::to_string(state.t + 1));
      }
      ++result.steps;
    }

    EpochMetrics m;
    m.epoch = epoch;
    m.train_loss = epoch_loss / static_cast<Real>(items.size());
    bool improved = false;
    if (!dev_set.empty()) {
      const auto report = evaluation::evaluate(decoding::predict({&model}, dev_set, config.dev_decode), dev_set);
      m.dev_em = report.em;
      m.dev_f1 = report.f1;
      if (result.best_epoch == 0 || report.f1 > result.best_dev_f1) {
        result.best_epoch = epoch;
        result.best_dev_f1 = report.f1;
        best = model.params();
        improved = true;
        since_best = 0;
      } else {
        ++since_best;
      }
    }
    m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    result.epochs.push_back(m);

    if (!config.out_dir.empty()) {
      metrics_log << metrics_json(m).dump() << '\n' << std::flush;
      model::save_checkpoint(model, config.out_dir / "last.ckpt");
      if (improved) model::save_checkpoint(model, config.out_dir / "best.ckpt");
      if (config.checkpoint_every > 0 && epoch % config.checkpoint_every == 0) {
        model::save_checkpoint(model, config.out_dir / ("epoch-" + std::to_string(epoch) + ".ckpt"));
      }
    }
    if (on_epoch) on_epoch(m);

    if (config.target_dev_em && m.dev_em && *m.dev_em >= *config.target_dev_em) {
      result.reached_target = true;
      break;
    }
    if (!dev_set.empty() && config.patience > 0 && since_best >= config.patience) {
      result.stopped_early = true;
      break;
    }
  }

  if (config.restore_best && result.best_epoch > 0) model.params() = best;
  return result;
}

}  // namespace mlstm::training
