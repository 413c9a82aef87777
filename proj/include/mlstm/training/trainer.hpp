#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mlstm/data/squad.hpp"
#include "mlstm/decoding/decode.hpp"
#include "mlstm/model/model.hpp"
#include "mlstm/training/adamax.hpp"

namespace mlstm::training {

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainConfig {
  Real learning_rate = Real(0.002);
  std::size_t batch_size = 30;
  std::size_t max_epochs = 10;
  std::uint64_t seed = 1;
  std::size_t checkpoint_every = 0;   // periodic epoch-N checkpoints; 0 = off
  std::optional<Real> clip_norm;      // global gradient norm clip
  std::size_t patience = 3;           // epochs without dev F1 improvement; 0 = never stop early
  std::size_t threads = 1;
  std::filesystem::path out_dir;      // empty: no checkpoints or metrics log
  decoding::DecodeConfig dev_decode;  // used for the per-epoch dev score
  bool restore_best = true;           // leave the best-dev parameters in the model
  std::optional<double> target_dev_em;  // stop once dev EM reaches this

  void validate() const;
};

struct EpochMetrics {
  std::size_t epoch = 0;  // 1-based
  Real train_loss = 0;    // mean per-example loss over the epoch
  std::optional<double> dev_em;
  std::optional<double> dev_f1;
  double wall_seconds = 0;  // since training started
};

struct TrainResult {
  std::vector<EpochMetrics> epochs;
  std::size_t best_epoch = 0;  // 0 when there is no dev set
  double best_dev_f1 = 0;
  bool stopped_early = false;   // patience ran out
  bool reached_target = false;  // target_dev_em was met
  std::size_t steps = 0;
};

using EpochCallback = std::function<void(const EpochMetrics&)>;

/// Minibatch Adamax on the mean per-example loss. Examples are shuffled each
/// epoch from `config.seed`; per-example gradients are summed in example
/// order whatever the thread count, so results do not depend on threading.
/// The embedding table is never touched. Only the first gold span of each
/// training example is used as the target.
TrainResult train(model::Model& model, const std::vector<data::TokenizedExample>& train_set,
                  const std::vector<data::TokenizedExample>& dev_set, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

/// Mean loss over the first gold span of each example.
Real mean_loss(const model::Model& model, const std::vector<data::TokenizedExample>& examples);

}  // namespace mlstm::training
