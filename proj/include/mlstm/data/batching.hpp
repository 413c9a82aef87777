#pragma once

#include <cstddef>
#include <random>
#include <vector>

namespace mlstm::data {

using Batch = std::vector<std::size_t>;

/// Shuffles example indices [0, count) with `rng` and cuts them into
/// consecutive batches of `batch_size`; the final partial batch is kept.
std::vector<Batch> batchify(std::size_t count, std::size_t batch_size, std::mt19937_64& rng);

}  // namespace mlstm::data
