#pragma once

#include <filesystem>
#include <stdexcept>

#include "mlstm/model/model.hpp"

namespace mlstm::model {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Layout:
//   8 bytes   magic "MLSTMCKP"
//   u32 LE    format version
//   u64 LE    header length N
//   N bytes   JSON header {config, vocabulary, tensors: [{name, rows, cols}]}
//   payload   every tensor in header order as float64 little-endian,
//             parameters first, the frozen embedding table last
inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const Model& model, const std::filesystem::path& path);
/// Validates magic, version, and every tensor shape against the stored config.
Model load_checkpoint(const std::filesystem::path& path);

}  // namespace mlstm::model
