#pragma once

#include <cstddef>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mlstm/autodiff/tensor.hpp"

namespace mlstm::model {

enum class HeadKind { kSequence, kBoundary };

std::string_view head_name(HeadKind head);
HeadKind parse_head(std::string_view name);

struct ModelConfig {
  std::size_t hidden_dim = 150;  // l
  std::size_t embed_dim = 300;   // d
  HeadKind head = HeadKind::kBoundary;
  bool bi_preprocess = false;       // reversed preprocessing LSTM + 2l -> l projection
  bool bi_answer_pointer = false;   // second boundary head predicting (end, start)
  bool shared_preprocess = true;    // one preprocessing LSTM for passage and question

  void validate() const;
  nlohmann::json to_json() const;
  static ModelConfig from_json(const nlohmann::json& j);
  bool operator==(const ModelConfig&) const = default;
};

enum class Init { kUniform, kZero, kOne };

struct ParamSpec {
  std::string name;
  Shape shape;
  Init init = Init::kUniform;
};

/// Every learned tensor for `config`, in a fixed order. Names:
///   pre[_p|_q][_rev].{Wi,Wf,Wc,Ui,Uf,Uc,bi,bf,bc}   preprocessing LSTM (no output gate)
///   pre[_p|_q]_proj                                   2l -> l projection (bi_preprocess)
///   att.{Wq,Wp,Wr,bp,w,b}                             attention shared by both directions
///   match_fwd.*, match_bwd.*                          match-LSTMs over z_i (input 2l)
///   ptr.{V,Wa,ba,v,c}, ptr.lstm.*                     answer pointer + answer LSTM
///   ptr_rev.*                                         reverse-order boundary head
std::vector<ParamSpec> parameter_layout(const ModelConfig& config);

/// Named parameter tensors. Iteration order is the layout order.
class ModelParams {
 public:
  ModelParams() = default;

  /// uniform(-0.05, 0.05) weights, zero biases, forget-gate biases 1.
  static ModelParams initialize(const ModelConfig& config, std::mt19937_64& rng);
  static ModelParams zeros(const ModelConfig& config);

  const Tensor& at(const std::string& name) const;
  Tensor& at(const std::string& name);
  bool contains(const std::string& name) const { return index_.count(name) > 0; }

  void add(std::string name, Tensor value);
  const std::vector<std::string>& names() const { return names_; }
  std::size_t count() const { return names_.size(); }
  std::size_t scalar_count() const;

  bool operator==(const ModelParams& other) const;

 private:
  std::vector<std::string> names_;
  std::vector<Tensor> values_;
  std::map<std::string, std::size_t> index_;
};

}  // namespace mlstm::model
