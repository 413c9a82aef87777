#include "mlstm/model/params.hpp"

#include <stdexcept>

namespace mlstm::model {
namespace {

void add_lstm(std::vector<ParamSpec>& out, const std::string& prefix, std::size_t input,
              std::size_t hidden, bool output_gate) {
  const std::string gates = output_gate ? "ifco" : "ifc";
  for (char g : gates) out.push_back({prefix + ".W" + g, {hidden, input}, Init::kUniform});
  for (char g : gates) out.push_back({prefix + ".U" + g, {hidden, hidden}, Init::kUniform});
  for (char g : gates) {
    out.push_back({prefix + ".b" + g, {hidden, 1}, g == 'f' ? Init::kOne : Init::kZero});
  }
}

void add_pointer(std::vector<ParamSpec>& out, const std::string& prefix, std::size_t l) {
  out.push_back({prefix + ".V", {l, 2 * l}, Init::kUniform});
  out.push_back({prefix + ".Wa", {l, l}, Init::kUniform});
  out.push_back({prefix + ".ba", {l, 1}, Init::kZero});
  out.push_back({prefix + ".v", {l, 1}, Init::kUniform});
  out.push_back({prefix + ".c", {1, 1}, Init::kZero});
  add_lstm(out, prefix + ".lstm", 2 * l, l, /*output_gate=*/true);
}

}  // namespace

std::string_view head_name(HeadKind head) {
  return head == HeadKind::kBoundary ? "boundary" : "sequence";
}

HeadKind parse_head(std::string_view name) {
  if (name == "boundary") return HeadKind::kBoundary;
  if (name == "sequence") return HeadKind::kSequence;
  throw std::invalid_argument("unknown head kind '" + std::string(name) + "'");
}

void ModelConfig::validate() const {
  if (hidden_dim < 1) throw std::invalid_argument("hidden dimension must be at least 1");
  if (embed_dim < 1) throw std::invalid_argument("embedding dimension must be at least 1");
  if (bi_answer_pointer && head != HeadKind::kBoundary) {
    throw std::invalid_argument("bi-directional answer pointer requires the boundary head");
  }
}

nlohmann::json ModelConfig::to_json() const {
  return {{"hidden_dim", hidden_dim},       {"embed_dim", embed_dim},
          {"head", std::string(head_name(head))}, {"bi_preprocess", bi_preprocess},
          {"bi_answer_pointer", bi_answer_pointer}, {"shared_preprocess", shared_preprocess}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.hidden_dim = j.at("hidden_dim").get<std::size_t>();
  c.embed_dim = j.at("embed_dim").get<std::size_t>();
  c.head = parse_head(j.at("head").get<std::string>());
  c.bi_preprocess = j.at("bi_preprocess").get<bool>();
  c.bi_answer_pointer = j.at("bi_answer_pointer").get<bool>();
  c.shared_preprocess = j.at("shared_preprocess").get<bool>();
  c.validate();
  return c;
}

std::vector<ParamSpec> parameter_layout(const ModelConfig& config) {
  config.validate();
  const std::size_t l = config.hidden_dim, d = config.embed_dim;
  std::vector<ParamSpec> out;

  const std::vector<std::string> streams =
      config.shared_preprocess ? std::vector<std::string>{"pre"} : std::vector<std::string>{"pre_p", "pre_q"};
  for (const auto& s : streams) {
    add_lstm(out, s, d, l, /*output_gate=*/false);
    if (config.bi_preprocess) {
      add_lstm(out, s + "_rev", d, l, /*output_gate=*/false);
      out.push_back({s + "_proj", {l, 2 * l}, Init::kUniform});
    }
  }

  out.push_back({"att.Wq", {l, l}, Init::kUniform});
  out.push_back({"att.Wp", {l, l}, Init::kUniform});
  out.push_back({"att.Wr", {l, l}, Init::kUniform});
  out.push_back({"att.bp", {l, 1}, Init::kZero});
  out.push_back({"att.w", {l, 1}, Init::kUniform});
  out.push_back({"att.b", {1, 1}, Init::kZero});
  add_lstm(out, "match_fwd", 2 * l, l, /*output_gate=*/true);
  add_lstm(out, "match_bwd", 2 * l, l, /*output_gate=*/true);

  add_pointer(out, "ptr", l);
  if (config.bi_answer_pointer) add_pointer(out, "ptr_rev", l);
  return out;
}

ModelParams ModelParams::initialize(const ModelConfig& config, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-0.05, 0.05);
  ModelParams p;
  for (const ParamSpec& spec : parameter_layout(config)) {
    Tensor t(spec.shape);
    switch (spec.init) {
      case Init::kUniform:
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<Real>(dist(rng));
        break;
      case Init::kZero:
        break;
      case Init::kOne:
        t.fill(Real(1));
        break;
    }
    p.add(spec.name, std::move(t));
  }
  return p;
}

ModelParams ModelParams::zeros(const ModelConfig& config) {
  ModelParams p;
  for (const ParamSpec& spec : parameter_layout(config)) p.add(spec.name, Tensor(spec.shape));
  return p;
}

const Tensor& ModelParams::at(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("no parameter named '" + name + "'");
  return values_[it->second];
}

Tensor& ModelParams::at(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("no parameter named '" + name + "'");
  return values_[it->second];
}

void ModelParams::add(std::string name, Tensor value) {
  if (index_.count(name)) throw std::invalid_argument("duplicate parameter '" + name + "'");
  index_[name] = values_.size();
  names_.push_back(std::move(name));
  values_.push_back(std::move(value));
}

std::size_t ModelParams::scalar_count() const {
  std::size_t n = 0;
  for (const auto& v : values_) n += v.size();
  return n;
}

bool ModelParams::operator==(const ModelParams& other) const {
  return names_ == other.names_ && values_ == other.values_;
}

}  // namespace mlstm::model
