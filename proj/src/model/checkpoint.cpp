#include "mlstm/model/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "json.hpp"

namespace mlstm::model {
namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'M', 'L', 'S', 'T', 'M', 'C', 'K', 'P'};

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

template <typename T>
void write_le(std::ostream& out, T v) {
  v = to_little(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_le(std::istream& in, const char* what) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw CheckpointError(std::string("truncated checkpoint while reading ") + what);
  }
  return to_little(v);
}

void write_tensor(std::ostream& out, const Tensor& t) {
  std::vector<double> buf(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) buf[i] = to_little(static_cast<double>(t[i]));
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(double)));
}

Tensor read_tensor(std::istream& in, Shape shape, const std::string& name) {
  std::vector<double> buf(shape.size());
  if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(double)))) {
    throw CheckpointError("truncated checkpoint payload for '" + name + "'");
  }
  Tensor t(shape);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<Real>(to_little(buf[i]));
  return t;
}

}  // namespace

void save_checkpoint(const Model& model, const std::filesystem::path& path) {
  json tensors = json::array();
  for (const auto& name : model.params().names()) {
    const Shape s = model.params().at(name).shape();
    tensors.push_back({{"name", name}, {"rows", s.rows}, {"cols", s.cols}});
  }
  tensors.push_back({{"name", kEmbeddingInput},
                     {"rows", model.embedding().rows()},
                     {"cols", model.embedding().cols()}});
  const json header = {{"config", model.config().to_json()},
                       {"vocabulary", model.vocab().tokens()},
                       {"tensors", tensors}};
  const std::string text = header.dump();

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::string tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot write " + tmp);
    out.write(kMagic, sizeof(kMagic));
    write_le<std::uint32_t>(out, kCheckpointVersion);
    write_le<std::uint64_t>(out, text.size());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto& name : model.params().names()) write_tensor(out, model.params().at(name));
    write_tensor(out, model.embedding());
    if (!out) throw CheckpointError("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

Model load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  char magic[sizeof(kMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw CheckpointError(path.string() + " is not a checkpoint file");
  }
  const auto version = read_le<std::uint32_t>(in, "version");
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto header_len = read_le<std::uint64_t>(in, "header length");
  if (header_len > (std::uint64_t{1} << 34)) throw CheckpointError("implausible header length");
  std::string text(header_len, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(header_len))) {
    throw CheckpointError("truncated checkpoint header");
  }

  json header;
  ModelConfig config;
  data::Vocabulary vocab;
  try {
    header = json::parse(text);
    config = ModelConfig::from_json(header.at("config"));
    vocab = data::Vocabulary(header.at("vocabulary").get<std::vector<std::string>>());
  } catch (const std::exception& e) {
    throw CheckpointError("bad checkpoint header in " + path.string() + ": " + e.what());
  }

  const auto layout = parameter_layout(config);
  const json& tensors = header.at("tensors");
  if (tensors.size() != layout.size() + 1) {
    throw CheckpointError("checkpoint lists " + std::to_string(tensors.size()) + " tensors, config expects " +
                          std::to_string(layout.size() + 1));
  }
  ModelParams params;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const json& t = tensors[i];
    const std::string name = t.at("name").get<std::string>();
    const Shape shape{t.at("rows").get<std::size_t>(), t.at("cols").get<std::size_t>()};
    if (name != layout[i].name || shape != layout[i].shape) {
      throw CheckpointError("tensor " + std::to_string(i) + " is '" + name + "' " + shape.str() +
                            ", config expects '" + layout[i].name + "' " + layout[i].shape.str());
    }
    params.add(name, read_tensor(in, shape, name));
  }
  const Shape emb_shape{config.embed_dim, vocab.size()};
  const json& e = tensors.back();
  if (e.at("name").get<std::string>() != kEmbeddingInput ||
      Shape{e.at("rows").get<std::size_t>(), e.at("cols").get<std::size_t>()} != emb_shape) {
    throw CheckpointError("embedding table entry does not match config and vocabulary");
  }
  Tensor embedding = read_tensor(in, emb_shape, kEmbeddingInput);
  if (in.peek() != std::char_traits<char>::eof()) throw CheckpointError("trailing bytes after payload");
  return Model(config, std::move(params), std::move(vocab), std::move(embedding));
}

}  // namespace mlstm::model
