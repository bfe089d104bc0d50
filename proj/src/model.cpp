#include "psi/model.hpp"

#include <fstream>

#include "psi/error.hpp"
#include "psi/rng.hpp"

namespace psi {

namespace {

constexpr int kCheckpointVersion = 1;

// component seeds derived from one run seed
enum SeedStream : std::uint64_t {
  kEncoderStream = 1,
  kHeadStream = 2,
  kClassifierStream = 3,
};

nlohmann::json tensor_values(const Tensor& t) { return t.value(); }

void load_tensor(const nlohmann::json& j, const char* key, Tensor& t) {
  if (!j.contains(key))
    throw IoError(std::string("checkpoint: missing tensor \"") + key + "\"");
  const auto& arr = j.at(key);
  if (!arr.is_array() || arr.size() != t.size())
    throw IoError(std::string("checkpoint: tensor \"") + key + "\" has " +
                  std::to_string(arr.size()) + " values, expected " +
                  std::to_string(t.size()));
  for (std::size_t i = 0; i < t.size(); ++i)
    t.value()[i] = arr[i].get<double>();
}

}  // namespace

Model Model::create(const EncoderConfig& cfg, MutualOp op,
                    std::uint64_t seed) {
  Model m;
  m.encoder = DeskEncoder(cfg, derive_seed(seed, kEncoderStream));
  m.head.emplace(cfg.output_dim, op, derive_seed(seed, kHeadStream));
  m.classifier = SharedClassifier(kNumPolarities, cfg.output_dim,
                                  derive_seed(seed, kClassifierStream));
  return m;
}

Model Model::create_baseline(const EncoderConfig& cfg, std::uint64_t seed) {
  Model m;
  m.encoder = DeskEncoder(cfg, derive_seed(seed, kEncoderStream));
  m.classifier = SharedClassifier(kNumPolarities, cfg.output_dim,
                                  derive_seed(seed, kClassifierStream));
  return m;
}

std::vector<Tensor> Model::backbone_parameters() const {
  return encoder.parameters();
}

std::vector<Tensor> Model::interaction_parameters() const {
  std::vector<Tensor> out;
  if (head)
    for (const Tensor& t : head->parameters()) out.push_back(t);
  for (const Tensor& t : classifier.parameters()) out.push_back(t);
  return out;
}

std::vector<Tensor> Model::parameters() const {
  std::vector<Tensor> out = backbone_parameters();
  for (const Tensor& t : interaction_parameters()) out.push_back(t);
  return out;
}

void Model::zero_grad() const {
  for (const Tensor& t : parameters()) t.zero_grad();
}

nlohmann::json checkpoint_to_json(const Checkpoint& ckpt) {
  const Model& m = ckpt.model;
  nlohmann::json j;
  j["version"] = kCheckpointVersion;
  j["max_len"] = ckpt.max_len;
  j["vocab"] = ckpt.vocab.tokens();

  const EncoderConfig& ec = m.encoder.config();
  j["encoder"] = {
      {"vocab_size", ec.vocab_size},   {"embed_dim", ec.embed_dim},
      {"hidden_dim", ec.hidden_dim},   {"output_dim", ec.output_dim},
      {"embedding", tensor_values(m.encoder.embedding)},
      {"w1", tensor_values(m.encoder.w1)},
      {"b1", tensor_values(m.encoder.b1)},
      {"w2", tensor_values(m.encoder.w2)},
      {"b2", tensor_values(m.encoder.b2)},
  };

  if (m.head) {
    nlohmann::json h;
    h["op"] = to_string(m.head->op());
    h["dim"] = m.head->dim();
    if (m.head->w1.defined()) {
      h["w1"] = tensor_values(m.head->w1);
      h["b1"] = tensor_values(m.head->b1);
      h["w2"] = tensor_values(m.head->w2);
      h["b2"] = tensor_values(m.head->b2);
    }
    j["head"] = std::move(h);
  }

  j["classifier"] = {
      {"n_classes", m.classifier.n_classes()},
      {"dim", m.classifier.dim()},
      {"weight", tensor_values(m.classifier.weight)},
      {"bias", tensor_values(m.classifier.bias)},
  };
  return j;
}

Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  if (!j.contains("version") || j.at("version").get<int>() != kCheckpointVersion)
    throw IoError("checkpoint: unsupported or missing version");

  Checkpoint ckpt;
  ckpt.max_len = j.at("max_len").get<std::size_t>();
  ckpt.vocab = Vocabulary::from_tokens(
      j.at("vocab").get<std::vector<std::string>>());

  const auto& e = j.at("encoder");
  EncoderConfig cfg;
  cfg.vocab_size = e.at("vocab_size").get<std::size_t>();
  cfg.embed_dim = e.at("embed_dim").get<std::size_t>();
  cfg.hidden_dim = e.at("hidden_dim").get<std::size_t>();
  cfg.output_dim = e.at("output_dim").get<std::size_t>();
  if (cfg.vocab_size != ckpt.vocab.size())
    throw IoError("checkpoint: vocab_size disagrees with the stored vocabulary");

  ckpt.model.encoder = DeskEncoder(cfg, 0);
  load_tensor(e, "embedding", ckpt.model.encoder.embedding);
  load_tensor(e, "w1", ckpt.model.encoder.w1);
  load_tensor(e, "b1", ckpt.model.encoder.b1);
  load_tensor(e, "w2", ckpt.model.encoder.w2);
  load_tensor(e, "b2", ckpt.model.encoder.b2);

  if (j.contains("head")) {
    const auto& h = j.at("head");
    const MutualOp op = mutual_op_from_string(h.at("op").get<std::string>());
    const std::size_t dim = h.at("dim").get<std::size_t>();
    if (dim != cfg.output_dim)
      throw IoError("checkpoint: head dim disagrees with the encoder output");
    InteractionHead head(dim, op, 0);
    if (head.w1.defined()) {
      load_tensor(h, "w1", head.w1);
      load_tensor(h, "b1", head.b1);
      load_tensor(h, "w2", head.w2);
      load_tensor(h, "b2", head.b2);
    }
    ckpt.model.head = std::move(head);
  }

  const auto& c = j.at("classifier");
  const std::size_t n_classes = c.at("n_classes").get<std::size_t>();
  const std::size_t dim = c.at("dim").get<std::size_t>();
  if (n_classes != kNumPolarities)
    throw IoError("checkpoint: classifier must cover exactly " +
                  std::to_string(kNumPolarities) + " classes");
  if (dim != cfg.output_dim)
    throw IoError("checkpoint: classifier dim disagrees with the encoder output");
  ckpt.model.classifier = SharedClassifier(n_classes, dim, 0);
  load_tensor(c, "weight", ckpt.model.classifier.weight);
  load_tensor(c, "bias", ckpt.model.classifier.bias);
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt,
                     const nlohmann::json* optimizer_state) {
  nlohmann::json j = checkpoint_to_json(ckpt);
  if (optimizer_state) j["optimizer"] = *optimizer_state;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw IoError("failed while writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("checkpoint " + path.string() + ": " + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace psi
