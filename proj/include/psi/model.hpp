#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "psi/data.hpp"
#include "psi/encoder.hpp"
#include "psi/interaction.hpp"

namespace psi {

// Everything trainable. The interaction head is absent for plain
// cross-entropy baselines and may be stripped from saved checkpoints;
// test-time prediction never touches it.
struct Model {
  DeskEncoder encoder;
  std::optional<InteractionHead> head;
  SharedClassifier classifier;

  static Model create(const EncoderConfig& cfg, MutualOp op,
                      std::uint64_t seed);
  static Model create_baseline(const EncoderConfig& cfg, std::uint64_t seed);

  // Optimizer partition: backbone vs interaction head + classifier.
  std::vector<Tensor> backbone_parameters() const;
  std::vector<Tensor> interaction_parameters() const;
  std::vector<Tensor> parameters() const;
  void zero_grad() const;
};

// Self-contained snapshot: model parameters plus the vocabulary and encode
// length they were trained with.
struct Checkpoint {
  Model model;
  Vocabulary vocab;
  std::size_t max_len = 85;
};

nlohmann::json checkpoint_to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt,
                     const nlohmann::json* optimizer_state = nullptr);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace psi
