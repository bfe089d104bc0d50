#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "psi/interaction.hpp"
#include "psi/trainer.hpp"

namespace psi {

// One run, fully specified. Defaults are the reference settings: length 85,
// 3 polarities x 4 sentences per batch, interactive-MLP mutual vector,
// similar/similar distance pairing, mu 1, margin 0.05, 20 epochs with
// patience 5, Adam at 1e-4 (backbone) and 2e-5 (head + classifier).
struct RunConfig {
  std::string data_path;
  std::string format = "jsonl";
  std::size_t max_len = 85;

  std::size_t embed_dim = 64;
  std::size_t hidden_dim = 64;
  std::size_t output_dim = 64;
  MutualOp mutual_op = MutualOp::interactive_mlp;

  TrainConfig train;

  std::string out_dir;
};

// Unknown keys are rejected so a typo cannot silently fall back to a default.
RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json run_config_to_json(const RunConfig& cfg);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace psi
