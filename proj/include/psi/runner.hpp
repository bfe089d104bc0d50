#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "psi/config.hpp"
#include "psi/evaluator.hpp"
#include "psi/trainer.hpp"

namespace psi {

struct TrainOutputs {
  TrainReport report;
  std::filesystem::path config_path;
  std::filesystem::path checkpoint_path;
  std::filesystem::path log_path;
  std::filesystem::path report_path;
  std::filesystem::path metrics_path;  // empty when the dataset has no test split
};

// Full training run: loads data, trains, writes config echo, checkpoint,
// per-epoch log, report and final metrics under cfg.out_dir.
TrainOutputs run_train(const RunConfig& cfg);

Metrics run_eval(const std::filesystem::path& checkpoint_path,
                 const std::string& data_path, const std::string& format,
                 const std::string& split,
                 const std::filesystem::path& out_path);

void run_export_embeddings(const std::filesystem::path& checkpoint_path,
                           const std::string& data_path,
                           const std::string& format, const std::string& split,
                           const std::filesystem::path& out_path);

// Pair-trace dump: per batch, one row per constructed pair with its distance.
void run_dump_pairs(const RunConfig& cfg, int n_batches,
                    const std::filesystem::path& out_path,
                    const std::optional<std::filesystem::path>& checkpoint_path);

// Enumerated variants per ablation axis, in table order.
std::vector<std::string> ablation_variants(const std::string& axis);

// Trains every variant of the axis on the shared dataset and base seed and
// writes ablation_<axis>.tsv plus ablation_<axis>.json under out_dir.
void run_ablation(const RunConfig& base, const std::string& axis,
                  const std::filesystem::path& out_dir);

}  // namespace psi
