#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "psi/data.hpp"
#include "psi/evaluator.hpp"
#include "psi/model.hpp"
#include "psi/pairing.hpp"

namespace psi {

struct TrainConfig {
  int epochs = 20;
  int patience = 5;
  double lr_backbone = 1e-4;  // encoder optimizer
  double lr_psi = 2e-5;       // interaction head + classifier optimizer
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double mu = 1.0;       // ranking-term coefficient
  double epsilon = 0.05; // ranking margin
  std::uint64_t seed = 1;
  SamplingConfig sampling;
  // Plain cross entropy on single instances, no pair interaction, one
  // optimizer at lr_backbone over encoder + classifier. Batches are chunks
  // of a per-epoch shuffle instead of the polarity-balanced sampler.
  bool baseline = false;
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double loss = 0.0;
  double j_ce = 0.0;
  double j_rk = 0.0;
  std::optional<Metrics> eval;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  int stopped_epoch = 0;  // last epoch that ran
  bool early_stopped = false;
  std::size_t skipped_intra = 0;
  std::size_t skipped_inter = 0;
  nlohmann::json optimizer_state;  // for checkpointing
};

nlohmann::json epoch_to_json(const EpochRecord& rec);
nlohmann::json report_to_json(const TrainReport& report);

// Standard Adam with bias correction. Parameters alias the model's tensors.
class Adam {
 public:
  Adam(std::vector<Tensor> params, double lr, double beta1, double beta2,
       double eps);
  void step();
  void zero_grad();
  const std::vector<Tensor>& params() const { return params_; }
  nlohmann::json state_to_json() const;

 private:
  std::vector<Tensor> params_;
  std::vector<std::vector<double>> m_, v_;
  long t_ = 0;
  double lr_, beta1_, beta2_, eps_;
};

// True at the first epoch whose trailing `patience` losses all failed to
// drop below the loss recorded just before them.
bool should_stop(const std::vector<double>& losses, int patience);

TrainReport train(const std::vector<AspectInstance>& train_split,
                  const Vocabulary& vocab, std::size_t max_len, Model& model,
                  const TrainConfig& cfg,
                  const std::vector<AspectInstance>* eval_split = nullptr);

}  // namespace psi
