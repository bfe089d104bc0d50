#include "psi/trainer.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "psi/error.hpp"
#include "psi/rng.hpp"

namespace psi {

namespace {

constexpr std::uint64_t kSamplerStream = 10;

double ordered_mean(const std::vector<double>& values) {
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc * (1.0 / static_cast<double>(values.size()));
}

}  // namespace

nlohmann::json epoch_to_json(const EpochRecord& rec) {
  nlohmann::json j;
  j["epoch"] = rec.epoch;
  j["loss"] = rec.loss;
  j["j_ce"] = rec.j_ce;
  j["j_rk"] = rec.j_rk;
  if (rec.eval) j["eval"] = metrics_to_json(*rec.eval);
  return j;
}

nlohmann::json report_to_json(const TrainReport& report) {
  nlohmann::json j;
  j["stopped_epoch"] = report.stopped_epoch;
  j["early_stopped"] = report.early_stopped;
  j["skipped_intra"] = report.skipped_intra;
  j["skipped_inter"] = report.skipped_inter;
  j["epochs"] = nlohmann::json::array();
  for (const EpochRecord& rec : report.epochs)
    j["epochs"].push_back(epoch_to_json(rec));
  return j;
}

Adam::Adam(std::vector<Tensor> params, double lr, double beta1, double beta2,
           double eps)
    : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2),
      eps_(eps) {
  if (lr <= 0.0) throw ConfigError("adam: learning rate must be positive");
  for (const Tensor& p : params_) {
    m_.emplace_back(p.size(), 0.0);
    v_.emplace_back(p.size(), 0.0);
  }
}

void Adam::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t pi = 0; pi < params_.size(); ++pi) {
    Tensor& p = params_[pi];
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double g = p.grad()[i];
      m_[pi][i] = beta1_ * m_[pi][i] + (1.0 - beta1_) * g;
      v_[pi][i] = beta2_ * v_[pi][i] + (1.0 - beta2_) * g * g;
      const double m_hat = m_[pi][i] / bc1;
      const double v_hat = v_[pi][i] / bc2;
      p.value()[i] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
    }
  }
}

void Adam::zero_grad() {
  for (Tensor& p : params_) p.zero_grad();
}

nlohmann::json Adam::state_to_json() const {
  nlohmann::json j;
  j["t"] = t_;
  j["lr"] = lr_;
  j["m"] = m_;
  j["v"] = v_;
  return j;
}

bool should_stop(const std::vector<double>& losses, int patience) {
  if (patience < 1) throw ConfigError("should_stop: patience must be >= 1");
  const std::size_t k = losses.size();
  if (k < static_cast<std::size_t>(patience) + 1) return false;
  const double reference = losses[k - patience - 1];
  for (std::size_t i = k - patience; i < k; ++i)
    if (losses[i] < reference) return false;
  return true;
}

namespace {

struct StepStats {
  double total = 0.0;
  double j_ce = 0.0;
  double j_rk = 0.0;
};

std::string batch_diagnostic(const std::vector<AspectInstance>& split,
                             const std::vector<std::size_t>& batch) {
  std::ostringstream os;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (i) os << ", ";
    os << split[batch[i]].sentence_id << "/" << split[batch[i]].aspect;
  }
  return os.str();
}

StepStats run_pair_step(const std::vector<AspectInstance>& split,
                        const std::vector<TokenizedInstance>& encoded,
                        const std::vector<std::size_t>& batch, Model& model,
                        const TrainConfig& cfg, Rng& rng, Adam& opt_backbone,
                        Adam& opt_head, TrainReport& report, int epoch,
                        int step) {
  Tape tape;
  std::vector<Tensor> vectors;
  std::vector<AspectInstance> batch_instances;
  std::vector<std::vector<double>> vector_values;
  vectors.reserve(batch.size());
  for (std::size_t idx : batch) {
    batch_instances.push_back(split[idx]);
    Tensor v = model.encoder.extract(tape, encoded[idx]);
    vector_values.push_back(v.value());
    vectors.push_back(std::move(v));
  }

  PairSet pair_set = build_pairs(batch_instances, vector_values, cfg.sampling, rng);
  report.skipped_intra += pair_set.skipped_intra;
  report.skipped_inter += pair_set.skipped_inter;
  if (pair_set.pairs.empty())
    throw PairingError("train: batch produced no pairs at epoch " +
                       std::to_string(epoch) + " step " + std::to_string(step));

  std::vector<Tensor> totals;
  std::vector<double> ce_values, rk_values;
  for (const SentencePair& pair : pair_set.pairs) {
    PairForward pf =
        model.head->forward(tape, vectors[pair.a], vectors[pair.b]);
    LossBreakdown loss = pair_loss(tape, pf, model.classifier,
                                   encoded[batch[pair.a]].label,
                                   encoded[batch[pair.b]].label, cfg.mu,
                                   cfg.epsilon);
    totals.push_back(loss.total);
    ce_values.push_back(loss.ce_value());
    rk_values.push_back(loss.rk_value());
  }

  Tensor batch_loss = tape.mean(totals);
  const double loss_value = batch_loss.item();
  if (!std::isfinite(loss_value))
    throw NumericError("train: non-finite loss at epoch " +
                       std::to_string(epoch) + " step " +
                       std::to_string(step) + " (batch: " +
                       batch_diagnostic(split, batch) + ")");

  opt_backbone.zero_grad();
  opt_head.zero_grad();
  tape.backward(batch_loss);
  opt_backbone.step();
  opt_head.step();

  return {loss_value, ordered_mean(ce_values), ordered_mean(rk_values)};
}

StepStats run_baseline_step(const std::vector<AspectInstance>& split,
                            const std::vector<TokenizedInstance>& encoded,
                            const std::vector<std::size_t>& batch,
                            Model& model, Adam& opt, int epoch, int step) {
  Tape tape;
  std::vector<Tensor> losses;
  for (std::size_t idx : batch) {
    Tensor vec = model.encoder.extract(tape, encoded[idx]);
    Tensor logits = model.classifier.logits(tape, vec);
    losses.push_back(
        tape.softmax_cross_entropy(logits,
                                   static_cast<std::size_t>(encoded[idx].label))
            .loss);
  }
  Tensor batch_loss = tape.mean(losses);
  const double loss_value = batch_loss.item();
  if (!std::isfinite(loss_value))
    throw NumericError("train: non-finite loss at epoch " +
                       std::to_string(epoch) + " step " +
                       std::to_string(step) + " (batch: " +
                       batch_diagnostic(split, batch) + ")");

  opt.zero_grad();
  tape.backward(batch_loss);
  opt.step();
  return {loss_value, loss_value, 0.0};
}

}  // namespace

TrainReport train(const std::vector<AspectInstance>& train_split,
                  const Vocabulary& vocab, std::size_t max_len, Model& model,
                  const TrainConfig& cfg,
                  const std::vector<AspectInstance>* eval_split) {
  if (cfg.epochs < 1) throw ConfigError("train: epochs must be >= 1");
  if (cfg.patience < 1) throw ConfigError("train: patience must be >= 1");
  if (train_split.empty()) throw ValidationError("train: empty training split");
  if (!cfg.baseline && !model.head)
    throw ConfigError("train: pair training needs an interaction head");

  std::vector<TokenizedInstance> encoded;
  encoded.reserve(train_split.size());
  for (const AspectInstance& inst : train_split)
    encoded.push_back(encode(inst, vocab, max_len));

  std::vector<TokenizedInstance> eval_encoded;
  if (eval_split)
    for (const AspectInstance& inst : *eval_split)
      eval_encoded.push_back(encode(inst, vocab, max_len));

  const std::size_t batch_size =
      static_cast<std::size_t>(cfg.sampling.n_polarities) *
      static_cast<std::size_t>(cfg.sampling.n_sentences);
  const std::size_t steps_per_epoch =
      (train_split.size() + batch_size - 1) / batch_size;

  Rng rng(derive_seed(cfg.seed, kSamplerStream));

  // Pair training partitions the parameters across two optimizers; the
  // baseline trains everything with one optimizer at the backbone rate.
  std::optional<Adam> opt_backbone, opt_head, opt_all;
  if (cfg.baseline) {
    opt_all.emplace(model.parameters(), cfg.lr_backbone, cfg.adam_beta1,
                    cfg.adam_beta2, cfg.adam_eps);
  } else {
    opt_backbone.emplace(model.backbone_parameters(), cfg.lr_backbone,
                         cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
    opt_head.emplace(model.interaction_parameters(), cfg.lr_psi,
                     cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
  }

  TrainReport report;
  std::vector<double> loss_history;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::vector<double> step_totals, step_ces, step_rks;

    if (cfg.baseline) {
      std::vector<std::size_t> order(train_split.size());
      std::iota(order.begin(), order.end(), 0);
      rng.shuffle(order);
      for (std::size_t start = 0; start < order.size(); start += batch_size) {
        const std::size_t end = std::min(start + batch_size, order.size());
        std::vector<std::size_t> batch(order.begin() + start,
                                       order.begin() + end);
        StepStats stats =
            run_baseline_step(train_split, encoded, batch, model, *opt_all,
                              epoch, static_cast<int>(start / batch_size));
        step_totals.push_back(stats.total);
        step_ces.push_back(stats.j_ce);
        step_rks.push_back(stats.j_rk);
      }
    } else {
      for (std::size_t step = 0; step < steps_per_epoch; ++step) {
        auto batch = sample_batch(train_split, cfg.sampling, rng);
        StepStats stats =
            run_pair_step(train_split, encoded, batch, model, cfg, rng,
                          *opt_backbone, *opt_head, report, epoch,
                          static_cast<int>(step));
        step_totals.push_back(stats.total);
        step_ces.push_back(stats.j_ce);
        step_rks.push_back(stats.j_rk);
      }
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = ordered_mean(step_totals);
    rec.j_ce = ordered_mean(step_ces);
    rec.j_rk = ordered_mean(step_rks);
    if (!eval_encoded.empty())
      rec.eval = evaluate(eval_encoded, model.encoder, model.classifier);
    report.epochs.push_back(std::move(rec));
    report.stopped_epoch = epoch;

    loss_history.push_back(report.epochs.back().loss);
    if (should_stop(loss_history, cfg.patience)) {
      report.early_stopped = true;
      break;
    }
  }

  if (cfg.baseline) {
    report.optimizer_state = {{"all", opt_all->state_to_json()}};
  } else {
    report.optimizer_state = {
        {"backbone", opt_backbone->state_to_json()},
        {"interaction", opt_head->state_to_json()},
    };
  }
  return report;
}

}  // namespace psi
