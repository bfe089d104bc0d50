#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "psi/error.hpp"
#include "psi/runner.hpp"

namespace {

// Flag values parked here until we know which ones were actually set; file
// config loads first, explicit flags win.
struct Overrides {
  std::string data, format, out_dir;
  std::size_t max_len = 0, embed_dim = 0, hidden_dim = 0, output_dim = 0;
  std::string mutual_op, strategy, similarity, intra_mode, inter_mode;
  int epochs = 0, patience = 0, np = 0, ns = 0;
  double lr_backbone = 0, lr_psi = 0, mu = 0, epsilon = 0;
  std::uint64_t seed = 0;
  bool baseline = false, skip_empty_pools = false;
};

void add_config_options(CLI::App* cmd, std::string& config_path, Overrides& ov) {
  cmd->add_option("--config", config_path, "json config file")->take_last();
  cmd->add_option("--data", ov.data, "dataset path (jsonl or tsv)")->take_last();
  cmd->add_option("--format", ov.format, "jsonl | tsv")->take_last();
  cmd->add_option("--out", ov.out_dir, "output directory")->take_last();
  cmd->add_option("--max-len", ov.max_len, "token sequence length")->take_last();
  cmd->add_option("--embed-dim", ov.embed_dim, "embedding width")->take_last();
  cmd->add_option("--hidden-dim", ov.hidden_dim, "encoder hidden width")->take_last();
  cmd->add_option("--output-dim", ov.output_dim, "semantic vector width")->take_last();
  cmd->add_option("--mutual-op", ov.mutual_op,
                  "interactive_mlp | sum | product | subtract_square | individual")->take_last();
  cmd->add_option("--epochs", ov.epochs, "training epochs")->take_last();
  cmd->add_option("--patience", ov.patience, "early-stop patience")->take_last();
  cmd->add_option("--lr-backbone", ov.lr_backbone, "encoder learning rate")->take_last();
  cmd->add_option("--lr-psi", ov.lr_psi, "head + classifier learning rate")->take_last();
  cmd->add_option("--mu", ov.mu, "ranking-term coefficient")->take_last();
  cmd->add_option("--epsilon", ov.epsilon, "ranking margin")->take_last();
  cmd->add_option("--np", ov.np, "polarities per batch")->take_last();
  cmd->add_option("--ns", ov.ns, "sentences per polarity")->take_last();
  cmd->add_option("--strategy", ov.strategy,
                  "i_p | i_a | i_p_and_l_a | i_a_and_l_p")->take_last();
  cmd->add_option("--similarity", ov.similarity, "sentence_distance | random")->take_last();
  cmd->add_option("--intra-mode", ov.intra_mode, "similar | dissimilar | off")->take_last();
  cmd->add_option("--inter-mode", ov.inter_mode, "similar | dissimilar | off")->take_last();
  cmd->add_option("--seed", ov.seed, "run seed")->take_last();
  cmd->add_flag("--baseline", ov.baseline, "plain CE training, no pairs");
  cmd->add_flag("--skip-empty-pools", ov.skip_empty_pools,
                "skip instances with no pair candidates instead of aborting");
}

psi::RunConfig resolve_config(const CLI::App* cmd, const std::string& config_path,
                              const Overrides& ov) {
  psi::RunConfig cfg;
  if (!config_path.empty()) cfg = psi::load_run_config(config_path);

  const auto set = [&](const char* flag) { return cmd->count(flag) > 0; };
  if (set("--data")) cfg.data_path = ov.data;
  if (set("--format")) cfg.format = ov.format;
  if (set("--out")) cfg.out_dir = ov.out_dir;
  if (set("--max-len")) cfg.max_len = ov.max_len;
  if (set("--embed-dim")) cfg.embed_dim = ov.embed_dim;
  if (set("--hidden-dim")) cfg.hidden_dim = ov.hidden_dim;
  if (set("--output-dim")) cfg.output_dim = ov.output_dim;
  if (set("--mutual-op"))
    cfg.mutual_op = psi::mutual_op_from_string(ov.mutual_op);
  if (set("--epochs")) cfg.train.epochs = ov.epochs;
  if (set("--patience")) cfg.train.patience = ov.patience;
  if (set("--lr-backbone")) cfg.train.lr_backbone = ov.lr_backbone;
  if (set("--lr-psi")) cfg.train.lr_psi = ov.lr_psi;
  if (set("--mu")) cfg.train.mu = ov.mu;
  if (set("--epsilon")) cfg.train.epsilon = ov.epsilon;
  if (set("--np")) cfg.train.sampling.n_polarities = ov.np;
  if (set("--ns")) cfg.train.sampling.n_sentences = ov.ns;
  if (set("--strategy"))
    cfg.train.sampling.strategy = psi::strategy_from_string(ov.strategy);
  if (set("--similarity"))
    cfg.train.sampling.similarity = psi::similarity_from_string(ov.similarity);
  if (set("--intra-mode"))
    cfg.train.sampling.intra_mode = psi::pair_mode_from_string(ov.intra_mode);
  if (set("--inter-mode"))
    cfg.train.sampling.inter_mode = psi::pair_mode_from_string(ov.inter_mode);
  if (set("--seed")) {
    cfg.train.seed = ov.seed;
    cfg.train.sampling.seed = ov.seed;
  }
  if (set("--baseline")) cfg.train.baseline = ov.baseline;
  if (set("--skip-empty-pools"))
    cfg.train.sampling.skip_empty_pools = ov.skip_empty_pools;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pairwise semantic interaction trainer for aspect-based "
               "sentiment classification"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides ov;

  auto* cmd_train = app.add_subcommand("train", "train a model");
  add_config_options(cmd_train, config_path, ov);

  auto* cmd_eval = app.add_subcommand("eval", "evaluate a checkpoint");
  std::string eval_ckpt, eval_data, eval_format = "jsonl",
              eval_split = "test", eval_out = "metrics.json";
  cmd_eval->add_option("--checkpoint", eval_ckpt)->required();
  cmd_eval->add_option("--data", eval_data)->required();
  cmd_eval->add_option("--format", eval_format, "jsonl | tsv");
  cmd_eval->add_option("--split", eval_split, "train | test");
  cmd_eval->add_option("--out", eval_out, "metrics json path");

  auto* cmd_ablate = app.add_subcommand("ablate", "run one ablation axis");
  std::string axis;
  add_config_options(cmd_ablate, config_path, ov);
  cmd_ablate->add_option("--axis", axis,
                         "mutual_op | np_ns | similarity | ranking_reg")
      ->required();

  auto* cmd_export = app.add_subcommand("export-embeddings",
                                        "dump semantic vectors as tsv");
  std::string exp_ckpt, exp_data, exp_format = "jsonl", exp_split = "test",
              exp_out = "embeddings.tsv";
  cmd_export->add_option("--checkpoint", exp_ckpt)->required();
  cmd_export->add_option("--data", exp_data)->required();
  cmd_export->add_option("--format", exp_format, "jsonl | tsv");
  cmd_export->add_option("--split", exp_split, "train | test");
  cmd_export->add_option("--out", exp_out, "output tsv path");

  auto* cmd_pairs = app.add_subcommand("dump-pairs",
                                       "trace batch pair construction");
  add_config_options(cmd_pairs, config_path, ov);
  int n_batches = 1;
  std::string pairs_out = "pairs.tsv";
  std::string pairs_ckpt;
  cmd_pairs->add_option("--batches", n_batches, "number of batches to trace");
  cmd_pairs->add_option("--pairs-out", pairs_out, "output tsv path");
  cmd_pairs->add_option("--checkpoint", pairs_ckpt,
                        "use a trained encoder for the distances");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_train->parsed()) {
      psi::run_train(resolve_config(cmd_train, config_path, ov));
    } else if (cmd_eval->parsed()) {
      psi::run_eval(eval_ckpt, eval_data, eval_format, eval_split, eval_out);
    } else if (cmd_ablate->parsed()) {
      psi::RunConfig cfg = resolve_config(cmd_ablate, config_path, ov);
      if (cfg.out_dir.empty())
        throw psi::ConfigError("ablate: out_dir not set");
      psi::run_ablation(cfg, axis, cfg.out_dir);
    } else if (cmd_export->parsed()) {
      psi::run_export_embeddings(exp_ckpt, exp_data, exp_format, exp_split,
                                 exp_out);
    } else if (cmd_pairs->parsed()) {
      psi::RunConfig cfg = resolve_config(cmd_pairs, config_path, ov);
      std::optional<std::filesystem::path> ckpt;
      if (!pairs_ckpt.empty()) ckpt = pairs_ckpt;
      psi::run_dump_pairs(cfg, n_batches, pairs_out, ckpt);
    }
  } catch (const psi::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
