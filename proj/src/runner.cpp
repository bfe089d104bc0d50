#include "psi/runner.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>

#include "psi/error.hpp"
#include "psi/pairing.hpp"
#include "psi/rng.hpp"

namespace psi {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed while writing " + path.string());
}

Model build_model(const RunConfig& cfg, std::size_t vocab_size) {
  EncoderConfig ec{vocab_size, cfg.embed_dim, cfg.hidden_dim, cfg.output_dim};
  return cfg.train.baseline ? Model::create_baseline(ec, cfg.train.seed)
                            : Model::create(ec, cfg.mutual_op, cfg.train.seed);
}

void print_counts(const char* label,
                  const std::array<std::size_t, kNumPolarities>& counts) {
  std::cout << label << ": positive " << counts[0] << ", neutral " << counts[1]
            << ", negative " << counts[2] << "\n";
}

std::string format_metrics(const Metrics& m) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "acc %.4f f1 %.4f", m.accuracy, m.macro_f1);
  return buf;
}

}  // namespace

TrainOutputs run_train(const RunConfig& cfg) {
  if (cfg.data_path.empty()) throw ConfigError("train: data path not set");
  if (cfg.out_dir.empty()) throw ConfigError("train: out_dir not set");

  const auto records =
      load_dataset(cfg.data_path, dataset_format_from_string(cfg.format));
  const auto train_split = filter_split(records, Split::train);
  const auto test_split = filter_split(records, Split::test);
  print_counts("train", count_polarities(records, Split::train));
  print_counts("test", count_polarities(records, Split::test));

  const Vocabulary vocab = Vocabulary::build(train_split);
  Model model = build_model(cfg, vocab.size());

  TrainReport report =
      train(train_split, vocab, cfg.max_len, model, cfg.train,
            test_split.empty() ? nullptr : &test_split);

  for (const EpochRecord& rec : report.epochs) {
    std::cout << "epoch " << rec.epoch << "/" << cfg.train.epochs << " loss "
              << rec.loss << " j_ce " << rec.j_ce << " j_rk " << rec.j_rk;
    if (rec.eval) std::cout << " | " << format_metrics(*rec.eval);
    std::cout << "\n";
  }
  if (report.early_stopped)
    std::cout << "early stop after epoch " << report.stopped_epoch << "\n";

  TrainOutputs out;
  out.report = report;
  std::filesystem::create_directories(cfg.out_dir);
  const std::filesystem::path dir = cfg.out_dir;

  out.config_path = dir / "config.json";
  write_text(out.config_path, run_config_to_json(cfg).dump(2) + "\n");

  out.checkpoint_path = dir / "checkpoint.json";
  Checkpoint ckpt{std::move(model), vocab, cfg.max_len};
  save_checkpoint(out.checkpoint_path, ckpt, &report.optimizer_state);

  out.log_path = dir / "train_log.jsonl";
  std::string log;
  for (const EpochRecord& rec : report.epochs)
    log += epoch_to_json(rec).dump() + "\n";
  write_text(out.log_path, log);

  out.report_path = dir / "report.json";
  write_text(out.report_path, report_to_json(report).dump(2) + "\n");

  if (!test_split.empty()) {
    std::vector<TokenizedInstance> encoded;
    for (const AspectInstance& inst : test_split)
      encoded.push_back(encode(inst, vocab, cfg.max_len));
    const Metrics final_metrics =
        evaluate(encoded, ckpt.model.encoder, ckpt.model.classifier);
    out.metrics_path = dir / "metrics.json";
    write_text(out.metrics_path, metrics_to_json(final_metrics).dump(2) + "\n");
    std::cout << "final " << format_metrics(final_metrics) << "\n";
  }
  return out;
}

Metrics run_eval(const std::filesystem::path& checkpoint_path,
                 const std::string& data_path, const std::string& format,
                 const std::string& split,
                 const std::filesystem::path& out_path) {
  const Checkpoint ckpt = load_checkpoint(checkpoint_path);
  const auto records =
      load_dataset(data_path, dataset_format_from_string(format));
  const auto instances = filter_split(records, split_from_string(split));
  std::vector<TokenizedInstance> encoded;
  for (const AspectInstance& inst : instances)
    encoded.push_back(encode(inst, ckpt.vocab, ckpt.max_len));
  const Metrics m = evaluate(encoded, ckpt.model.encoder, ckpt.model.classifier);
  write_text(out_path, metrics_to_json(m).dump(2) + "\n");
  std::cout << format_metrics(m) << "\n";
  return m;
}

void run_export_embeddings(const std::filesystem::path& checkpoint_path,
                           const std::string& data_path,
                           const std::string& format, const std::string& split,
                           const std::filesystem::path& out_path) {
  const Checkpoint ckpt = load_checkpoint(checkpoint_path);
  const auto records =
      load_dataset(data_path, dataset_format_from_string(format));
  const auto instances = filter_split(records, split_from_string(split));
  export_embeddings(instances, ckpt.vocab, ckpt.max_len, ckpt.model.encoder,
                    out_path);
  std::cout << "wrote " << instances.size() << " embeddings to "
            << out_path.string() << "\n";
}

void run_dump_pairs(
    const RunConfig& cfg, int n_batches, const std::filesystem::path& out_path,
    const std::optional<std::filesystem::path>& checkpoint_path) {
  if (n_batches < 1) throw ConfigError("dump-pairs: need at least one batch");
  const auto records =
      load_dataset(cfg.data_path, dataset_format_from_string(cfg.format));
  const auto train_split = filter_split(records, Split::train);

  Vocabulary vocab;
  Model model;
  std::size_t max_len = cfg.max_len;
  if (checkpoint_path) {
    Checkpoint ckpt = load_checkpoint(*checkpoint_path);
    vocab = std::move(ckpt.vocab);
    model = std::move(ckpt.model);
    max_len = ckpt.max_len;
  } else {
    vocab = Vocabulary::build(train_split);
    model = build_model(cfg, vocab.size());
  }

  std::ofstream out(out_path);
  if (!out) throw IoError("cannot write " + out_path.string());
  out << "batch\ta_sentence_id\ta_aspect\tb_sentence_id\tb_aspect\tkind\tdistance\n";

  Rng rng(derive_seed(cfg.train.seed, 10));
  char buf[32];
  for (int b = 0; b < n_batches; ++b) {
    const auto batch_idx = sample_batch(train_split, cfg.train.sampling, rng);
    std::vector<AspectInstance> batch;
    std::vector<std::vector<double>> vectors;
    Tape tape;
    for (std::size_t idx : batch_idx) {
      batch.push_back(train_split[idx]);
      vectors.push_back(
          model.encoder.extract(tape, encode(train_split[idx], vocab, max_len))
              .value());
    }
    const PairSet ps = build_pairs(batch, vectors, cfg.train.sampling, rng);
    for (const SentencePair& p : ps.pairs) {
      std::snprintf(buf, sizeof(buf), "%.9g", p.distance);
      out << b << "\t" << batch[p.a].sentence_id << "\t" << batch[p.a].aspect
          << "\t" << batch[p.b].sentence_id << "\t" << batch[p.b].aspect
          << "\t" << to_string(p.kind) << "\t" << buf << "\n";
    }
  }
  if (!out) throw IoError("failed while writing " + out_path.string());
}

std::vector<std::string> ablation_variants(const std::string& axis) {
  if (axis == "mutual_op")
    return {"individual", "sum", "product", "subtract_square",
            "interactive_mlp"};
  if (axis == "np_ns")
    return {"np2_ns3", "np2_ns4", "np2_ns5", "np3_ns3", "np3_ns4", "np3_ns5"};
  if (axis == "similarity")
    return {"random", "-/D", "-/S", "D/-", "S/-", "D/D", "S/D", "D/S", "S/S"};
  if (axis == "ranking_reg") return {"baseline", "psi_mu0", "psi_mu1"};
  throw ConfigError("unknown ablation axis \"" + axis + "\"");
}

namespace {

RunConfig variant_config(const RunConfig& base, const std::string& axis,
                         const std::string& name) {
  RunConfig cfg = base;
  cfg.train.sampling.skip_empty_pools = true;  // ablation mode
  if (axis == "mutual_op") {
    cfg.mutual_op = mutual_op_from_string(name);
    return cfg;
  }
  if (axis == "np_ns") {
    cfg.train.sampling.n_polarities = name[2] - '0';
    cfg.train.sampling.n_sentences = name[6] - '0';
    return cfg;
  }
  if (axis == "similarity") {
    if (name == "random") {
      cfg.train.sampling.similarity = SimilarityMode::random;
      return cfg;
    }
    cfg.train.sampling.similarity = SimilarityMode::sentence_distance;
    auto mode_of = [](char c) {
      switch (c) {
        case 'S': return PairMode::similar;
        case 'D': return PairMode::dissimilar;
        default: return PairMode::off;
      }
    };
    cfg.train.sampling.intra_mode = mode_of(name[0]);
    cfg.train.sampling.inter_mode = mode_of(name[2]);
    return cfg;
  }
  if (axis == "ranking_reg") {
    if (name == "baseline") {
      cfg.train.baseline = true;
    } else if (name == "psi_mu0") {
      cfg.train.mu = 0.0;
    } else {
      cfg.train.mu = 1.0;
    }
    return cfg;
  }
  throw ConfigError("unknown ablation axis \"" + axis + "\"");
}

}  // namespace

void run_ablation(const RunConfig& base, const std::string& axis,
                  const std::filesystem::path& out_dir) {
  const std::vector<std::string> variants = ablation_variants(axis);
  if (base.data_path.empty()) throw ConfigError("ablate: data path not set");

  const auto records =
      load_dataset(base.data_path, dataset_format_from_string(base.format));
  const auto train_split = filter_split(records, Split::train);
  const auto test_split = filter_split(records, Split::test);
  if (test_split.empty())
    throw ValidationError("ablate: dataset has no test split to compare on");
  const Vocabulary vocab = Vocabulary::build(train_split);

  std::filesystem::create_directories(out_dir);

  nlohmann::json table = nlohmann::json::array();
  std::string tsv =
      "variant\taccuracy\tmacro_f1\tacc_positive\tacc_neutral\tacc_negative\tstopped_epoch\n";
  char buf[160];

  for (const std::string& name : variants) {
    const RunConfig cfg = variant_config(base, axis, name);
    Model model = build_model(cfg, vocab.size());
    TrainReport report = train(train_split, vocab, cfg.max_len, model,
                               cfg.train, &test_split);

    std::vector<TokenizedInstance> encoded;
    for (const AspectInstance& inst : test_split)
      encoded.push_back(encode(inst, vocab, cfg.max_len));
    const Metrics m = evaluate(encoded, model.encoder, model.classifier);

    std::snprintf(buf, sizeof(buf), "%s\t%.4f\t%.4f\t%.4f\t%.4f\t%.4f\t%d\n",
                  name.c_str(), m.accuracy, m.macro_f1,
                  m.per_class_accuracy.at("positive"),
                  m.per_class_accuracy.at("neutral"),
                  m.per_class_accuracy.at("negative"), report.stopped_epoch);
    tsv += buf;
    std::cout << axis << " " << name << ": " << format_metrics(m) << "\n";

    nlohmann::json row;
    row["variant"] = name;
    row["config"] = run_config_to_json(cfg);
    row["metrics"] = metrics_to_json(m);
    row["report"] = report_to_json(report);
    table.push_back(std::move(row));
  }

  write_text(out_dir / ("ablation_" + axis + ".tsv"), tsv);
  write_text(out_dir / ("ablation_" + axis + ".json"), table.dump(2) + "\n");
}

}  // namespace psi
