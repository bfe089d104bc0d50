#include "psi/config.hpp"

#include <fstream>
#include <set>

#include "psi/error.hpp"

namespace psi {

namespace {

void reject_unknown_keys(const nlohmann::json& j, const char* section,
                         const std::set<std::string>& known) {
  for (const auto& [key, value] : j.items())
    if (!known.count(key))
      throw ConfigError(std::string("config: unknown key \"") + key +
                        "\" in " + section);
}

}  // namespace

RunConfig run_config_from_json(const nlohmann::json& j) {
  RunConfig cfg;
  reject_unknown_keys(
      j, "config",
      {"data", "encoder", "head", "sampling", "train", "seed", "out_dir"});

  if (j.contains("data")) {
    const auto& d = j.at("data");
    reject_unknown_keys(d, "data", {"path", "format", "max_len"});
    if (d.contains("path")) cfg.data_path = d.at("path").get<std::string>();
    if (d.contains("format")) {
      cfg.format = d.at("format").get<std::string>();
      dataset_format_from_string(cfg.format);  // validate
    }
    if (d.contains("max_len")) cfg.max_len = d.at("max_len").get<std::size_t>();
  }
  if (j.contains("encoder")) {
    const auto& e = j.at("encoder");
    reject_unknown_keys(e, "encoder", {"embed_dim", "hidden_dim", "output_dim"});
    if (e.contains("embed_dim"))
      cfg.embed_dim = e.at("embed_dim").get<std::size_t>();
    if (e.contains("hidden_dim"))
      cfg.hidden_dim = e.at("hidden_dim").get<std::size_t>();
    if (e.contains("output_dim"))
      cfg.output_dim = e.at("output_dim").get<std::size_t>();
  }
  if (j.contains("head")) {
    const auto& h = j.at("head");
    reject_unknown_keys(h, "head", {"mutual_op"});
    if (h.contains("mutual_op"))
      cfg.mutual_op = mutual_op_from_string(h.at("mutual_op").get<std::string>());
  }
  if (j.contains("sampling")) {
    const auto& s = j.at("sampling");
    reject_unknown_keys(s, "sampling",
                        {"n_polarities", "n_sentences", "strategy",
                         "similarity", "intra_mode", "inter_mode",
                         "skip_empty_pools"});
    SamplingConfig& sc = cfg.train.sampling;
    if (s.contains("n_polarities"))
      sc.n_polarities = s.at("n_polarities").get<int>();
    if (s.contains("n_sentences"))
      sc.n_sentences = s.at("n_sentences").get<int>();
    if (s.contains("strategy"))
      sc.strategy = strategy_from_string(s.at("strategy").get<std::string>());
    if (s.contains("similarity"))
      sc.similarity =
          similarity_from_string(s.at("similarity").get<std::string>());
    if (s.contains("intra_mode"))
      sc.intra_mode = pair_mode_from_string(s.at("intra_mode").get<std::string>());
    if (s.contains("inter_mode"))
      sc.inter_mode = pair_mode_from_string(s.at("inter_mode").get<std::string>());
    if (s.contains("skip_empty_pools"))
      sc.skip_empty_pools = s.at("skip_empty_pools").get<bool>();
  }
  if (j.contains("train")) {
    const auto& t = j.at("train");
    reject_unknown_keys(t, "train",
                        {"epochs", "patience", "lr_backbone", "lr_psi",
                         "adam_beta1", "adam_beta2", "adam_eps", "mu",
                         "epsilon", "baseline"});
    TrainConfig& tc = cfg.train;
    if (t.contains("epochs")) tc.epochs = t.at("epochs").get<int>();
    if (t.contains("patience")) tc.patience = t.at("patience").get<int>();
    if (t.contains("lr_backbone"))
      tc.lr_backbone = t.at("lr_backbone").get<double>();
    if (t.contains("lr_psi")) tc.lr_psi = t.at("lr_psi").get<double>();
    if (t.contains("adam_beta1"))
      tc.adam_beta1 = t.at("adam_beta1").get<double>();
    if (t.contains("adam_beta2"))
      tc.adam_beta2 = t.at("adam_beta2").get<double>();
    if (t.contains("adam_eps")) tc.adam_eps = t.at("adam_eps").get<double>();
    if (t.contains("mu")) tc.mu = t.at("mu").get<double>();
    if (t.contains("epsilon")) tc.epsilon = t.at("epsilon").get<double>();
    if (t.contains("baseline")) tc.baseline = t.at("baseline").get<bool>();
  }
  if (j.contains("seed")) {
    cfg.train.seed = j.at("seed").get<std::uint64_t>();
    cfg.train.sampling.seed = cfg.train.seed;
  }
  if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
  return cfg;
}

nlohmann::json run_config_to_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["data"] = {{"path", cfg.data_path},
               {"format", cfg.format},
               {"max_len", cfg.max_len}};
  j["encoder"] = {{"embed_dim", cfg.embed_dim},
                  {"hidden_dim", cfg.hidden_dim},
                  {"output_dim", cfg.output_dim}};
  j["head"] = {{"mutual_op", to_string(cfg.mutual_op)}};
  const SamplingConfig& sc = cfg.train.sampling;
  j["sampling"] = {{"n_polarities", sc.n_polarities},
                   {"n_sentences", sc.n_sentences},
                   {"strategy", to_string(sc.strategy)},
                   {"similarity", to_string(sc.similarity)},
                   {"intra_mode", to_string(sc.intra_mode)},
                   {"inter_mode", to_string(sc.inter_mode)},
                   {"skip_empty_pools", sc.skip_empty_pools}};
  const TrainConfig& tc = cfg.train;
  j["train"] = {{"epochs", tc.epochs},
                {"patience", tc.patience},
                {"lr_backbone", tc.lr_backbone},
                {"lr_psi", tc.lr_psi},
                {"adam_beta1", tc.adam_beta1},
                {"adam_beta2", tc.adam_beta2},
                {"adam_eps", tc.adam_eps},
                {"mu", tc.mu},
                {"epsilon", tc.epsilon},
                {"baseline", tc.baseline}};
  j["seed"] = cfg.train.seed;
  j["out_dir"] = cfg.out_dir;
  return j;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

}  // namespace psi
