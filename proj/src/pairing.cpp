#include "psi/pairing.hpp"

#include <algorithm>
#include <cmath>

#include "psi/error.hpp"

namespace psi {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::interact_polarity: return "i_p";
    case Strategy::interact_aspect: return "i_a";
    case Strategy::interact_polarity_limit_aspect: return "i_p_and_l_a";
    case Strategy::interact_aspect_limit_polarity: return "i_a_and_l_p";
  }
  throw ValidationError("unknown strategy value");
}

std::string to_string(SimilarityMode m) {
  return m == SimilarityMode::random ? "random" : "sentence_distance";
}

std::string to_string(PairMode m) {
  switch (m) {
    case PairMode::similar: return "similar";
    case PairMode::dissimilar: return "dissimilar";
    case PairMode::off: return "off";
  }
  throw ValidationError("unknown pair mode value");
}

std::string to_string(PairKind k) {
  return k == PairKind::intra ? "intra" : "inter";
}

Strategy strategy_from_string(const std::string& s) {
  if (s == "i_p") return Strategy::interact_polarity;
  if (s == "i_a") return Strategy::interact_aspect;
  if (s == "i_p_and_l_a") return Strategy::interact_polarity_limit_aspect;
  if (s == "i_a_and_l_p") return Strategy::interact_aspect_limit_polarity;
  throw ConfigError("unknown strategy \"" + s + "\"");
}

SimilarityMode similarity_from_string(const std::string& s) {
  if (s == "random") return SimilarityMode::random;
  if (s == "sentence_distance") return SimilarityMode::sentence_distance;
  throw ConfigError("unknown similarity mode \"" + s + "\"");
}

PairMode pair_mode_from_string(const std::string& s) {
  if (s == "similar") return PairMode::similar;
  if (s == "dissimilar") return PairMode::dissimilar;
  if (s == "off") return PairMode::off;
  throw ConfigError("unknown pair mode \"" + s + "\"");
}

double euclidean_distance(std::span<const double> a,
                          std::span<const double> b) {
  if (a.size() != b.size())
    throw ShapeError("euclidean_distance: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

std::vector<std::size_t> sample_batch(const std::vector<AspectInstance>& train,
                                      const SamplingConfig& cfg, Rng& rng) {
  if (cfg.n_polarities < 1 || cfg.n_polarities > kNumPolarities)
    throw ConfigError("sample_batch: n_polarities must be in [1, 3]");
  if (cfg.n_sentences < 1)
    throw ConfigError("sample_batch: n_sentences must be at least 1");

  std::vector<int> polarities = {0, 1, 2};
  rng.shuffle(polarities);
  polarities.resize(cfg.n_polarities);

  std::vector<std::size_t> batch;
  batch.reserve(static_cast<std::size_t>(cfg.n_polarities) * cfg.n_sentences);
  for (int pol : polarities) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < train.size(); ++i)
      if (static_cast<int>(train[i].polarity) == pol) members.push_back(i);
    if (members.size() < static_cast<std::size_t>(cfg.n_sentences))
      throw SamplingError("sample_batch: polarity \"" +
                          to_string(static_cast<Polarity>(pol)) + "\" has " +
                          std::to_string(members.size()) +
                          " training instances, need " +
                          std::to_string(cfg.n_sentences));
    // partial Fisher-Yates: the first n_sentences entries are the draw
    for (int k = 0; k < cfg.n_sentences; ++k) {
      const std::size_t j =
          k + static_cast<std::size_t>(rng.uniform_int(members.size() - k));
      std::swap(members[k], members[j]);
      batch.push_back(members[k]);
    }
  }
  return batch;
}

namespace {

bool pair_allowed(const AspectInstance& a, const AspectInstance& b,
                  Strategy strategy, PairKind kind) {
  const bool same_pol = a.polarity == b.polarity;
  const bool same_aspect = a.aspect == b.aspect;
  const bool intra = kind == PairKind::intra;
  switch (strategy) {
    case Strategy::interact_polarity:
      return intra ? same_pol : !same_pol;
    case Strategy::interact_aspect:
      return intra ? same_aspect : !same_aspect;
    case Strategy::interact_polarity_limit_aspect:
      return same_aspect && (intra ? same_pol : !same_pol);
    case Strategy::interact_aspect_limit_polarity:
      return same_pol && (intra ? same_aspect : !same_aspect);
  }
  throw ValidationError("unknown strategy value");
}

}  // namespace

PairSet build_pairs(const std::vector<AspectInstance>& batch,
                    const std::vector<std::vector<double>>& vectors,
                    const SamplingConfig& cfg, Rng& rng) {
  if (batch.size() != vectors.size())
    throw ShapeError("build_pairs: one vector per batch instance required");

  PairSet out;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    for (PairKind kind : {PairKind::intra, PairKind::inter}) {
      const PairMode mode =
          kind == PairKind::intra ? cfg.intra_mode : cfg.inter_mode;
      if (cfg.similarity == SimilarityMode::sentence_distance &&
          mode == PairMode::off)
        continue;

      std::vector<std::size_t> pool;
      for (std::size_t j = 0; j < batch.size(); ++j) {
        if (j == i) continue;
        if (batch[j].sentence_id == batch[i].sentence_id &&
            batch[j].aspect == batch[i].aspect)
          continue;  // the same record twice is never a pair
        if (pair_allowed(batch[i], batch[j], cfg.strategy, kind))
          pool.push_back(j);
      }

      if (pool.empty()) {
        if (!cfg.skip_empty_pools)
          throw PairingError("build_pairs: no " + to_string(kind) +
                             " partner for batch instance " +
                             std::to_string(i) + " (" + batch[i].sentence_id +
                             ", " + batch[i].aspect + ")");
        if (kind == PairKind::intra)
          ++out.skipped_intra;
        else
          ++out.skipped_inter;
        continue;
      }

      std::size_t chosen;
      if (cfg.similarity == SimilarityMode::random) {
        chosen = pool[rng.uniform_int(pool.size())];
      } else {
        chosen = pool.front();
        double best = euclidean_distance(vectors[i], vectors[chosen]);
        for (std::size_t k = 1; k < pool.size(); ++k) {
          const double d = euclidean_distance(vectors[i], vectors[pool[k]]);
          const bool better =
              mode == PairMode::similar ? d < best : d > best;
          if (better) {  // ties keep the earlier (lowest) index
            best = d;
            chosen = pool[k];
          }
        }
      }
      out.pairs.push_back(
          {i, chosen, kind, euclidean_distance(vectors[i], vectors[chosen])});
    }
  }
  return out;
}

}  // namespace psi
