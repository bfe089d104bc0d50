#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "psi/data.hpp"
#include "psi/rng.hpp"

namespace psi {

// Which relation defines intra (first listed) and inter (second) pairs:
//   interact_polarity            same / different polarity, any aspect
//   interact_aspect              same / different aspect, any polarity
//   interact_polarity_limit_aspect  same / different polarity, aspect fixed
//   interact_aspect_limit_polarity  same / different aspect, polarity fixed
enum class Strategy {
  interact_polarity,
  interact_aspect,
  interact_polarity_limit_aspect,
  interact_aspect_limit_polarity,
};

enum class SimilarityMode { random, sentence_distance };
enum class PairMode { similar, dissimilar, off };
enum class PairKind { intra, inter };

std::string to_string(Strategy s);
std::string to_string(SimilarityMode m);
std::string to_string(PairMode m);
std::string to_string(PairKind k);
Strategy strategy_from_string(const std::string& s);
SimilarityMode similarity_from_string(const std::string& s);
PairMode pair_mode_from_string(const std::string& s);

struct SamplingConfig {
  int n_polarities = 3;  // polarities drawn per batch, 1..3
  int n_sentences = 4;   // instances drawn per polarity
  Strategy strategy = Strategy::interact_polarity;
  SimilarityMode similarity = SimilarityMode::sentence_distance;
  PairMode intra_mode = PairMode::similar;
  PairMode inter_mode = PairMode::similar;
  std::uint64_t seed = 1;
  // Ablation runs skip instances whose candidate pool is empty instead of
  // aborting; default training is strict.
  bool skip_empty_pools = false;
};

struct SentencePair {
  std::size_t a = 0;  // batch indices
  std::size_t b = 0;
  PairKind kind = PairKind::intra;
  double distance = 0.0;
};

struct PairSet {
  std::vector<SentencePair> pairs;
  std::size_t skipped_intra = 0;
  std::size_t skipped_inter = 0;
};

// Draw n_polarities distinct polarities, then n_sentences instances of each,
// uniformly without replacement. Returns indices into train.
std::vector<std::size_t> sample_batch(const std::vector<AspectInstance>& train,
                                      const SamplingConfig& cfg, Rng& rng);

// One intra and one inter partner per batch instance (per the active modes).
// Candidates are filtered by the strategy, then the partner is the
// nearest/farthest by Euclidean distance over the given vectors, or uniform
// under the random similarity mode. Distance ties break toward the lowest
// batch index.
PairSet build_pairs(const std::vector<AspectInstance>& batch,
                    const std::vector<std::vector<double>>& vectors,
                    const SamplingConfig& cfg, Rng& rng);

double euclidean_distance(std::span<const double> a, std::span<const double> b);

}  // namespace psi
