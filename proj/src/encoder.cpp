#include "psi/encoder.hpp"

#include <cmath>
#include <span>

#include "psi/error.hpp"
#include "psi/rng.hpp"

namespace psi {

namespace {

Tensor init_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Tensor t = Tensor::zeros({rows, cols});
  const double stddev = 1.0 / std::sqrt(static_cast<double>(cols));
  for (double& v : t.value()) v = rng.normal(0.0, stddev);
  return t;
}

}  // namespace

DeskEncoder::DeskEncoder(const EncoderConfig& config, std::uint64_t seed)
    : config_(config) {
  if (config.vocab_size < 1 || config.embed_dim < 1 ||
      config.hidden_dim < 1 || config.output_dim < 1)
    throw ConfigError("encoder: all dimensions must be at least 1");
  Rng rng(seed);
  embedding = Tensor::zeros({config.vocab_size, config.embed_dim});
  for (double& v : embedding.value()) v = rng.uniform(-0.1, 0.1);
  w1 = init_matrix(config.hidden_dim, config.embed_dim, rng);
  b1 = Tensor::zeros({config.hidden_dim});
  w2 = init_matrix(config.output_dim, config.hidden_dim, rng);
  b2 = Tensor::zeros({config.output_dim});
}

Tensor DeskEncoder::extract(Tape& tape, const TokenizedInstance& instance) const {
  if (instance.attention_length == 0)
    throw ValidationError("extract: instance has no non-pad tokens");
  const std::span<const int> ids(instance.token_ids.data(),
                                 instance.attention_length);
  Tensor pooled = tape.embedding_mean(embedding, ids);
  Tensor hidden = tape.tanh(tape.add(tape.matmul(w1, pooled), b1));
  return tape.add(tape.matmul(w2, hidden), b2);
}

std::vector<Tensor> DeskEncoder::parameters() const {
  return {embedding, w1, b1, w2, b2};
}

}  // namespace psi
