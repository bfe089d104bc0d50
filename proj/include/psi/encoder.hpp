#pragma once

#include <cstdint>
#include <vector>

#include "psi/data.hpp"
#include "psi/tensor.hpp"

namespace psi {

struct EncoderConfig {
  std::size_t vocab_size = 0;
  std::size_t embed_dim = 64;
  std::size_t hidden_dim = 64;
  std::size_t output_dim = 64;  // dimension of the semantic vector
};

// Desk-scale semantic extractor: masked mean over token embeddings followed
// by a two-layer MLP with tanh hidden activation. A deliberate stand-in for
// a pretrained transformer backbone; mean pooling makes it order-invariant,
// which a real backbone is not.
class DeskEncoder {
 public:
  DeskEncoder() = default;
  DeskEncoder(const EncoderConfig& config, std::uint64_t seed);

  // Semantic vector for one instance, recorded on the tape. Only the
  // non-pad prefix of token_ids participates.
  Tensor extract(Tape& tape, const TokenizedInstance& instance) const;

  std::vector<Tensor> parameters() const;
  const EncoderConfig& config() const { return config_; }

  Tensor embedding;  // [vocab_size x embed_dim]
  Tensor w1, b1;     // embed_dim -> hidden_dim
  Tensor w2, b2;     // hidden_dim -> output_dim

 private:
  EncoderConfig config_;
};

}  // namespace psi
