#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "psi/tensor.hpp"

namespace psi {

// How the mutual vector for a pair is produced. interactive_mlp maps the
// concatenated pair through a small MLP; sum/product/subtract_square are
// parameter-free elementwise alternatives; individual drops the shared
// vector entirely and gates each sentence from its own mapped vector.
enum class MutualOp {
  interactive_mlp,
  sum,
  product,
  subtract_square,
  individual,
};

std::string to_string(MutualOp op);
MutualOp mutual_op_from_string(const std::string& s);

// The four attentive vectors of one pair plus everything they were built
// from. v*_self is v_i re-weighted by its own gate, v*_other by the partner's
// gate, both as residuals on v_i.
struct PairForward {
  Tensor v1, v2;
  Tensor v_m;  // undefined for the individual variant
  Tensor g1, g2;
  Tensor v1_self, v2_self, v1_other, v2_other;
};

// Gated residuals: v_i^self = v_i + v_i*g_i, v_i^other = v_i + v_i*g_j.
PairForward attentive_vectors(Tape& tape, const Tensor& v1, const Tensor& v2,
                              const Tensor& g1, const Tensor& g2);

// Pairwise interaction head. Owns the mutual-vector parameters (when the
// variant has any); dimension is the semantic vector size.
class InteractionHead {
 public:
  InteractionHead() = default;
  InteractionHead(std::size_t dim, MutualOp op, std::uint64_t seed);

  MutualOp op() const { return op_; }
  std::size_t dim() const { return dim_; }
  std::size_t hidden_dim() const { return hidden_; }

  // Mutual vector for the pair. Not defined for the individual variant.
  Tensor mutual_vector(Tape& tape, const Tensor& v1, const Tensor& v2) const;

  // Gate vectors for both sentences. For variants with a mutual vector,
  // g_i = sigmoid(v_m * v_i); the individual variant maps each vector
  // through its own MLP and gates on that directly.
  std::pair<Tensor, Tensor> gates(Tape& tape, const Tensor& v_m,
                                  const Tensor& v1, const Tensor& v2) const;

  // Full pair path: mutual vector, gates, attentive vectors.
  PairForward forward(Tape& tape, const Tensor& v1, const Tensor& v2) const;

  std::vector<Tensor> parameters() const;

  Tensor w1, b1, w2, b2;  // empty for the parameter-free variants

 private:
  Tensor apply_mlp(Tape& tape, const Tensor& input) const;

  MutualOp op_ = MutualOp::interactive_mlp;
  std::size_t dim_ = 0;
  std::size_t hidden_ = 0;
};

// Softmax classifier shared by every attentive vector and by the test-time
// path.
struct SharedClassifier {
  SharedClassifier() = default;
  SharedClassifier(std::size_t n_classes, std::size_t dim, std::uint64_t seed);

  Tensor logits(Tape& tape, const Tensor& v) const;
  Tensor probabilities(Tape& tape, const Tensor& v) const;

  std::vector<Tensor> parameters() const { return {weight, bias}; }
  std::size_t n_classes() const { return weight.shape()[0]; }
  std::size_t dim() const { return weight.shape()[1]; }

  Tensor weight;  // [n_classes x dim]
  Tensor bias;    // [n_classes]
};

// The four prediction score vectors of one pair.
struct PredictionSet {
  Tensor p1_self, p2_self, p1_other, p2_other;
};

// Hinge margin on the true-class scores: for each sentence, the self-gated
// score must beat the other-gated score by at least epsilon.
Tensor ranking_loss(Tape& tape, const PredictionSet& preds, int y1, int y2,
                    double epsilon);

struct LossBreakdown {
  Tensor total;  // j_ce + mu * j_rk, differentiable
  Tensor j_ce;
  Tensor j_rk;
  double mu = 1.0;
  double epsilon = 0.05;

  double total_value() const { return total.item(); }
  double ce_value() const { return j_ce.item(); }
  double rk_value() const { return j_rk.item(); }
};

// Cross entropy averaged over all four predictions plus the weighted ranking
// term.
LossBreakdown pair_loss(Tape& tape, const PairForward& pf,
                        const SharedClassifier& clf, int y1, int y2, double mu,
                        double epsilon);

}  // namespace psi
