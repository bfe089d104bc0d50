#include "psi/interaction.hpp"

#include <algorithm>
#include <cmath>

#include "psi/error.hpp"
#include "psi/rng.hpp"

namespace psi {

std::string to_string(MutualOp op) {
  switch (op) {
    case MutualOp::interactive_mlp: return "interactive_mlp";
    case MutualOp::sum: return "sum";
    case MutualOp::product: return "product";
    case MutualOp::subtract_square: return "subtract_square";
    case MutualOp::individual: return "individual";
  }
  throw ValidationError("unknown mutual op value");
}

MutualOp mutual_op_from_string(const std::string& s) {
  if (s == "interactive_mlp") return MutualOp::interactive_mlp;
  if (s == "sum") return MutualOp::sum;
  if (s == "product") return MutualOp::product;
  if (s == "subtract_square") return MutualOp::subtract_square;
  if (s == "individual") return MutualOp::individual;
  throw ConfigError("unknown mutual op \"" + s + "\"");
}

namespace {

Tensor init_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Tensor t = Tensor::zeros({rows, cols});
  const double stddev = 1.0 / std::sqrt(static_cast<double>(cols));
  for (double& v : t.value()) v = rng.normal(0.0, stddev);
  return t;
}

void require_dim(const Tensor& v, std::size_t dim, const char* what) {
  if (!v.is_vector() || v.shape()[0] != dim)
    throw ShapeError(std::string(what) + ": expected a vector of length " +
                     std::to_string(dim));
}

}  // namespace

InteractionHead::InteractionHead(std::size_t dim, MutualOp op,
                                 std::uint64_t seed)
    : op_(op), dim_(dim) {
  if (dim < 1) throw ConfigError("interaction head: dim must be at least 1");
  hidden_ = std::max<std::size_t>(dim / 2, 4);
  if (op == MutualOp::interactive_mlp || op == MutualOp::individual) {
    // interactive maps the concatenated pair (2D), individual one vector (D)
    const std::size_t in = op == MutualOp::interactive_mlp ? 2 * dim : dim;
    Rng rng(seed);
    w1 = init_matrix(hidden_, in, rng);
    b1 = Tensor::zeros({hidden_});
    w2 = init_matrix(dim, hidden_, rng);
    b2 = Tensor::zeros({dim});
  }
}

Tensor InteractionHead::apply_mlp(Tape& tape, const Tensor& input) const {
  Tensor hidden = tape.tanh(tape.add(tape.matmul(w1, input), b1));
  return tape.add(tape.matmul(w2, hidden), b2);
}

Tensor InteractionHead::mutual_vector(Tape& tape, const Tensor& v1,
                                      const Tensor& v2) const {
  require_dim(v1, dim_, "mutual_vector");
  require_dim(v2, dim_, "mutual_vector");
  switch (op_) {
    case MutualOp::interactive_mlp:
      return apply_mlp(tape, tape.concat(v1, v2));
    case MutualOp::sum:
      return tape.add(v1, v2);
    case MutualOp::product:
      return tape.mul(v1, v2);
    case MutualOp::subtract_square:
      return tape.square(tape.sub(v1, v2));
    case MutualOp::individual:
      throw ConfigError("mutual_vector: the individual variant has no mutual vector");
  }
  throw ValidationError("unknown mutual op value");
}

std::pair<Tensor, Tensor> InteractionHead::gates(Tape& tape, const Tensor& v_m,
                                                 const Tensor& v1,
                                                 const Tensor& v2) const {
  require_dim(v1, dim_, "gates");
  require_dim(v2, dim_, "gates");
  if (op_ == MutualOp::individual) {
    Tensor g1 = tape.sigmoid(apply_mlp(tape, v1));
    Tensor g2 = tape.sigmoid(apply_mlp(tape, v2));
    return {g1, g2};
  }
  require_dim(v_m, dim_, "gates");
  Tensor g1 = tape.sigmoid(tape.mul(v_m, v1));
  Tensor g2 = tape.sigmoid(tape.mul(v_m, v2));
  return {g1, g2};
}

PairForward attentive_vectors(Tape& tape, const Tensor& v1, const Tensor& v2,
                              const Tensor& g1, const Tensor& g2) {
  if (v1.shape() != v2.shape() || v1.shape() != g1.shape() ||
      v1.shape() != g2.shape())
    throw ShapeError("attentive_vectors: shapes disagree");
  PairForward pf;
  pf.v1 = v1;
  pf.v2 = v2;
  pf.g1 = g1;
  pf.g2 = g2;
  pf.v1_self = tape.add(v1, tape.mul(v1, g1));
  pf.v2_self = tape.add(v2, tape.mul(v2, g2));
  pf.v1_other = tape.add(v1, tape.mul(v1, g2));
  pf.v2_other = tape.add(v2, tape.mul(v2, g1));
  return pf;
}

PairForward InteractionHead::forward(Tape& tape, const Tensor& v1,
                                     const Tensor& v2) const {
  Tensor v_m;
  if (op_ != MutualOp::individual) v_m = mutual_vector(tape, v1, v2);
  auto [g1, g2] = gates(tape, v_m, v1, v2);
  PairForward pf = attentive_vectors(tape, v1, v2, g1, g2);
  pf.v_m = v_m;
  return pf;
}

std::vector<Tensor> InteractionHead::parameters() const {
  if (!w1.defined()) return {};
  return {w1, b1, w2, b2};
}

SharedClassifier::SharedClassifier(std::size_t n_classes, std::size_t dim,
                                   std::uint64_t seed) {
  if (n_classes < 2 || dim < 1)
    throw ConfigError("classifier: need at least 2 classes and dim >= 1");
  Rng rng(seed);
  weight = init_matrix(n_classes, dim, rng);
  bias = Tensor::zeros({n_classes});
}

Tensor SharedClassifier::logits(Tape& tape, const Tensor& v) const {
  return tape.add(tape.matmul(weight, v), bias);
}

Tensor SharedClassifier::probabilities(Tape& tape, const Tensor& v) const {
  return tape.softmax(logits(tape, v));
}

Tensor ranking_loss(Tape& tape, const PredictionSet& preds, int y1, int y2,
                    double epsilon) {
  if (y1 < 0 || static_cast<std::size_t>(y1) >= preds.p1_self.size() ||
      y2 < 0 || static_cast<std::size_t>(y2) >= preds.p2_self.size())
    throw IndexError("ranking_loss: label out of range");
  const auto hinge = [&](const Tensor& p_other, const Tensor& p_self, int y) {
    Tensor diff = tape.sub(tape.pick(p_other, static_cast<std::size_t>(y)),
                           tape.pick(p_self, static_cast<std::size_t>(y)));
    return tape.relu(tape.add_scalar(diff, epsilon));
  };
  return tape.add(hinge(preds.p1_other, preds.p1_self, y1),
                  hinge(preds.p2_other, preds.p2_self, y2));
}

LossBreakdown pair_loss(Tape& tape, const PairForward& pf,
                        const SharedClassifier& clf, int y1, int y2, double mu,
                        double epsilon) {
  auto scored = [&](const Tensor& v, int y) {
    return tape.softmax_cross_entropy(clf.logits(tape, v),
                                      static_cast<std::size_t>(y));
  };
  SoftmaxLoss s1 = scored(pf.v1_self, y1);
  SoftmaxLoss s2 = scored(pf.v2_self, y2);
  SoftmaxLoss o1 = scored(pf.v1_other, y1);
  SoftmaxLoss o2 = scored(pf.v2_other, y2);

  LossBreakdown out;
  out.mu = mu;
  out.epsilon = epsilon;
  out.j_ce = tape.mean({s1.loss, s2.loss, o1.loss, o2.loss});
  PredictionSet preds{s1.probs, s2.probs, o1.probs, o2.probs};
  out.j_rk = ranking_loss(tape, preds, y1, y2, epsilon);
  out.total = tape.add(out.j_ce, tape.scale(out.j_rk, mu));
  return out;
}

}  // namespace psi
