#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace psi {

using Shape = std::vector<std::size_t>;

namespace detail {
struct TensorData {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // same length as value, accumulates additively
};
}  // namespace detail

// Shared-ownership handle to one node of the compute graph. Copies alias the
// same storage, so parameters handed to an optimizer and to the forward pass
// are the same slots.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape);
  static Tensor scalar(double v);
  static Tensor from_vector(std::vector<double> v);
  static Tensor from_matrix(std::size_t rows, std::size_t cols,
                            std::vector<double> v);

  bool defined() const { return data_ != nullptr; }
  const Shape& shape() const;
  std::size_t size() const;
  std::size_t rank() const;
  bool is_vector() const { return rank() == 1; }
  bool is_matrix() const { return rank() == 2; }

  // Handles share storage; these mutate through const handles the way a
  // shared_ptr does.
  std::vector<double>& value() const;
  std::vector<double>& grad() const;

  double item() const;             // requires size() == 1
  double at(std::size_t i) const;  // flat index into value
  void zero_grad() const;

  bool same_node(const Tensor& other) const { return data_ == other.data_; }

 private:
  explicit Tensor(std::shared_ptr<detail::TensorData> d) : data_(std::move(d)) {}
  std::shared_ptr<detail::TensorData> data_;
  friend class Tape;
};

// Loss value together with the probability vector it was derived from.
struct SoftmaxLoss {
  Tensor loss;
  Tensor probs;
};

// Records forward operations and replays their adjoints in reverse order.
// Gradients accumulate additively into each tensor's grad buffer; callers
// zero parameter grads between optimization steps. clear() drops the
// recorded ops (and with them the intermediate tensors), never values.
class Tape {
 public:
  Tensor matmul(const Tensor& a, const Tensor& b);
  Tensor add(const Tensor& a, const Tensor& b);
  Tensor sub(const Tensor& a, const Tensor& b);
  Tensor mul(const Tensor& a, const Tensor& b);  // elementwise
  Tensor square(const Tensor& a);
  Tensor sigmoid(const Tensor& a);  // output strictly inside (0,1)
  Tensor tanh(const Tensor& a);
  Tensor relu(const Tensor& a);
  Tensor log(const Tensor& a);
  Tensor concat(const Tensor& a, const Tensor& b);
  Tensor scale(const Tensor& a, double c);
  Tensor add_scalar(const Tensor& a, double c);
  Tensor pick(const Tensor& a, std::size_t index);  // single coordinate
  Tensor sum(const Tensor& a);
  Tensor mean(const std::vector<Tensor>& scalars);
  Tensor softmax(const Tensor& logits);
  SoftmaxLoss softmax_cross_entropy(const Tensor& logits, std::size_t label);
  // Mean of the embedding rows selected by ids.
  Tensor embedding_mean(const Tensor& table, std::span<const int> ids);

  void backward(const Tensor& loss);
  void clear() { ops_.clear(); }
  std::size_t recorded_ops() const { return ops_.size(); }

 private:
  Tensor make(Shape shape);
  std::vector<std::function<void()>> ops_;
};

// Central-difference check of reverse-mode gradients. f must be a
// deterministic scalar-valued computation over params; it is re-run with
// perturbed parameter values. Returns the worst relative error across all
// parameter coordinates.
double check_gradients(const std::function<Tensor(Tape&)>& f,
                       std::span<Tensor> params, double eps);

}  // namespace psi
