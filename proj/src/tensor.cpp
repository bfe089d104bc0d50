#include "psi/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "psi/error.hpp"

namespace psi {

namespace {

std::size_t shape_product(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << "x";
    os << shape[i];
  }
  os << "]";
  return os.str();
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " +
                     shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  }
}

void require_vector(const Tensor& t, const char* op) {
  if (!t.is_vector()) {
    throw ShapeError(std::string(op) + ": expected a vector, got " +
                     shape_str(t.shape()));
  }
}

}  // namespace

Tensor Tensor::zeros(Shape shape) {
  auto d = std::make_shared<detail::TensorData>();
  const std::size_t n = shape_product(shape);
  d->shape = std::move(shape);
  d->value.assign(n, 0.0);
  d->grad.assign(n, 0.0);
  return Tensor(std::move(d));
}

Tensor Tensor::scalar(double v) {
  Tensor t = zeros({1});
  t.value()[0] = v;
  return t;
}

Tensor Tensor::from_vector(std::vector<double> v) {
  auto d = std::make_shared<detail::TensorData>();
  d->shape = {v.size()};
  d->grad.assign(v.size(), 0.0);
  d->value = std::move(v);
  return Tensor(std::move(d));
}

Tensor Tensor::from_matrix(std::size_t rows, std::size_t cols,
                           std::vector<double> v) {
  if (v.size() != rows * cols) {
    throw ShapeError("from_matrix: " + std::to_string(v.size()) +
                     " values for a " + std::to_string(rows) + "x" +
                     std::to_string(cols) + " matrix");
  }
  auto d = std::make_shared<detail::TensorData>();
  d->shape = {rows, cols};
  d->grad.assign(v.size(), 0.0);
  d->value = std::move(v);
  return Tensor(std::move(d));
}

const Shape& Tensor::shape() const { return data_->shape; }
std::size_t Tensor::size() const { return data_->value.size(); }
std::size_t Tensor::rank() const { return data_->shape.size(); }
std::vector<double>& Tensor::value() const { return data_->value; }
std::vector<double>& Tensor::grad() const { return data_->grad; }

double Tensor::item() const {
  if (size() != 1) {
    throw ShapeError("item: tensor has " + std::to_string(size()) +
                     " elements");
  }
  return data_->value[0];
}

double Tensor::at(std::size_t i) const {
  if (i >= size()) throw IndexError("at: index out of range");
  return data_->value[i];
}

void Tensor::zero_grad() const {
  std::fill(data_->grad.begin(), data_->grad.end(), 0.0);
}

Tensor Tape::make(Shape shape) { return Tensor::zeros(std::move(shape)); }

Tensor Tape::matmul(const Tensor& a, const Tensor& b) {
  if (!a.is_matrix()) {
    throw ShapeError("matmul: left operand must be a matrix, got " +
                     shape_str(a.shape()));
  }
  const std::size_t m = a.shape()[0];
  const std::size_t k = a.shape()[1];

  std::size_t n = 0;
  bool vec = false;
  if (b.is_matrix()) {
    if (b.shape()[0] != k) {
      throw ShapeError("matmul: inner dimensions disagree, " +
                       shape_str(a.shape()) + " vs " + shape_str(b.shape()));
    }
    n = b.shape()[1];
  } else if (b.is_vector()) {
    if (b.shape()[0] != k) {
      throw ShapeError("matmul: inner dimensions disagree, " +
                       shape_str(a.shape()) + " vs " + shape_str(b.shape()));
    }
    n = 1;
    vec = true;
  } else {
    throw ShapeError("matmul: right operand must be a matrix or vector");
  }

  Tensor out = make(vec ? Shape{m} : Shape{m, n});
  const auto& av = a.value();
  const auto& bv = b.value();
  auto& ov = out.value();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += av[i * k + p] * bv[p * n + j];
      ov[i * n + j] = acc;
    }
  }

  ops_.push_back([a, b, out, m, n, k]() {
    const auto& g = out.grad();
    const auto& av = a.value();
    const auto& bv = b.value();
    auto& ga = a.grad();
    auto& gb = b.grad();
    // dL/da = g . b^T ; dL/db = a^T . g
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t p = 0; p < k; ++p) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += g[i * n + j] * bv[p * n + j];
        ga[i * k + p] += acc;
      }
    }
    for (std::size_t p = 0; p < k; ++p) {
      for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) acc += av[i * k + p] * g[i * n + j];
        gb[p * n + j] += acc;
      }
    }
  });
  return out;
}

Tensor Tape::add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  Tensor out = make(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i)
    out.value()[i] = a.value()[i] + b.value()[i];
  ops_.push_back([a, b, out]() {
    for (std::size_t i = 0; i < out.size(); ++i) {
      a.grad()[i] += out.grad()[i];
      b.grad()[i] += out.grad()[i];
    }
  });
  return out;
}

Tensor Tape::sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  Tensor out = make(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i)
    out.value()[i] = a.value()[i] - b.value()[i];
  ops_.push_back([a, b, out]() {
    for (std::size_t i = 0; i < out.size(); ++i) {
      a.grad()[i] += out.grad()[i];
      b.grad()[i] -= out.grad()[i];
    }
  });
  return out;
}

Tensor Tape::mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  Tensor out = make(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i)
    out.value()[i] = a.value()[i] * b.value()[i];
  ops_.push_back([a, b, out]() {
    for (std::size_t i = 0; i < out.size(); ++i) {
      a.grad()[i] += out.grad()[i] * b.value()[i];
      b.grad()[i] += out.grad()[i] * a.value()[i];
    }
  });
  return out;
}

Tensor Tape::square(const Tensor& a) {
  Tensor out = make(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i)
    out.value()[i] = a.value()[i] * a.value()[i];
  ops_.push_back([a, out]() {
    for (std::size_t i = 0; i < out.size(); ++i)
      a.grad()[i] += out.grad()[i] * 2.0 * a.value()[i];
  });
  return out;
}

Tensor Tape::sigmoid(const Tensor& a) {
  Tensor out = make(a.shape());
  // keep the output strictly inside (0,1); extreme finite inputs would
  // otherwise round to the closed endpoints
  const double lo = std::numeric_limits<double>::min();
  const double hi = std::nextafter(1.0, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double s = 1.0 / (1.0 + std::exp(-a.value()[i]));
    out.value()[i] = std::clamp(s, lo, hi);
  }
  ops_.push_back([a, out]() {
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double s = out.value()[i];
      a.grad()[i] += out.grad()[i] * s * (1.0 - s);
    }
  });
  return out;
}

Tensor Tape::tanh(const Tensor& a) {
  Tensor out = make(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i)
    out.value()[i] = std::tanh(a.value()[i]);
  ops_.push_back([a, out]() {
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double t = out.value()[i];
      a.grad()[i] += out.grad()[i] * (1.0 - t * t);
    }
  });
  return out;
}

Tensor Tape::relu(const Tensor& a) {
  Tensor out = make(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i)
    out.value()[i] = a.value()[i] > 0.0 ? a.value()[i] : 0.0;
  ops_.push_back([a, out]() {
    for (std::size_t i = 0; i < out.size(); ++i)
      if (a.value()[i] > 0.0) a.grad()[i] += out.grad()[i];
  });
  return out;
}

Tensor Tape::log(const Tensor& a) {
  Tensor out = make(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.value()[i] <= 0.0)
      throw NumericError("log: non-positive input " +
                         std::to_string(a.value()[i]));
    out.value()[i] = std::log(a.value()[i]);
  }
  ops_.push_back([a, out]() {
    for (std::size_t i = 0; i < out.size(); ++i)
      a.grad()[i] += out.grad()[i] / a.value()[i];
  });
  return out;
}

Tensor Tape::concat(const Tensor& a, const Tensor& b) {
  require_vector(a, "concat");
  require_vector(b, "concat");
  const std::size_t m = a.size();
  Tensor out = make({m + b.size()});
  std::copy(a.value().begin(), a.value().end(), out.value().begin());
  std::copy(b.value().begin(), b.value().end(), out.value().begin() + m);
  ops_.push_back([a, b, out, m]() {
    for (std::size_t i = 0; i < m; ++i) a.grad()[i] += out.grad()[i];
    for (std::size_t i = 0; i < b.size(); ++i) b.grad()[i] += out.grad()[m + i];
  });
  return out;
}

Tensor Tape::scale(const Tensor& a, double c) {
  Tensor out = make(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) out.value()[i] = c * a.value()[i];
  ops_.push_back([a, out, c]() {
    for (std::size_t i = 0; i < out.size(); ++i)
      a.grad()[i] += c * out.grad()[i];
  });
  return out;
}

Tensor Tape::add_scalar(const Tensor& a, double c) {
  Tensor out = make(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) out.value()[i] = a.value()[i] + c;
  ops_.push_back([a, out]() {
    for (std::size_t i = 0; i < out.size(); ++i) a.grad()[i] += out.grad()[i];
  });
  return out;
}

Tensor Tape::pick(const Tensor& a, std::size_t index) {
  if (index >= a.size())
    throw IndexError("pick: index " + std::to_string(index) +
                     " out of range for size " + std::to_string(a.size()));
  Tensor out = make({1});
  out.value()[0] = a.value()[index];
  ops_.push_back([a, out, index]() { a.grad()[index] += out.grad()[0]; });
  return out;
}

Tensor Tape::sum(const Tensor& a) {
  Tensor out = make({1});
  out.value()[0] = std::accumulate(a.value().begin(), a.value().end(), 0.0);
  ops_.push_back([a, out]() {
    for (std::size_t i = 0; i < a.size(); ++i) a.grad()[i] += out.grad()[0];
  });
  return out;
}

Tensor Tape::mean(const std::vector<Tensor>& scalars) {
  if (scalars.empty()) throw ShapeError("mean: empty input");
  for (const Tensor& t : scalars)
    if (t.size() != 1) throw ShapeError("mean: inputs must be scalars");
  Tensor out = make({1});
  double acc = 0.0;
  for (const Tensor& t : scalars) acc += t.value()[0];
  const double inv = 1.0 / static_cast<double>(scalars.size());
  out.value()[0] = acc * inv;
  ops_.push_back([scalars, out, inv]() {
    for (const Tensor& t : scalars) t.grad()[0] += out.grad()[0] * inv;
  });
  return out;
}

Tensor Tape::softmax(const Tensor& logits) {
  require_vector(logits, "softmax");
  if (logits.size() == 0) throw ShapeError("softmax: empty input");
  Tensor out = make(logits.shape());
  const auto& x = logits.value();
  const double mx = *std::max_element(x.begin(), x.end());
  double z = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.value()[i] = std::exp(x[i] - mx);
    z += out.value()[i];
  }
  for (std::size_t i = 0; i < x.size(); ++i) out.value()[i] /= z;
  ops_.push_back([logits, out]() {
    const auto& p = out.value();
    const auto& g = out.grad();
    double dot = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) dot += g[i] * p[i];
    for (std::size_t i = 0; i < p.size(); ++i)
      logits.grad()[i] += p[i] * (g[i] - dot);
  });
  return out;
}

SoftmaxLoss Tape::softmax_cross_entropy(const Tensor& logits,
                                        std::size_t label) {
  if (label >= logits.size())
    throw IndexError("softmax_cross_entropy: label " + std::to_string(label) +
                     " out of range for " + std::to_string(logits.size()) +
                     " classes");
  Tensor probs = softmax(logits);
  Tensor loss = scale(log(pick(probs, label)), -1.0);
  return {loss, probs};
}

Tensor Tape::embedding_mean(const Tensor& table, std::span<const int> ids) {
  if (!table.is_matrix())
    throw ShapeError("embedding_mean: table must be a matrix");
  if (ids.empty()) throw ValidationError("embedding_mean: empty id list");
  const std::size_t rows = table.shape()[0];
  const std::size_t cols = table.shape()[1];
  for (int id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= rows)
      throw IndexError("embedding_mean: id " + std::to_string(id) +
                       " out of range for " + std::to_string(rows) + " rows");
  }
  Tensor out = make({cols});
  const auto& tv = table.value();
  for (int id : ids) {
    const std::size_t off = static_cast<std::size_t>(id) * cols;
    for (std::size_t j = 0; j < cols; ++j) out.value()[j] += tv[off + j];
  }
  const double inv = 1.0 / static_cast<double>(ids.size());
  for (std::size_t j = 0; j < cols; ++j) out.value()[j] *= inv;

  std::vector<int> captured(ids.begin(), ids.end());
  ops_.push_back([table, out, captured, cols, inv]() {
    for (int id : captured) {
      const std::size_t off = static_cast<std::size_t>(id) * cols;
      for (std::size_t j = 0; j < cols; ++j)
        table.grad()[off + j] += out.grad()[j] * inv;
    }
  });
  return out;
}

void Tape::backward(const Tensor& loss) {
  if (loss.size() != 1)
    throw ShapeError("backward: loss must be a scalar, got " +
                     std::to_string(loss.size()) + " elements");
  loss.grad()[0] += 1.0;
  for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) (*it)();
}

double check_gradients(const std::function<Tensor(Tape&)>& f,
                       std::span<Tensor> params, double eps) {
  if (eps < 1e-6 || eps > 1e-3)
    throw ConfigError("check_gradients: eps must be in [1e-6, 1e-3]");

  const auto eval = [&]() {
    Tape tape;
    Tensor loss = f(tape);
    const double v = loss.item();
    if (!std::isfinite(v))
      throw NumericError("check_gradients: non-finite loss");
    return v;
  };

  // Analytic pass.
  for (Tensor& p : params) p.zero_grad();
  Tape tape;
  Tensor loss = f(tape);
  if (!std::isfinite(loss.item()))
    throw NumericError("check_gradients: non-finite loss");
  tape.backward(loss);
  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (const Tensor& p : params) analytic.push_back(p.grad());

  double worst = 0.0;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Tensor& p = params[pi];
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double saved = p.value()[i];
      p.value()[i] = saved + eps;
      const double up = eval();
      p.value()[i] = saved - eps;
      const double down = eval();
      p.value()[i] = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double a = analytic[pi][i];
      const double denom = std::max({1.0, std::abs(a), std::abs(numeric)});
      worst = std::max(worst, std::abs(a - numeric) / denom);
    }
  }
  return worst;
}

}  // namespace psi
