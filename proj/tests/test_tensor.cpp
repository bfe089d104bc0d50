#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

#include "psi/error.hpp"
#include "psi/rng.hpp"
#include "psi/tensor.hpp"

using namespace psi;

namespace {

Tensor random_tensor(Shape shape, Rng& rng, double lo = -2.0, double hi = 2.0) {
  Tensor t = Tensor::zeros(std::move(shape));
  for (double& v : t.value()) v = rng.uniform(lo, hi);
  return t;
}

// Scalar loss that reaches every output coordinate with distinct weights, so
// a wrong gradient cannot cancel out.
Tensor weighted_sum(Tape& tape, const Tensor& t, const Tensor& weights) {
  return tape.sum(tape.mul(t, weights));
}

}  // namespace

TEST_CASE("matmul forward: identity and hand arithmetic") {
  Tape tape;
  Tensor eye = Tensor::from_matrix(2, 2, {1, 0, 0, 1});
  Tensor col = Tensor::from_matrix(2, 1, {3, 4});
  Tensor out = tape.matmul(eye, col);
  CHECK(out.shape() == Shape{2, 1});
  CHECK(out.value() == std::vector<double>{3, 4});

  Tensor row = Tensor::from_matrix(1, 2, {1, 2});
  Tensor prod = tape.matmul(row, col);
  CHECK(prod.value() == std::vector<double>{11});
}

TEST_CASE("matmul rejects mismatched inner dimensions") {
  Tape tape;
  Tensor a = Tensor::from_matrix(2, 3, {1, 2, 3, 4, 5, 6});
  Tensor b = Tensor::from_matrix(2, 2, {1, 2, 3, 4});
  CHECK_THROWS_AS(tape.matmul(a, b), ShapeError);
  CHECK_THROWS_AS(tape.matmul(a, Tensor::from_vector({1, 2})), ShapeError);
}

TEST_CASE("matmul backward matches central finite differences") {
  Rng rng(17);
  Tensor a = random_tensor({3, 4}, rng);
  Tensor b = random_tensor({4, 2}, rng);
  Tensor w = random_tensor({3, 2}, rng);
  std::vector<Tensor> params = {a, b};
  double err = check_gradients(
      [&](Tape& t) { return weighted_sum(t, t.matmul(a, b), w); }, params,
      1e-5);
  CHECK(err <= 1e-4);
}

TEST_CASE("elementwise forward basics") {
  Tape tape;
  Tensor zeros4 = Tensor::from_vector({0, 0, 0, 0});
  Tensor s = tape.sigmoid(zeros4);
  for (double v : s.value()) CHECK(v == 0.5);

  Tensor prod = tape.mul(Tensor::from_vector({1, 2, 3}),
                         Tensor::from_vector({0, 0, 0}));
  CHECK(prod.value() == std::vector<double>{0, 0, 0});

  CHECK_THROWS_AS(tape.add(Tensor::from_vector({1, 2}),
                           Tensor::from_vector({1, 2, 3})),
                  ShapeError);
}

TEST_CASE("sigmoid gradient at zero is exactly a quarter") {
  Tensor x = Tensor::from_vector({0.0});
  Tape tape;
  Tensor y = tape.sigmoid(x);
  tape.backward(y);
  CHECK(x.grad()[0] == 0.25);

  std::vector<Tensor> params = {x};
  double err = check_gradients([&](Tape& t) { return t.sigmoid(x); }, params,
                               1e-5);
  CHECK(err <= 1e-6);
}

TEST_CASE("every differentiable elementwise op passes finite differences") {
  Rng rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    Tensor a = random_tensor({6}, rng);
    Tensor b = random_tensor({6}, rng);
    Tensor w = random_tensor({6}, rng);
    std::vector<Tensor> both = {a, b};
    std::vector<Tensor> one = {a};

    auto check_binary = [&](auto op) {
      std::vector<Tensor> p = both;
      return check_gradients(
          [&](Tape& t) { return weighted_sum(t, op(t), w); }, p, 1e-5);
    };
    CHECK(check_binary([&](Tape& t) { return t.add(a, b); }) <= 1e-4);
    CHECK(check_binary([&](Tape& t) { return t.sub(a, b); }) <= 1e-4);
    CHECK(check_binary([&](Tape& t) { return t.mul(a, b); }) <= 1e-4);

    auto check_unary = [&](auto op) {
      std::vector<Tensor> p = one;
      return check_gradients(
          [&](Tape& t) { return weighted_sum(t, op(t), w); }, p, 1e-5);
    };
    CHECK(check_unary([&](Tape& t) { return t.square(a); }) <= 1e-4);
    CHECK(check_unary([&](Tape& t) { return t.sigmoid(a); }) <= 1e-4);
    CHECK(check_unary([&](Tape& t) { return t.tanh(a); }) <= 1e-4);
    CHECK(check_unary([&](Tape& t) { return t.scale(a, -1.7); }) <= 1e-4);
    CHECK(check_unary([&](Tape& t) { return t.add_scalar(a, 0.3); }) <= 1e-4);
  }
}

TEST_CASE("concat forward and gradient split") {
  Tape tape;
  Tensor joined = tape.concat(Tensor::from_vector({1, 2}),
                              Tensor::from_vector({3}));
  CHECK(joined.value() == std::vector<double>{1, 2, 3});

  Tensor empty = Tensor::from_vector({});
  Tensor right = Tensor::from_vector({5});
  CHECK(tape.concat(empty, right).value() == std::vector<double>{5});

  Tensor a = Tensor::from_vector({0.5, -1.0, 2.0});
  Tensor b = Tensor::from_vector({1.0, 1.0});
  Tape t2;
  Tensor loss = t2.sum(t2.concat(a, b));
  t2.backward(loss);
  CHECK(a.grad() == std::vector<double>{1, 1, 1});
  CHECK(b.grad() == std::vector<double>{1, 1});

  Tensor m = Tensor::from_matrix(2, 2, {1, 2, 3, 4});
  CHECK_THROWS_AS(t2.concat(m, b), ShapeError);
}

TEST_CASE("softmax cross entropy on uniform and saturated logits") {
  Tape tape;
  auto uniform = tape.softmax_cross_entropy(Tensor::from_vector({0, 0, 0}), 0);
  CHECK(uniform.loss.item() == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  for (double p : uniform.probs.value())
    CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  auto saturated =
      tape.softmax_cross_entropy(Tensor::from_vector({10, -10}), 0);
  CHECK(saturated.loss.item() <= 1e-8);
  CHECK(saturated.probs.value()[0] >= 1.0 - 1e-8);

  CHECK_THROWS_AS(
      tape.softmax_cross_entropy(Tensor::from_vector({1, 2, 3}), 3),
      IndexError);
}

TEST_CASE("softmax output is a probability simplex point") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    Tensor logits = random_tensor({5}, rng, -8.0, 8.0);
    Tape tape;
    Tensor p = tape.softmax(logits);
    double total = 0.0;
    for (double v : p.value()) {
      CHECK(v >= 0.0);
      total += v;
    }
    CHECK(std::abs(total - 1.0) <= 1e-6);
  }
}

TEST_CASE("softmax cross entropy gradient matches finite differences") {
  Rng rng(31);
  Tensor logits = random_tensor({5}, rng);
  std::vector<Tensor> params = {logits};
  double err = check_gradients(
      [&](Tape& t) { return t.softmax_cross_entropy(logits, 2).loss; }, params,
      1e-5);
  CHECK(err <= 1e-4);
}

TEST_CASE("pick, sum, mean, log gradients") {
  Rng rng(41);
  Tensor a = random_tensor({5}, rng, 0.1, 2.0);  // positive, log-safe
  std::vector<Tensor> params = {a};
  CHECK(check_gradients([&](Tape& t) { return t.pick(a, 3); }, params, 1e-5) <=
        1e-4);
  CHECK(check_gradients([&](Tape& t) { return t.sum(t.log(a)); }, params,
                        1e-5) <= 1e-4);
  CHECK(check_gradients(
            [&](Tape& t) {
              std::vector<Tensor> parts = {t.pick(a, 0), t.pick(a, 1),
                                           t.pick(a, 4)};
              return t.mean(parts);
            },
            params, 1e-5) <= 1e-4);

  Tape tape;
  CHECK_THROWS_AS(tape.pick(a, 9), IndexError);
  CHECK_THROWS_AS(tape.log(Tensor::from_vector({-1.0})), NumericError);
}

TEST_CASE("embedding mean averages the selected rows") {
  Tensor table = Tensor::from_matrix(3, 2, {1, 2, 3, 4, 5, 6});
  Tape tape;
  std::vector<int> ids = {0, 2};
  Tensor out = tape.embedding_mean(table, ids);
  CHECK(out.value()[0] == doctest::Approx(3.0));
  CHECK(out.value()[1] == doctest::Approx(4.0));

  Tensor loss = tape.sum(out);
  tape.backward(loss);
  CHECK(table.grad()[0] == doctest::Approx(0.5));  // row 0
  CHECK(table.grad()[2] == doctest::Approx(0.0));  // row 1 unused
  CHECK(table.grad()[4] == doctest::Approx(0.5));  // row 2

  std::vector<int> bad = {7};
  CHECK_THROWS_AS(tape.embedding_mean(table, bad), IndexError);
  std::vector<int> none;
  CHECK_THROWS_AS(tape.embedding_mean(table, none), ValidationError);

  Rng rng(53);
  Tensor t2 = random_tensor({4, 3}, rng);
  Tensor w = random_tensor({3}, rng);
  std::vector<int> dup_ids = {1, 1, 3};  // duplicates must accumulate
  std::vector<Tensor> params = {t2};
  double err = check_gradients(
      [&](Tape& t) { return weighted_sum(t, t.embedding_mean(t2, dup_ids), w); },
      params, 1e-5);
  CHECK(err <= 1e-4);
}

TEST_CASE("check_gradients is near-exact for a linear map") {
  Tensor x = Tensor::scalar(1.3);
  std::vector<Tensor> params = {x};
  double err =
      check_gradients([&](Tape& t) { return t.scale(x, 3.0); }, params, 1e-5);
  CHECK(err <= 1e-8);
}

TEST_CASE("check_gradients on a constant reports zero error") {
  Tensor x = Tensor::scalar(0.7);
  std::vector<Tensor> params = {x};
  double err = check_gradients([&](Tape&) { return Tensor::scalar(5.0); },
                               params, 1e-5);
  CHECK(err == 0.0);
  CHECK(x.grad()[0] == 0.0);
}

TEST_CASE("check_gradients validates eps range") {
  Tensor x = Tensor::scalar(1.0);
  std::vector<Tensor> params = {x};
  CHECK_THROWS_AS(
      check_gradients([&](Tape& t) { return t.scale(x, 2.0); }, params, 1e-2),
      ConfigError);
}

TEST_CASE("check_gradients rejects a non-finite loss") {
  Tensor x = Tensor::scalar(std::numeric_limits<double>::quiet_NaN());
  std::vector<Tensor> params = {x};
  CHECK_THROWS_AS(
      check_gradients([&](Tape& t) { return t.scale(x, 2.0); }, params, 1e-5),
      NumericError);
}

TEST_CASE("replaying the same computation is bit-identical") {
  Rng rng(99);
  Tensor w = random_tensor({4, 4}, rng);
  Tensor x = random_tensor({4}, rng);

  auto run = [&]() {
    Tape tape;
    Tensor h = tape.tanh(tape.matmul(w, x));
    Tensor out = tape.softmax(h);
    return out.value();
  };
  std::vector<double> first = run();
  std::vector<double> second = run();
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(std::memcmp(&first[i], &second[i], sizeof(double)) == 0);
  }
}

TEST_CASE("gradients accumulate until explicitly zeroed") {
  Tensor x = Tensor::scalar(2.0);
  Tape tape;
  Tensor y1 = tape.scale(x, 3.0);
  tape.backward(y1);
  CHECK(x.grad()[0] == 3.0);
  Tape tape2;
  Tensor y2 = tape2.scale(x, 4.0);
  tape2.backward(y2);
  CHECK(x.grad()[0] == 7.0);
  x.zero_grad();
  CHECK(x.grad()[0] == 0.0);
  CHECK(x.value()[0] == 2.0);  // zeroing touches grads only
}

TEST_CASE("all outputs stay finite on bounded inputs") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Tensor a = random_tensor({8}, rng);
    Tensor b = random_tensor({8}, rng);
    Tape tape;
    Tensor out = tape.sigmoid(tape.mul(tape.tanh(a), tape.square(b)));
    for (double v : out.value()) CHECK(std::isfinite(v));
  }
}
