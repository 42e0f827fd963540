#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "evsefl/errors.hpp"
#include "evsefl/nn.hpp"
#include "evsefl/optim.hpp"
#include "evsefl/rng.hpp"
#include "support/oracles.hpp"

using namespace evsefl;
using test::finite_diff_check;
using test::max_abs_diff;
using test::randomize;

TEST_CASE("tensor construction, reshape, and the finiteness check") {
  Tensor t({2, 3}, {1, 2, 3, 4, 5, 6});
  CHECK(t.size() == 6);
  CHECK(t.at(1, 2) == 6.0);
  CHECK(t.all_finite());
  t[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK(!t.all_finite());
  t[3] = std::numeric_limits<double>::infinity();
  CHECK(!t.all_finite());

  CHECK_THROWS_AS(Tensor({2, 2}, {1, 2, 3}), DimensionError);
  CHECK_THROWS_AS(t.reshaped({7}), DimensionError);
  Tensor r = Tensor({2, 3}, {1, 2, 3, 4, 5, 6}).reshaped({3, 2});
  CHECK(r.at(2, 1) == 6.0);
  CHECK(Tensor({2, 2}).shape_str() == "[2 x 2]");
}

TEST_CASE("dense_forward matches closed forms") {
  Tensor x({1, 2}, {1, 2});
  CHECK(max_abs_diff(dense_forward(x, Tensor({2, 2}, {1, 0, 0, 1}),
                                   Tensor({2}, {0, 0})),
                     Tensor({1, 2}, {1, 2})) == 0.0);
  CHECK(max_abs_diff(dense_forward(x, Tensor({2, 2}, {0, 0, 0, 0}),
                                   Tensor({2}, {3, 4})),
                     Tensor({1, 2}, {3, 4})) == 0.0);
  CHECK(max_abs_diff(dense_forward(x, Tensor({2, 2}, {1, 2, 3, 4}),
                                   Tensor({2}, {1, 1})),
                     Tensor({1, 2}, {8, 11})) == 0.0);
}

TEST_CASE("dense_forward names both shapes on mismatch") {
  Tensor x({1, 3}, {1, 2, 3});
  Tensor W({2, 2}, {1, 0, 0, 1});
  Tensor b({2}, {0, 0});
  CHECK_THROWS_WITH_AS(dense_forward(x, W, b),
                       doctest::Contains("[1 x 3]"), DimensionError);
  CHECK_THROWS_WITH_AS(dense_forward(x, W, b),
                       doctest::Contains("[2 x 2]"), DimensionError);
}

TEST_CASE("conv1d_forward closed forms and errors") {
  Tensor x({1, 1, 3}, {1, 2, 3});
  CHECK(max_abs_diff(conv1d_forward(x, Tensor({1, 1, 2}, {1, 1}),
                                    Tensor({1}, {0}), 1),
                     Tensor({1, 1, 2}, {3, 5})) == 0.0);
  CHECK(max_abs_diff(conv1d_forward(x, Tensor({1, 1, 2}, {0, 0}),
                                    Tensor({1}, {7}), 1),
                     Tensor({1, 1, 2}, {7, 7})) == 0.0);
  CHECK_THROWS_AS(conv1d_forward(x, Tensor({1, 1, 4}), Tensor({1}), 1),
                  DimensionError);
  CHECK_THROWS_WITH_AS(conv1d_forward(x, Tensor({1, 1, 4}), Tensor({1}), 1),
                       doctest::Contains("exceeds input length"), DimensionError);
}

TEST_CASE("conv1d_forward matches the naive oracle") {
  Rng rng(11);
  Tensor x({1, 2, 8});
  Tensor filters({3, 2, 3});
  Tensor bias({3});
  randomize(x, rng);
  randomize(filters, rng);
  randomize(bias, rng);
  for (std::size_t stride : {1ul, 2ul}) {
    CHECK(max_abs_diff(conv1d_forward(x, filters, bias, stride),
                       test::naive_conv1d(x, filters, bias, stride)) <= 1e-12);
  }
}

TEST_CASE("maxpool1d_forward pools, breaks ties low, drops remainders") {
  Tensor x({1, 1, 4}, {1, 3, 2, 5});
  auto pooled = maxpool1d_forward(x, 2);
  CHECK(max_abs_diff(pooled.values, Tensor({1, 1, 2}, {3, 5})) == 0.0);

  auto tie = maxpool1d_forward(Tensor({1, 1, 2}, {4, 4}), 2);
  CHECK(tie.values[0] == 4.0);
  CHECK(tie.argmax[0] == 0);  // first occurrence wins

  auto remainder = maxpool1d_forward(Tensor({1, 1, 5}, {1, 2, 3, 4, 9}), 2);
  CHECK(remainder.values.shape()[2] == 2);  // trailing 9 dropped

  CHECK_THROWS_AS(maxpool1d_forward(Tensor({1, 1, 3}), 4), DimensionError);
}

TEST_CASE("maxpool1d_forward matches the naive oracle") {
  Rng rng(12);
  Tensor x({2, 3, 9});
  randomize(x, rng);
  CHECK(max_abs_diff(maxpool1d_forward(x, 2).values,
                     test::naive_maxpool1d(x, 2)) == 0.0);
}

TEST_CASE("relu") {
  Tensor x({3}, {-1, 0, 2});
  CHECK(max_abs_diff(relu(x), Tensor({3}, {0, 0, 2})) == 0.0);
  Tensor neg({4}, {-5, -0.1, -3, -1e9});
  CHECK(max_abs_diff(relu(neg), Tensor({4})) == 0.0);
  Rng rng(13);
  Tensor r({2, 17});
  randomize(r, rng);
  const Tensor out = relu(r);
  for (std::size_t i = 0; i < r.size(); ++i)
    CHECK(out[i] == (r[i] > 0.0 ? r[i] : 0.0));
}

TEST_CASE("softmax closed forms, stability, row sums, shift invariance") {
  CHECK(max_abs_diff(softmax(Tensor({1, 3}, {0, 0, 0})),
                     Tensor({1, 3}, {1.0 / 3, 1.0 / 3, 1.0 / 3})) <= 1e-15);
  CHECK(max_abs_diff(softmax(Tensor({1, 2}, {1000, 1000})),
                     Tensor({1, 2}, {0.5, 0.5})) <= 1e-15);
  CHECK(max_abs_diff(softmax(Tensor({1, 2}, {std::log(2.0), 0.0})),
                     Tensor({1, 2}, {2.0 / 3, 1.0 / 3})) <= 1e-12);

  Rng rng(14);
  Tensor logits({5, 4});
  randomize(logits, rng);
  Tensor probs = softmax(logits);
  for (std::size_t i = 0; i < 5; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < 4; ++j) sum += probs.at(i, j);
    CHECK(std::fabs(sum - 1.0) <= 1e-9);
  }
  Tensor shifted = logits;
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 4; ++j) shifted.at(i, j) += 17.5;
  CHECK(max_abs_diff(softmax(shifted), probs) <= 1e-9);
}

TEST_CASE("cross_entropy_loss closed forms and contract") {
  CHECK(cross_entropy_loss(Tensor({1, 2}, {1, 0}), Tensor({1, 2}, {1, 0})) ==
        doctest::Approx(0.0).epsilon(1e-9));
  CHECK(cross_entropy_loss(Tensor({1, 2}, {0.5, 0.5}), Tensor({1, 2}, {0, 1})) ==
        doctest::Approx(std::log(2.0)));
  // batch of 2 with true-class probabilities 0.5 and 0.25
  Tensor probs({2, 2}, {0.5, 0.5, 0.75, 0.25});
  Tensor labels({2, 2}, {1, 0, 0, 1});
  CHECK(cross_entropy_loss(probs, labels) ==
        doctest::Approx((std::log(2.0) + std::log(4.0)) / 2.0));

  CHECK_THROWS_AS(
      cross_entropy_loss(probs, Tensor({2, 2}, {1, 1, 0, 1})), DataError);
  CHECK_THROWS_AS(
      cross_entropy_loss(probs, Tensor({2, 2}, {0.5, 0.5, 0, 1})), DataError);

  // floored at 1e-12: zero probability stays finite and non-negative
  const double floored =
      cross_entropy_loss(Tensor({1, 2}, {0, 1}), Tensor({1, 2}, {1, 0}));
  CHECK(floored == doctest::Approx(-std::log(1e-12)));
  Rng rng(15);
  for (int rep = 0; rep < 20; ++rep) {
    Tensor raw({3, 3});
    randomize(raw, rng);
    Tensor p = softmax(raw);
    Tensor y({3, 3});
    for (std::size_t i = 0; i < 3; ++i) y.at(i, rng.index(3)) = 1.0;
    CHECK(cross_entropy_loss(p, y) >= 0.0);
  }
}

TEST_CASE("mse_loss") {
  Tensor a({2}, {1, 1});
  CHECK(mse_loss(a, a) == 0.0);
  CHECK(mse_loss(Tensor({2}, {0, 0}), a) == doctest::Approx(1.0));
  Rng rng(16);
  Tensor p({4, 3}), q({4, 3});
  randomize(p, rng);
  randomize(q, rng);
  double expect = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    expect += (p[i] - q[i]) * (p[i] - q[i]);
  expect /= static_cast<double>(p.size());
  CHECK(mse_loss(p, q) == doctest::Approx(expect).epsilon(1e-12));
  CHECK_THROWS_AS(mse_loss(p, Tensor({3, 4})), DimensionError);
}

TEST_CASE("dense backward matches the hand-derived 2x2 chain rule") {
  DenseLayer layer(2, 2, "d");
  layer.weights().value = Tensor({2, 2}, {1, 2, 3, 4});
  layer.bias().value = Tensor({2}, {0.5, -0.5});
  Tensor x({1, 2}, {1, 2});
  Tensor target({1, 2}, {0, 0});

  Tensor y = layer.forward(x);
  CHECK(max_abs_diff(y, Tensor({1, 2}, {7.5, 9.5})) <= 1e-15);
  Tensor dx = layer.backward(mse_grad(y, target));

  // L = ((y0-t0)^2 + (y1-t1)^2)/2, dL/dy = y - t
  CHECK(max_abs_diff(layer.weights().grad,
                     Tensor({2, 2}, {7.5, 9.5, 15.0, 19.0})) <= 1e-12);
  CHECK(max_abs_diff(layer.bias().grad, Tensor({2}, {7.5, 9.5})) <= 1e-12);
  CHECK(max_abs_diff(dx, Tensor({1, 2}, {26.5, 60.5})) <= 1e-12);
}

TEST_CASE("backward before forward is a state error") {
  DenseLayer dense(2, 2, "d");
  CHECK_THROWS_AS(dense.backward(Tensor({1, 2})), StateError);
  Conv1dLayer conv(1, 1, 2, 1, "c");
  CHECK_THROWS_AS(conv.backward(Tensor({1, 1, 1})), StateError);
  MaxPool1dLayer pool(2);
  CHECK_THROWS_AS(pool.backward(Tensor({1, 1, 1})), StateError);
  ReluLayer relu_layer;
  CHECK_THROWS_AS(relu_layer.backward(Tensor({1, 2})), StateError);
}

TEST_CASE("finite differences confirm every layer gradient") {
  Rng rng(21);
  const double tol = 1e-4;

  SUBCASE("dense parameters and input") {
    DenseLayer layer(3, 2, "d");
    layer.init(rng);
    Tensor x({2, 3}), target({2, 2});
    randomize(x, rng);
    randomize(target, rng);

    Tensor y = layer.forward(x);
    Tensor dx = layer.backward(mse_grad(y, target));
    auto loss = [&]() {
      return mse_loss(
          dense_forward(x, layer.weights().value, layer.bias().value), target);
    };
    CHECK(finite_diff_check(layer.weights().value, layer.weights().grad, loss,
                            rng).max_rel_err <= tol);
    CHECK(finite_diff_check(layer.bias().value, layer.bias().grad, loss, rng)
              .max_rel_err <= tol);
    CHECK(finite_diff_check(x.values().empty() ? x : x, dx, loss, rng)
              .max_rel_err <= tol);
  }

  SUBCASE("conv1d parameters and input") {
    Conv1dLayer layer(2, 2, 3, 1, "c");
    layer.init(rng);
    Tensor x({2, 2, 7}), target({2, 2, 5});
    randomize(x, rng);
    randomize(target, rng);

    Tensor y = layer.forward(x);
    Tensor dx = layer.backward(mse_grad(y, target));
    auto loss = [&]() {
      return mse_loss(
          conv1d_forward(x, layer.filters().value, layer.bias().value, 1),
          target);
    };
    CHECK(finite_diff_check(layer.filters().value, layer.filters().grad, loss,
                            rng).max_rel_err <= tol);
    CHECK(finite_diff_check(layer.bias().value, layer.bias().grad, loss, rng)
              .max_rel_err <= tol);
    CHECK(finite_diff_check(x, dx, loss, rng).max_rel_err <= tol);
  }

  SUBCASE("maxpool input") {
    MaxPool1dLayer layer(2);
    Tensor x({2, 2, 6}), target({2, 2, 3});
    randomize(x, rng);
    randomize(target, rng);
    Tensor y = layer.forward(x);
    Tensor dx = layer.backward(mse_grad(y, target));
    auto loss = [&]() {
      return mse_loss(maxpool1d_forward(x, 2).values, target);
    };
    // smaller h keeps the bump away from argmax flips
    CHECK(finite_diff_check(x, dx, loss, rng, 100, 1e-6).max_rel_err <= tol);
  }

  SUBCASE("relu input") {
    ReluLayer layer;
    Tensor x({3, 5}), target({3, 5});
    randomize(x, rng);
    randomize(target, rng);
    Tensor y = layer.forward(x);
    Tensor dx = layer.backward(mse_grad(y, target));
    auto loss = [&]() { return mse_loss(relu(x), target); };
    CHECK(finite_diff_check(x, dx, loss, rng).max_rel_err <= tol);
  }

  SUBCASE("softmax + cross-entropy wrt logits") {
    Tensor logits({4, 3});
    randomize(logits, rng);
    Tensor labels({4, 3});
    for (std::size_t i = 0; i < 4; ++i) labels.at(i, rng.index(3)) = 1.0;
    Tensor analytic = softmax_cross_entropy_grad(softmax(logits), labels);
    auto loss = [&]() { return cross_entropy_loss(softmax(logits), labels); };
    CHECK(finite_diff_check(logits, analytic, loss, rng).max_rel_err <= tol);
  }
}

TEST_CASE("relu mask blocks upstream gradient") {
  // x <= 0 everywhere: the whole path is masked, dense grads must be zero.
  DenseLayer dense(2, 2, "d");
  Rng rng(22);
  dense.init(rng);
  ReluLayer gate;
  Tensor x({1, 2}, {-1.0, -2.0});

  Tensor gated = gate.forward(x);
  Tensor y = dense.forward(gated);
  Tensor g = mse_grad(y, Tensor({1, 2}, {5, 5}));
  Tensor dg = dense.backward(g);
  Tensor dx = gate.backward(dg);

  for (std::size_t i = 0; i < dx.size(); ++i) CHECK(dx[i] == 0.0);
  // weight grads see zero activations
  CHECK(max_abs_diff(dense.weights().grad, Tensor({2, 2})) == 0.0);
}

TEST_CASE("adam first step is -lr * g / (|g| + eps)") {
  ParamTensor p("p", Tensor({3}, {1.0, -2.0, 0.5}));
  p.grad = Tensor({3}, {0.5, -0.25, 1.5});
  AdamConfig cfg;
  cfg.lr = 0.1;
  AdamOptimizer adam({&p}, cfg);
  adam.step();
  for (std::size_t i = 0; i < 3; ++i) {
    const double g = Tensor({3}, {0.5, -0.25, 1.5})[i];
    const double expect =
        Tensor({3}, {1.0, -2.0, 0.5})[i] - 0.1 * g / (std::fabs(g) + 1e-8);
    CHECK(p.value[i] == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK(adam.step_count() == 1);
}

TEST_CASE("adam with zero gradients is the identity") {
  ParamTensor p("p", Tensor({4}, {1, 2, 3, 4}));
  AdamOptimizer adam({&p});
  for (int i = 0; i < 5; ++i) adam.step();
  CHECK(max_abs_diff(p.value, Tensor({4}, {1, 2, 3, 4})) == 0.0);
  CHECK(adam.step_count() == 5);
}

TEST_CASE("adam matches an independently computed two-step trace") {
  // theta0=1, lr=0.1, g1=0.5, g2=-0.3, defaults beta1/beta2/eps
  ParamTensor p("p", Tensor({1}, {1.0}));
  AdamConfig cfg;
  cfg.lr = 0.1;
  AdamOptimizer adam({&p}, cfg);

  p.grad[0] = 0.5;
  adam.step();
  CHECK(p.value[0] == doctest::Approx(0.900000002).epsilon(1e-12));
  CHECK(adam.first_moment(0)[0] == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(adam.second_moment(0)[0] == doctest::Approx(0.00025).epsilon(1e-12));

  p.grad[0] = -0.3;
  adam.step();
  CHECK(p.value[0] == doctest::Approx(0.8808501989417752).epsilon(1e-12));
  CHECK(adam.step_count() == 2);
}

TEST_CASE("adam zeroes gradients after stepping and rejects empty sets") {
  ParamTensor p("p", Tensor({2}, {1, 1}));
  p.grad = Tensor({2}, {3, 3});
  AdamOptimizer adam({&p});
  adam.step();
  CHECK(max_abs_diff(p.grad, Tensor({2})) == 0.0);

  AdamOptimizer empty({});
  CHECK_THROWS_AS(empty.step(), StateError);
  SgdOptimizer empty_sgd({}, 0.1);
  CHECK_THROWS_AS(empty_sgd.step(), StateError);
}

TEST_CASE("seeded init and forward/backward are bit-identical") {
  auto run = [](std::uint64_t seed) {
    Rng rng(seed);
    DenseLayer layer(4, 3, "d");
    layer.init(rng);
    Tensor x({2, 4});
    randomize(x, rng);
    Tensor y = layer.forward(x);
    layer.backward(mse_grad(y, Tensor({2, 3})));
    return std::make_pair(y, layer.weights().grad);
  };
  auto [y1, g1] = run(99);
  auto [y2, g2] = run(99);
  CHECK(max_abs_diff(y1, y2) == 0.0);
  CHECK(max_abs_diff(g1, g2) == 0.0);
  auto [y3, g3] = run(100);
  CHECK(max_abs_diff(y1, y3) > 0.0);
}

TEST_CASE("randomized shapes agree with naive oracles") {
  Rng rng(31);
  for (int rep = 0; rep < 25; ++rep) {
    const std::size_t batch = 1 + rng.index(3);
    const std::size_t ch = 1 + rng.index(3);
    const std::size_t len = 4 + rng.index(8);
    const std::size_t out_ch = 1 + rng.index(4);
    const std::size_t kernel = 1 + rng.index(len);
    const std::size_t stride = 1 + rng.index(2);
    Tensor x({batch, ch, len}), filters({out_ch, ch, kernel}), bias({out_ch});
    randomize(x, rng);
    randomize(filters, rng);
    randomize(bias, rng);
    CHECK(max_abs_diff(conv1d_forward(x, filters, bias, stride),
                       test::naive_conv1d(x, filters, bias, stride)) <= 1e-12);

    const std::size_t window = 1 + rng.index(len);
    if (window <= len) {
      CHECK(max_abs_diff(maxpool1d_forward(x, window).values,
                         test::naive_maxpool1d(x, window)) <= 1e-12);
    }

    const std::size_t in = 1 + rng.index(6), out = 1 + rng.index(5);
    Tensor dx({batch, in}), W({in, out}), b({out});
    randomize(dx, rng);
    randomize(W, rng);
    randomize(b, rng);
    CHECK(max_abs_diff(dense_forward(dx, W, b), test::naive_dense(dx, W, b)) <=
          1e-12);
    CHECK(max_abs_diff(softmax(dx), test::naive_softmax(dx)) <= 1e-12);
  }
}
