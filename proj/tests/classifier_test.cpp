#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "evsefl/autoencoder.hpp"
#include "evsefl/cnn.hpp"
#include "evsefl/errors.hpp"
#include "evsefl/rng.hpp"
#include "evsefl/synth.hpp"
#include "support/oracles.hpp"

using namespace evsefl;
using test::max_abs_diff;

namespace {

// Linearly separable [n x 64] data: raw 32+32 synth features fused without
// autoencoders. The linear-probe oracle confirms the task is easy.
FusedDataset separable_fused(std::size_t n_per_class, std::uint64_t seed) {
  SynthSpec spec;
  spec.coupling = SynthCoupling::Independent;
  spec.n_per_class = n_per_class;
  spec.d1 = 32;
  spec.d2 = 32;
  spec.seed = seed;
  PairedDataset data = synth_generate(spec);
  return FusedDataset{fuse(data.net_features, data.kernel_features), data.labels};
}

void zero_params(CnnModel& model) {
  model.set_flat_params(std::vector<double>(model.param_count(), 0.0));
}

}  // namespace

TEST_CASE("forward rows always sum to one") {
  CnnModel model(CnnConfig{}, 5);
  Rng rng(6);
  Tensor z({7, 64});
  test::randomize(z, rng);
  Tensor probs = model.forward(z);
  REQUIRE(probs.shape() == std::vector<std::size_t>{7, 3});
  for (std::size_t i = 0; i < 7; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < 3; ++j) sum += probs.at(i, j);
    CHECK(std::fabs(sum - 1.0) <= 1e-9);
  }
}

TEST_CASE("zero weights everywhere produce the uniform distribution") {
  CnnModel model(CnnConfig{}, 5);
  zero_params(model);
  Rng rng(7);
  Tensor z({4, 64});
  test::randomize(z, rng);
  Tensor probs = model.forward(z);
  for (std::size_t i = 0; i < probs.size(); ++i)
    CHECK(probs[i] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("forward rejects the wrong input width") {
  CnnModel model(CnnConfig{}, 5);
  CHECK_THROWS_WITH_AS(model.forward(Tensor({2, 63})), doctest::Contains("64"),
                       DimensionError);
}

TEST_CASE("a tiny config matches a straight-line layer-by-layer oracle") {
  CnnConfig cfg;
  cfg.input_len = 12;
  cfg.conv1_filters = 2;
  cfg.conv1_kernel = 3;
  cfg.conv2_filters = 2;
  cfg.conv2_kernel = 3;
  cfg.pool_window = 2;
  CnnModel model(cfg, 99);

  Rng rng(100);
  Tensor z({3, 12});
  test::randomize(z, rng);

  auto params = model.parameters();  // conv1 W/b, conv2 W/b, dense W/b
  Tensor x = z.reshaped({3, 1, 12});
  Tensor c1 = test::naive_conv1d(x, params[0]->value, params[1]->value, 1);
  for (std::size_t i = 0; i < c1.size(); ++i) c1[i] = std::max(0.0, c1[i]);
  Tensor p1 = test::naive_maxpool1d(c1, 2);
  Tensor c2 = test::naive_conv1d(p1, params[2]->value, params[3]->value, 1);
  for (std::size_t i = 0; i < c2.size(); ++i) c2[i] = std::max(0.0, c2[i]);
  Tensor p2 = test::naive_maxpool1d(c2, 2);
  Tensor flat = p2.reshaped({3, cfg.flatten_dim()});
  Tensor logits = test::naive_dense(flat, params[4]->value, params[5]->value);
  Tensor oracle = test::naive_softmax(logits);

  CHECK(max_abs_diff(model.forward(z), oracle) <= 1e-10);
}

TEST_CASE("training reaches 99% on linearly separable fused data in 10 epochs") {
  FusedDataset data = separable_fused(200, 42);
  // oracle: a linear probe confirms the task is trivially separable
  CHECK(test::linear_probe_accuracy(data.features, data.labels, data.features,
                                    data.labels) >= 0.99);

  CnnModel model(CnnConfig{}, 1);
  TrainConfig cfg;  // epochs 10, batch 32, Adam, lr 1e-3
  cfg.seed = 7;
  auto stats = model.train_epochs(data.features, data.labels, cfg);
  REQUIRE(stats.size() == 10);
  CHECK(stats.back().accuracy >= 0.99);
}

TEST_CASE("lr = 0 leaves parameters untouched for any epoch count") {
  FusedDataset data = separable_fused(20, 3);
  CnnModel model(CnnConfig{}, 11);
  const auto before = model.flat_params();
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.lr = 0.0;
  model.train_epochs(data.features, data.labels, cfg);
  const auto after = model.flat_params();
  CHECK(before == after);
}

TEST_CASE("identical seeds give identical loss curves") {
  FusedDataset data = separable_fused(30, 4);
  TrainConfig cfg;
  cfg.epochs = 4;
  cfg.seed = 55;
  CnnModel a(CnnConfig{}, 2), b(CnnConfig{}, 2);
  auto sa = a.train_epochs(data.features, data.labels, cfg);
  auto sb = b.train_epochs(data.features, data.labels, cfg);
  REQUIRE(sa.size() == sb.size());
  for (std::size_t i = 0; i < sa.size(); ++i) {
    CHECK(sa[i].loss == sb[i].loss);
    CHECK(sa[i].accuracy == sb[i].accuracy);
  }
  CHECK(a.flat_params() == b.flat_params());
}

TEST_CASE("training error paths") {
  CnnModel model(CnnConfig{}, 1);
  TrainConfig cfg;
  CHECK_THROWS_AS(model.train_epochs(Tensor({0, 64}), {}, cfg), TrainError);
  CHECK_THROWS_AS(
      model.train_epochs(Tensor({2, 64}), {0, 3}, cfg), DataError);  // bad label
  CHECK_THROWS_AS(model.train_epochs(Tensor({2, 64}), {0}, cfg), DimensionError);
}

TEST_CASE("predict takes the argmax with ties to the lowest class") {
  CnnModel model(CnnConfig{}, 5);
  zero_params(model);  // uniform probabilities: a three-way tie
  Rng rng(8);
  Tensor z({5, 64});
  test::randomize(z, rng);
  for (int label : model.predict(z)) CHECK(label == 0);

  // bias the dense layer toward class 2: prediction follows the one-hot row
  auto params = model.parameters();
  params[5]->value[2] = 50.0;
  for (int label : model.predict(z)) CHECK(label == 2);
}

TEST_CASE("predict agrees with an external argmax of forward probabilities") {
  CnnModel model(CnnConfig{}, 9);
  Rng rng(10);
  Tensor z({16, 64});
  test::randomize(z, rng);
  Tensor probs = model.forward(z);
  auto labels = model.predict(z);
  for (std::size_t i = 0; i < 16; ++i) {
    int best = 0;
    for (int j = 1; j < 3; ++j)
      if (probs.at(i, j) > probs.at(i, best)) best = j;
    CHECK(labels[i] == best);
  }
}

TEST_CASE("prediction is invariant under a constant logit shift") {
  CnnModel model(CnnConfig{}, 12);
  Rng rng(13);
  Tensor z({10, 64});
  test::randomize(z, rng);
  const auto before = model.predict(z);
  // shift every class logit by the same constant via the dense bias
  auto params = model.parameters();
  for (std::size_t j = 0; j < 3; ++j) params[5]->value[j] += 123.0;
  const auto after = model.predict(z);
  CHECK(before == after);
}

TEST_CASE("one full-batch SGD epoch moves parameters by exactly -lr * grad") {
  CnnConfig cfg;
  cfg.input_len = 12;
  cfg.conv1_filters = 2;
  cfg.conv1_kernel = 3;
  cfg.conv2_filters = 2;
  cfg.conv2_kernel = 3;
  CnnModel model(cfg, 21);

  Rng rng(22);
  const std::size_t n = 20;
  Tensor X({n, 12});
  test::randomize(X, rng);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<int>(rng.index(3));
  const Tensor targets = one_hot(y, 3);

  const std::vector<double> theta0 = model.flat_params();

  // central finite differences of the full-batch loss at theta0
  auto loss_at = [&](const std::vector<double>& flat) {
    CnnModel probe(cfg, 0);
    probe.set_flat_params(flat);
    return cross_entropy_loss(probe.forward(X), targets);
  };
  std::vector<double> grad(theta0.size());
  const double h = 1e-6;
  for (std::size_t i = 0; i < theta0.size(); ++i) {
    std::vector<double> bumped = theta0;
    bumped[i] = theta0[i] + h;
    const double plus = loss_at(bumped);
    bumped[i] = theta0[i] - h;
    const double minus = loss_at(bumped);
    grad[i] = (plus - minus) / (2.0 * h);
  }

  const double lr = 0.01;
  TrainConfig tc;
  tc.epochs = 1;
  tc.batch = n;  // full batch: one plain gradient step
  tc.lr = lr;
  tc.optimizer = OptimizerKind::Sgd;
  model.train_epochs(X, y, tc);

  const std::vector<double> theta1 = model.flat_params();
  for (std::size_t i = 0; i < theta0.size(); ++i)
    CHECK(std::fabs(theta1[i] - (theta0[i] - lr * grad[i])) <= 1e-9);
}

TEST_CASE("parameter count is a pure function of the configuration") {
  CnnConfig cfg;  // 64 -> 60 -> 30 -> 28 -> 14 -> flatten 448 -> 3
  CHECK(cfg.conv1_out_len() == 60);
  CHECK(cfg.pool1_out_len() == 30);
  CHECK(cfg.conv2_out_len() == 28);
  CHECK(cfg.pool2_out_len() == 14);
  CHECK(cfg.flatten_dim() == 448);
  CHECK(cfg.param_count() == 16 * 5 + 16 + 32 * 16 * 3 + 32 + 448 * 3 + 3);
  CHECK(cfg.param_count() < 20000);
  CnnModel model(cfg, 1);
  CHECK(model.param_count() == cfg.param_count());

  CnnConfig single;
  single.input_len = 32;  // the single-modality arms
  CHECK(single.flatten_dim() == 32 * 6);
  CHECK_NOTHROW(CnnModel(single, 1));

  CnnConfig bad;
  bad.input_len = 4;
  CHECK_THROWS_AS(CnnModel(bad, 1), DimensionError);
}

TEST_CASE("flat parameter views round-trip and validate length") {
  CnnModel model(CnnConfig{}, 31);
  const auto flat = model.flat_params();
  CnnModel other(CnnConfig{}, 32);
  other.set_flat_params(flat);
  CHECK(other.flat_params() == flat);
  CHECK_THROWS_AS(other.set_flat_params(std::vector<double>(5)), DimensionError);
}

TEST_CASE("classifier checkpoints restore bit-identical 32-bit parameters") {
  CnnModel model(CnnConfig{}, 41);
  const auto path =
      (std::filesystem::temp_directory_path() / "evsefl_cnn_ckpt.bin").string();
  save_checkpoint(path, model.to_checkpoint());
  Checkpoint loaded = load_checkpoint(path);
  CHECK(loaded.arch == "cnn1d");
  CnnModel restored = CnnModel::from_checkpoint(loaded);
  const auto a = model.flat_params();
  const auto b = restored.flat_params();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(static_cast<float>(a[i]) == static_cast<float>(b[i]));

  // reload-and-save is byte-stable
  const auto path2 =
      (std::filesystem::temp_directory_path() / "evsefl_cnn_ckpt2.bin").string();
  save_checkpoint(path2, restored.to_checkpoint());
  std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
  std::string s1((std::istreambuf_iterator<char>(f1)), {});
  std::string s2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(s1 == s2);
}
