#include "lapf/mlp.hpp"

#include <doctest.h>

#include "oracles.hpp"

#include <vector>

using namespace lapf;

namespace {

const std::vector<Index> kSmall = {6, 4, 3, 5};

}  // namespace

TEST_CASE("zero network predicts uniform labels and the middle value") {
  const auto c = zero_mlp<double>(kSmall, HeadKind::softmax);
  const Eigen::VectorXd e = Eigen::VectorXd::LinSpaced(6, -1.0, 1.0);
  const auto p = classify(c, e);
  for (Index i = 0; i < 5; ++i) CHECK(p(i) == doctest::Approx(0.2).epsilon(1e-15));
  const std::vector<Index> reg = {6, 4, 1};
  CHECK(regress(zero_mlp<double>(reg, HeadKind::sigmoid_scaled), e) == 2.5);
}

TEST_CASE("softmax is stable for large logits") {
  Eigen::MatrixXd z(3, 2);
  z << 1000.0, -1000.0, 0.0, -1000.0, -5.0, 1000.0;
  const auto p = softmax_columns(z);
  CHECK(p.allFinite());
  CHECK(p(0, 0) == doctest::Approx(1.0));
  CHECK(p(2, 1) == doctest::Approx(1.0));
  CHECK(p.col(0).sum() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("forward pass matches a loop implementation") {
  RandomStream rng(4);
  const auto m = init_mlp<double>(kSmall, HeadKind::softmax, rng);
  Eigen::MatrixXd X(6, 7);
  for (Index i = 0; i < X.size(); ++i) X.data()[i] = rng.normal();
  const auto f = forward(m, X);
  for (Index c = 0; c < X.cols(); ++c)
    CHECK((f.logits.col(c) - testing::naive_logits(m, X.col(c))).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_THROWS_AS(forward(m, Eigen::MatrixXd::Zero(5, 1)), ConfigError);
}

TEST_CASE("glorot initialization bounds") {
  RandomStream rng(5);
  const std::vector<Index> sizes = {256, 128, 64, 5};
  const auto m = init_mlp<double>(sizes, HeadKind::softmax, rng);
  for (const auto& l : m.layers) {
    const double bound = std::sqrt(6.0 / double(l.weight.rows() + l.weight.cols()));
    CHECK(l.weight.cwiseAbs().maxCoeff() <= bound);
    CHECK(l.weight.cwiseAbs().maxCoeff() > 0.9 * bound);
    CHECK(l.bias.isZero());
  }
}

TEST_CASE("regression output stays in range") {
  RandomStream rng(6);
  const std::vector<Index> sizes = {6, 4, 1};
  auto m = init_mlp<double>(sizes, HeadKind::sigmoid_scaled, rng);
  for (auto& l : m.layers) l.weight *= 50.0;
  for (int t = 0; t < 200; ++t) {
    Eigen::VectorXd e(6);
    for (Index i = 0; i < 6; ++i) e(i) = 10.0 * rng.normal();
    const double y = regress(m, e);
    CHECK(y >= 0.0);
    CHECK(y <= 5.0);
  }
  CHECK_THROWS_AS(classify(m, Eigen::VectorXd::Zero(6)), ConfigError);
}

TEST_CASE("gradients agree with central differences") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CAPTURE(seed);
    CHECK(testing::gradient_check(seed, HeadKind::softmax) < 1e-4);
    CHECK(testing::gradient_check(seed, HeadKind::sigmoid_scaled) < 1e-4);
  }
}

TEST_CASE("cross-entropy gradient of the logits is probabilities minus one-hot") {
  // A single linear layer with identity weights makes the logits equal the input.
  Mlp m = zero_mlp<double>(std::vector<Index>{3, 3}, HeadKind::softmax);
  m.layers[0].weight.setIdentity();
  const Eigen::Vector3d x(0.3, -1.2, 2.0);
  const std::vector<int> label = {1};
  const auto g = backward(m, Eigen::MatrixXd(x), std::span<const int>(label));
  Eigen::Vector3d expected = softmax_columns(Eigen::MatrixXd(x)).col(0);
  expected(1) -= 1.0;
  CHECK((g.gradient.layers[0].bias - expected).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(g.loss == doctest::Approx(cross_entropy_loss(m, Eigen::MatrixXd(x), std::span<const int>(label))));
}

TEST_CASE("squared error vanishes at the matching target") {
  Mlp m = zero_mlp<double>(std::vector<Index>{2, 1}, HeadKind::sigmoid_scaled);
  const Eigen::MatrixXd X = Eigen::MatrixXd::Ones(2, 1);
  const auto g = backward(m, X, Eigen::VectorXd::Constant(1, 2.5));
  CHECK(g.loss == 0.0);
  CHECK(g.gradient.squared_norm() == 0.0);
  const auto off = backward(m, X, Eigen::VectorXd::Constant(1, 3.5));
  CHECK(off.loss == doctest::Approx(1.0));
  // d/dz (5 s - 3.5)^2 at s = 1/2 is 2 * (-1) * 5 / 4.
  CHECK(off.gradient.layers[0].bias(0) == doctest::Approx(-2.5).epsilon(1e-15));
}

TEST_CASE("adam step against a hand computation") {
  Mlp p = zero_mlp<double>(std::vector<Index>{1, 1}, HeadKind::sigmoid_scaled);
  p.layers[0].weight(0, 0) = 1.0;
  Mlp g = p;
  g.layers[0].weight(0, 0) = 0.5;
  g.layers[0].bias(0) = -2.0;
  AdamSettings<double> s;
  s.learning_rate = 0.1;
  AdamOptimizer<double> opt(p, s);
  opt.step(p, g);
  // First step: m_hat = g, v_hat = g^2, so the move is lr * g / (|g| + eps).
  CHECK(p.layers[0].weight(0, 0) == doctest::Approx(1.0 - 0.1 * 0.5 / (0.5 + 1e-8)).epsilon(1e-15));
  CHECK(p.layers[0].bias(0) == doctest::Approx(0.1 * 2.0 / (2.0 + 1e-8)).epsilon(1e-15));

  // Second step with a new gradient, from the recurrences.
  g.layers[0].weight(0, 0) = 0.1;
  const double m1 = 0.1 * 0.5 * 1.0, v1 = 0.001 * 0.25;
  const double m2 = 0.9 * m1 + 0.1 * 0.1, v2 = 0.999 * v1 + 0.001 * 0.01;
  const double mh = m2 / (1 - 0.81), vh = v2 / (1 - 0.999 * 0.999);
  const double before = p.layers[0].weight(0, 0);
  opt.step(p, g);
  CHECK(p.layers[0].weight(0, 0) == doctest::Approx(before - 0.1 * mh / (std::sqrt(vh) + 1e-8)).epsilon(1e-14));
  CHECK(opt.steps() == 2);
}

TEST_CASE("network validation") {
  CHECK_THROWS_AS(zero_mlp<double>(std::vector<Index>{3}, HeadKind::softmax), ConfigError);
  CHECK_THROWS_AS(zero_mlp<double>(std::vector<Index>{3, 0, 2}, HeadKind::softmax), ConfigError);
  CHECK_THROWS_AS(zero_mlp<double>(std::vector<Index>{3, 2}, HeadKind::sigmoid_scaled), ConfigError);
  CHECK(parse_head_kind(to_string(HeadKind::sigmoid_scaled)) == HeadKind::sigmoid_scaled);
  CHECK_THROWS(parse_head_kind("tanh"));
}
