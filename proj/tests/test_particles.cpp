#include "lapf/particles.hpp"

#include <doctest.h>

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace lapf;

namespace {

std::vector<long> counts_of(const std::vector<Index>& idx, Index n) {
  std::vector<long> c(static_cast<std::size_t>(n), 0);
  for (Index i : idx) ++c[static_cast<std::size_t>(i)];
  return c;
}

}  // namespace

TEST_CASE("prior draws") {
  RandomStream rng(3);
  const PriorSpec prior{Eigen::VectorXd::Zero(5), Eigen::VectorXd::Ones(5)};
  const auto one = init_particles(prior, 1, rng);
  CHECK(one.size() == 1);
  CHECK(one.weights(0) == 1.0);

  const PriorSpec fixed{Eigen::VectorXd::Constant(5, 2.5), Eigen::VectorXd::Zero(5)};
  const auto same = init_particles(fixed, 10, rng);
  CHECK((same.states.array() == 2.5).all());

  const Index n = 100000;
  const auto many = init_particles(prior, n, rng);
  const Eigen::VectorXd mean = many.states.rowwise().mean();
  CHECK(mean.cwiseAbs().maxCoeff() < 4.0 / std::sqrt(double(n)));
  CHECK(many.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(init_particles(prior, 0, rng), InvalidInput);
  const PriorSpec bad{Eigen::VectorXd::Zero(5), Eigen::VectorXd::Constant(5, -1.0)};
  CHECK_THROWS_AS(init_particles(bad, 3, rng), ConfigError);
}

TEST_CASE("weight update normalizes and falls back to uniform") {
  ParticleSet p;
  p.states = Eigen::MatrixXd::Zero(1, 3);
  p.weights = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
  std::size_t degenerate = 0;
  const auto a = update_weights(p, Eigen::Vector3d(2.0, 1.0, 1.0), degenerate);
  CHECK(a.weights(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(a.weights(1) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(degenerate == 0);

  const auto b = update_weights(p, Eigen::Vector3d::Zero(), degenerate);
  CHECK(degenerate == 1);
  CHECK((b.weights.array() == 1.0 / 3.0).all());

  const auto c = update_weights(p, Eigen::Vector3d(std::nan(""), -1.0, 4.0), degenerate);
  CHECK(c.weights(2) == 1.0);
  CHECK(degenerate == 1);
  CHECK_THROWS_AS(update_weights(p, Eigen::Vector2d(1.0, 1.0)), InvalidInput);
}

TEST_CASE("systematic resampling on uniform and single-mass weights") {
  const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(8, 0.125);
  for (double u : {0.0, 0.3, 0.999}) {
    const auto idx = systematic_indices(uniform, u);
    for (Index i = 0; i < 8; ++i) CHECK(idx[static_cast<std::size_t>(i)] == i);
  }
  Eigen::VectorXd heavy = Eigen::VectorXd::Zero(6);
  heavy(4) = 1.0;
  for (Index i : systematic_indices(heavy, 0.7)) CHECK(i == 4);
}

TEST_CASE("weights 0.5, 0.3, 0.2 with ten particles give counts 5, 3, 2 for any offset") {
  const Eigen::Vector3d w(0.5, 0.3, 0.2);
  for (double u : {0.0, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.999999}) {
    CAPTURE(u);
    const auto c = counts_of(systematic_indices(w, u, 10), 3);
    CHECK(c == std::vector<long>{5, 3, 2});
    CHECK(testing::systematic_counts(w, u, 10) == std::vector<long>{5, 3, 2});
  }
}

TEST_CASE("systematic counts match the floor and ceiling formula") {
  RandomStream rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 1 + static_cast<Index>(rng.index(40));
    Eigen::VectorXd w(n);
    for (Index i = 0; i < n; ++i) w(i) = rng.uniform() < 0.2 ? 0.0 : rng.uniform();
    if (w.sum() == 0.0) w(0) = 1.0;
    w /= w.sum();
    const double u = rng.uniform();
    const auto counts = counts_of(systematic_indices(w, u), n);
    CHECK(counts == testing::systematic_counts(w, u));
    for (Index i = 0; i < n; ++i) {
      const double expected = n * w(i);
      CHECK(counts[static_cast<std::size_t>(i)] >= std::floor(expected) - 1e-9);
      CHECK(counts[static_cast<std::size_t>(i)] <= std::ceil(expected) + 1e-9);
    }
  }
}

TEST_CASE("resampled set keeps the selected columns with uniform weights") {
  ParticleSet p;
  p.states.resize(2, 3);
  p.states << 1, 2, 3, 4, 5, 6;
  p.weights = Eigen::Vector3d(0.0, 1.0, 0.0);
  const auto r = resample(p, 0.5);
  CHECK((r.states.row(0).array() == 2.0).all());
  CHECK((r.states.row(1).array() == 5.0).all());
  CHECK((r.weights.array() == 1.0 / 3.0).all());
}

TEST_CASE("posterior mean and effective sample size") {
  ParticleSet p;
  p.states.resize(2, 4);
  p.states << 1, 2, 3, 4, 0, 0, 8, 0;
  p.weights = Eigen::Vector4d(0.1, 0.2, 0.3, 0.4);
  double m0 = 0.0, m1 = 0.0;
  for (int i = 0; i < 4; ++i) {
    m0 += p.weights(i) * p.states(0, i);
    m1 += p.weights(i) * p.states(1, i);
  }
  const auto mean = posterior_mean(p);
  CHECK(mean(0) == doctest::Approx(m0).epsilon(1e-15));
  CHECK(mean(1) == doctest::Approx(m1).epsilon(1e-15));
  CHECK(effective_sample_size(p) == doctest::Approx(1.0 / 0.3).epsilon(1e-14));
  p.weights.setConstant(0.25);
  CHECK(effective_sample_size(p) == doctest::Approx(4.0).epsilon(1e-14));
}
