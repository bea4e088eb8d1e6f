#include "lapf/statespace.hpp"

#include <doctest.h>

using namespace lapf;

TEST_CASE("canal step with noise at its mean") {
  const auto m = canal_plant();
  const Eigen::VectorXd x = step_plant(m, Eigen::VectorXd::Zero(5), m.noise_mean);
  Eigen::VectorXd expected(5);
  expected << 1, 0, 0, 0, 0;
  CHECK(x.isApprox(expected));
}

TEST_CASE("canal matrix entries") {
  const auto m = canal_plant();
  CHECK(m.A(0, 0) == 0.4);
  CHECK(m.A(1, 0) == 0.6);
  CHECK(m.A(2, 1) == 0.7);
  CHECK(m.A(4, 3) == 0.6);
  CHECK(m.A(4, 4) == 0.5);
  CHECK(m.A.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().isZero());
  CHECK(m.x0_true.isApprox(Eigen::VectorXd::Constant(5, 2.5)));
}

TEST_CASE("projection keeps the state in the box") {
  const auto m = canal_plant();
  Eigen::VectorXd big = Eigen::VectorXd::Constant(5, 100.0);
  CHECK(step_plant(m, big, m.noise_mean).maxCoeff() == 5.0);
  Eigen::VectorXd w = Eigen::VectorXd::Constant(5, -100.0);
  CHECK(step_plant(m, Eigen::VectorXd::Zero(5), w).minCoeff() == 0.0);
}

TEST_CASE("noise moments match mean and variance away from the clamp") {
  // Start mid-box and use small noise so the clamp never engages.
  auto m = canal_plant();
  m.noise_cov = Eigen::VectorXd::Constant(5, 0.04);
  m.noise_mean = Eigen::VectorXd::Zero(5);
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(5, 2.0);
  const Eigen::VectorXd mean = m.A * x;
  RandomStream rng(3);
  const int n = 200000;
  Eigen::VectorXd s = Eigen::VectorXd::Zero(5), s2 = Eigen::VectorXd::Zero(5);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd d = step_plant(m, x, rng) - mean;
    s += d;
    s2 += d.cwiseProduct(d);
  }
  for (int r = 0; r < 5; ++r) {
    const double mu = s(r) / n;
    const double var = s2(r) / n - mu * mu;
    CHECK(std::abs(mu) < 4.0 * std::sqrt(0.04 / n));
    // Var of the sample variance of a Gaussian is 2 sigma^4 / n.
    CHECK(std::abs(var - 0.04) < 4.0 * std::sqrt(2.0 * 0.04 * 0.04 / n));
  }
}

TEST_CASE("zero variance makes the plant deterministic") {
  auto m = canal_plant();
  m.noise_cov.setZero();
  m.validate();
  RandomStream rng(1);
  ParticleSet p{Eigen::MatrixXd::Constant(5, 3, 1.0), Eigen::VectorXd::Constant(3, 1.0 / 3)};
  const auto next = propagate_particles(m, p, rng);
  const Eigen::VectorXd expected = m.A * Eigen::VectorXd::Ones(5) + m.noise_mean;
  for (Index i = 0; i < 3; ++i) CHECK(next.states.col(i).isApprox(expected));
}

TEST_CASE("propagation errors") {
  const auto m = canal_plant();
  RandomStream rng(1);
  CHECK_THROWS_AS(propagate_particles(m, ParticleSet{Eigen::MatrixXd(5, 0), Eigen::VectorXd(0)}, rng), InvalidInput);
  CHECK_THROWS_AS(propagate_particles(m, ParticleSet{Eigen::MatrixXd::Zero(3, 2), Eigen::VectorXd::Ones(2)}, rng),
                  ConfigError);
  CHECK_THROWS_AS(step_plant(m, Eigen::VectorXd::Zero(4), rng), ConfigError);
  auto bad = m;
  bad.noise_cov(2) = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = m;
  bad.A.resize(5, 4);
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("long-run mean of the unclamped linear recursion") {
  // Without the clamp the mean obeys mu = A mu + u, i.e. mu = (I - A)^-1 u.
  const auto m = canal_plant();
  const Eigen::VectorXd mu = (Eigen::MatrixXd::Identity(5, 5) - m.A).partialPivLu().solve(m.noise_mean);
  Eigen::VectorXd expected(5);
  expected << 5.0 / 3.0, 10.0 / 7.0, 2.0, 5.0 / 3.0, 2.0;
  CHECK(mu.isApprox(expected, 1e-12));
}
