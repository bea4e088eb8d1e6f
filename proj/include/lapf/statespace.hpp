#pragma once

#include "lapf/core.hpp"
#include "lapf/particles.hpp"

namespace lapf {

template <typename Scalar>
struct BasicGaussianSpec {
  VectorX<Scalar> mean;
  VectorX<Scalar> cov_diag;
};

/// Linear Gaussian dynamics followed by component-wise projection:
///   x_k = proj_[clamp_lo, clamp_hi](A x_{k-1} + w_k),  w_k ~ N(noise_mean, diag(noise_cov)).
template <typename Scalar>
struct BasicPlantModel {
  MatrixX<Scalar> A;
  VectorX<Scalar> noise_mean;
  VectorX<Scalar> noise_cov;
  Scalar clamp_lo = Scalar(0);
  Scalar clamp_hi = Scalar(5);
  VectorX<Scalar> x0_true;

  Index dim() const { return A.rows(); }

  /// Zero variances are accepted for deterministic runs.
  void validate() const {
    const Index n = A.rows();
    if (n == 0 || A.cols() != n) throw ConfigError("plant matrix must be square and nonempty");
    if (noise_mean.size() != n || noise_cov.size() != n)
      throw ConfigError("plant noise dimension does not match the state dimension");
    if (x0_true.size() != 0 && x0_true.size() != n)
      throw ConfigError("plant initial state dimension does not match the state dimension");
    if ((noise_cov.array() < Scalar(0)).any() || !noise_cov.allFinite())
      throw ConfigError("plant noise variances must be finite and nonnegative");
    if (!(clamp_lo < clamp_hi)) throw ConfigError("plant clamp must satisfy lower < upper");
  }
};

using PlantModel = BasicPlantModel<double>;
using GaussianSpec = BasicGaussianSpec<double>;

/// The five-reach irrigation canal.
template <typename Scalar = double>
BasicPlantModel<Scalar> canal_plant() {
  BasicPlantModel<Scalar> m;
  m.A.resize(5, 5);
  m.A << 0.4, 0.0, 0.0, 0.0, 0.0,
         0.6, 0.3, 0.0, 0.0, 0.0,
         0.0, 0.7, 0.5, 0.0, 0.0,
         0.0, 0.0, 0.5, 0.4, 0.0,
         0.0, 0.0, 0.0, 0.6, 0.5;
  m.noise_mean.resize(5);
  m.noise_mean << 1.0, 0.0, 0.0, 0.0, 0.0;
  m.noise_cov.resize(5);
  m.noise_cov << 1.0, 0.1, 0.1, 0.1, 0.1;
  m.clamp_lo = Scalar(0);
  m.clamp_hi = Scalar(5);
  m.x0_true = VectorX<Scalar>::Constant(5, Scalar(2.5));
  return m;
}

/// One transition with an explicit noise realization.
template <typename Scalar, typename DerivedX, typename DerivedW>
VectorX<Scalar> step_plant(const BasicPlantModel<Scalar>& model,
                           const Eigen::MatrixBase<DerivedX>& x_prev,
                           const Eigen::MatrixBase<DerivedW>& noise) {
  if (x_prev.size() != model.dim() || noise.size() != model.dim())
    throw ConfigError("step_plant: state dimension mismatch");
  return project(model.A * x_prev + noise, model.clamp_lo, model.clamp_hi);
}

template <typename Scalar, typename Derived>
VectorX<Scalar> step_plant(const BasicPlantModel<Scalar>& model,
                           const Eigen::MatrixBase<Derived>& x_prev, RandomStream& rng) {
  if (x_prev.size() != model.dim()) throw ConfigError("step_plant: state dimension mismatch");
  VectorX<Scalar> w(model.dim());
  for (Index r = 0; r < model.dim(); ++r)
    w(r) = model.noise_mean(r) + std::sqrt(model.noise_cov(r)) * static_cast<Scalar>(rng.normal());
  return step_plant(model, x_prev, w);
}

/// Advances every particle with its own noise draw. Weights are untouched.
template <typename Scalar>
BasicParticleSet<Scalar> propagate_particles(const BasicPlantModel<Scalar>& model,
                                             BasicParticleSet<Scalar> particles,
                                             RandomStream& rng) {
  if (particles.size() == 0) throw InvalidInput("propagate_particles: empty particle set");
  if (particles.dim() != model.dim())
    throw ConfigError("propagate_particles: particle dimension mismatch");
  const Index n = model.dim();
  const VectorX<Scalar> sd = model.noise_cov.cwiseSqrt();
  MatrixX<Scalar> next = model.A * particles.states;
  for (Index i = 0; i < particles.size(); ++i)
    for (Index r = 0; r < n; ++r)
      next(r, i) += model.noise_mean(r) + sd(r) * static_cast<Scalar>(rng.normal());
  particles.states = project(next, model.clamp_lo, model.clamp_hi);
  return particles;
}

}  // namespace lapf
