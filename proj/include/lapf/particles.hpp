#pragma once

#include "lapf/core.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace lapf {

/// Weighted particle ensemble. One particle per column of `states`.
template <typename Scalar>
struct BasicParticleSet {
  MatrixX<Scalar> states;
  VectorX<Scalar> weights;

  Index size() const { return states.cols(); }
  Index dim() const { return states.rows(); }
};

using ParticleSet = BasicParticleSet<double>;

template <typename Scalar>
struct BasicPriorSpec {
  VectorX<Scalar> mean;
  VectorX<Scalar> cov_diag;

  void validate() const {
    if (mean.size() != cov_diag.size()) throw ConfigError("prior mean/covariance size mismatch");
    if ((cov_diag.array() < Scalar(0)).any() || !cov_diag.allFinite())
      throw ConfigError("prior variances must be finite and nonnegative");
  }
};

using PriorSpec = BasicPriorSpec<double>;

/// i.i.d. Gaussian draws from the prior with uniform weights.
template <typename Scalar>
BasicParticleSet<Scalar> init_particles(const BasicPriorSpec<Scalar>& prior, Index count,
                                        RandomStream& rng) {
  if (count < 1) throw InvalidInput("init_particles: particle count must be at least 1");
  prior.validate();
  const Index n = prior.mean.size();
  const VectorX<Scalar> sd = prior.cov_diag.cwiseSqrt();
  BasicParticleSet<Scalar> out;
  out.states.resize(n, count);
  for (Index i = 0; i < count; ++i)
    for (Index r = 0; r < n; ++r)
      out.states(r, i) = prior.mean(r) + sd(r) * static_cast<Scalar>(rng.normal());
  out.weights = VectorX<Scalar>::Constant(count, Scalar(1) / Scalar(count));
  return out;
}

/// Replaces the weights by the normalized likelihoods. Negative or
/// non-finite likelihoods count as zero; if nothing positive remains the
/// weights fall back to uniform and `degenerate_steps` is incremented.
template <typename Scalar, typename Derived>
BasicParticleSet<Scalar> update_weights(BasicParticleSet<Scalar> particles,
                                        const Eigen::MatrixBase<Derived>& likelihoods,
                                        std::size_t& degenerate_steps) {
  if (likelihoods.size() != particles.size())
    throw InvalidInput("update_weights: likelihood count does not match particle count");
  VectorX<Scalar> w = likelihoods.unaryExpr([](Scalar l) {
    return (std::isfinite(l) && l > Scalar(0)) ? l : Scalar(0);
  });
  const Scalar total = w.sum();
  if (!(total > Scalar(0)) || !std::isfinite(total)) {
    particles.weights.setConstant(Scalar(1) / Scalar(particles.size()));
    ++degenerate_steps;
  } else {
    particles.weights = w / total;
  }
  return particles;
}

template <typename Scalar, typename Derived>
BasicParticleSet<Scalar> update_weights(BasicParticleSet<Scalar> particles,
                                        const Eigen::MatrixBase<Derived>& likelihoods) {
  std::size_t ignored = 0;
  return update_weights(std::move(particles), likelihoods, ignored);
}

/// Systematic resampling for a given offset u in [0, 1): pointer i sits at
/// (u + i) / N on the cumulative weight function and selects the particle
/// whose cumulative interval contains it. N defaults to the number of weights.
template <typename Derived>
std::vector<Index> systematic_indices(const Eigen::MatrixBase<Derived>& weights, double offset, Index draws = -1) {
  using Scalar = typename Derived::Scalar;
  if (weights.size() == 0) throw InvalidInput("systematic_indices: no weights");
  const Index count = draws < 0 ? weights.size() : draws;
  const Index last = weights.size() - 1;
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(count));
  const Scalar total = weights.sum();
  Scalar cumulative = weights(0);
  Index j = 0;
  for (Index i = 0; i < count; ++i) {
    const Scalar pointer = (static_cast<Scalar>(offset) + Scalar(i)) * total / Scalar(count);
    while (j < last && !(pointer < cumulative)) {
      ++j;
      cumulative += weights(j);
    }
    out.push_back(j);
  }
  return out;
}

template <typename Scalar>
BasicParticleSet<Scalar> resample(const BasicParticleSet<Scalar>& particles, double offset) {
  const auto idx = systematic_indices(particles.weights, offset);
  BasicParticleSet<Scalar> out;
  out.states.resize(particles.dim(), particles.size());
  for (Index i = 0; i < particles.size(); ++i) out.states.col(i) = particles.states.col(idx[i]);
  out.weights = VectorX<Scalar>::Constant(particles.size(), Scalar(1) / Scalar(particles.size()));
  return out;
}

/// Systematic resampling with one uniform offset drawn from `rng`.
template <typename Scalar>
BasicParticleSet<Scalar> resample(const BasicParticleSet<Scalar>& particles, RandomStream& rng) {
  return resample(particles, rng.uniform());
}

template <typename Scalar>
VectorX<Scalar> posterior_mean(const BasicParticleSet<Scalar>& particles) {
  return particles.states * particles.weights;
}

/// 1 / sum(w^2) for normalized weights.
template <typename Scalar>
Scalar effective_sample_size(const BasicParticleSet<Scalar>& particles) {
  return Scalar(1) / particles.weights.squaredNorm();
}

}  // namespace lapf
