#pragma once

#include "lapf/core.hpp"
#include "lapf/gaussian.hpp"
#include "lapf/humansensor.hpp"
#include "lapf/quantization.hpp"

#include <cmath>
#include <functional>
#include <span>

namespace lapf {

/// p(q | x) for a Gaussian cognitive model with clamping. With
/// mu = C x + noise_mean and the pre-clamp value ~ N(mu, sigma^2), label i
/// receives the mass between its boundaries; the mass censored below lo
/// and above hi falls on the first and last label, so the outer labels use
/// -inf and +inf as their outer edges.
template <typename Scalar, typename Derived>
VectorX<Scalar> label_prob_given_state(const BasicQuantizationScheme<Scalar>& scheme,
                                       const BasicCognitiveModel<Scalar>& cognitive,
                                       const Eigen::MatrixBase<Derived>& x) {
  if (!(cognitive.noise_var > Scalar(0)))
    throw ConfigError("label_prob_given_state needs a positive cognitive noise variance");
  if (x.size() != cognitive.C.size()) throw ConfigError("label_prob_given_state: state dimension mismatch");
  const Scalar mu = Scalar(cognitive.C.dot(x)) + cognitive.noise_mean;
  const Scalar sigma = std::sqrt(cognitive.noise_var);
  const int m = scheme.levels();
  const auto b = scheme.boundaries();
  VectorX<Scalar> p(m);
  Scalar below = Scalar(0);
  for (int i = 0; i < m; ++i) {
    const Scalar upper = (i + 1 < m) ? normal_cdf((b[i + 1] - mu) / sigma) : Scalar(1);
    p(i) = upper - below;
    below = upper;
  }
  return p;
}

/// label_prob_given_state for every column of `states`; result is m x N.
template <typename Scalar, typename Derived>
MatrixX<Scalar> label_probs_given_states(const BasicQuantizationScheme<Scalar>& scheme,
                                         const BasicCognitiveModel<Scalar>& cognitive,
                                         const Eigen::MatrixBase<Derived>& states) {
  if (!(cognitive.noise_var > Scalar(0)))
    throw ConfigError("label_prob_given_state needs a positive cognitive noise variance");
  if (states.rows() != cognitive.C.size()) throw ConfigError("label_probs_given_states: state dimension mismatch");
  const int m = scheme.levels();
  const auto b = scheme.boundaries();
  const Scalar sigma = std::sqrt(cognitive.noise_var);
  const RowVectorX<Scalar> mu = (cognitive.C * states).array() + cognitive.noise_mean;
  MatrixX<Scalar> p(m, states.cols());
  for (Index c = 0; c < states.cols(); ++c) {
    Scalar below = Scalar(0);
    for (int i = 0; i < m; ++i) {
      const Scalar upper = (i + 1 < m) ? normal_cdf((b[i + 1] - mu(c)) / sigma) : Scalar(1);
      p(i, c) = upper - below;
      below = upper;
    }
  }
  return p;
}

/// Generic p(q | x) by composite Simpson quadrature of a pre-clamp density
/// supported on [support_lo, support_hi]. Mass outside [lo, hi] folds into
/// the outer labels as with clamping.
template <typename Scalar>
VectorX<Scalar> label_prob_by_quadrature(const BasicQuantizationScheme<Scalar>& scheme,
                                         const std::function<Scalar(Scalar)>& density, Scalar support_lo,
                                         Scalar support_hi, int panels_per_interval = 2000) {
  if (!(support_lo < support_hi)) throw ConfigError("quadrature support must be nonempty");
  if (panels_per_interval < 2) throw ConfigError("quadrature needs at least two panels");
  const int m = scheme.levels();
  const auto b = scheme.boundaries();
  auto simpson = [&](Scalar a, Scalar c) {
    if (!(c > a)) return Scalar(0);
    const int n = panels_per_interval + (panels_per_interval % 2);
    const Scalar h = (c - a) / Scalar(n);
    Scalar s = density(a) + density(c);
    for (int k = 1; k < n; ++k) s += (k % 2 ? Scalar(4) : Scalar(2)) * density(a + h * Scalar(k));
    return s * h / Scalar(3);
  };
  VectorX<Scalar> p(m);
  for (int i = 0; i < m; ++i) {
    const Scalar left = (i == 0) ? support_lo : std::max(support_lo, b[i]);
    const Scalar right = (i + 1 == m) ? support_hi : std::min(support_hi, b[i + 1]);
    p(i) = simpson(left, right);
  }
  return p;
}

/// Sum_j p(q_j | s) p(q_j | x): the text likelihood up to a constant that
/// is the same for every particle.
template <typename DerivedS, typename DerivedX>
typename DerivedS::Scalar lapf_likelihood(const Eigen::MatrixBase<DerivedS>& p_q_given_s,
                                          const Eigen::MatrixBase<DerivedX>& p_q_given_x) {
  if (p_q_given_s.size() != p_q_given_x.size()) throw ConfigError("label distribution sizes differ");
  return p_q_given_s.dot(p_q_given_x);
}

template <typename Scalar, typename DerivedS, typename DerivedX>
Scalar lapf_likelihood(const BasicQuantizationScheme<Scalar>& scheme, const BasicCognitiveModel<Scalar>& cognitive,
                       const Eigen::MatrixBase<DerivedS>& p_q_given_s, const Eigen::MatrixBase<DerivedX>& x) {
  return lapf_likelihood(p_q_given_s, label_prob_given_state(scheme, cognitive, x));
}

/// Per-particle LAPF likelihoods for one text.
template <typename Scalar, typename DerivedS, typename DerivedX>
VectorX<Scalar> lapf_likelihoods(const BasicQuantizationScheme<Scalar>& scheme,
                                 const BasicCognitiveModel<Scalar>& cognitive,
                                 const Eigen::MatrixBase<DerivedS>& p_q_given_s,
                                 const Eigen::MatrixBase<DerivedX>& states) {
  if (p_q_given_s.size() != scheme.levels()) throw ConfigError("label distribution size does not match the scheme");
  return (p_q_given_s.transpose() * label_probs_given_states(scheme, cognitive, states)).transpose();
}

/// Density of a pseudo-observation under N(proj(C x + noise_mean), sigma^2 + r_tilde).
template <typename Scalar, typename Derived>
Scalar edapf_likelihood(const BasicCognitiveModel<Scalar>& cognitive, Scalar r_tilde, Scalar y_tilde,
                        const Eigen::MatrixBase<Derived>& x) {
  if (!(r_tilde > Scalar(0))) throw ConfigError("pseudo-observation noise variance must be positive");
  if (x.size() != cognitive.C.size()) throw ConfigError("edapf_likelihood: state dimension mismatch");
  const Scalar mean = project(Scalar(cognitive.C.dot(x)) + cognitive.noise_mean, cognitive.lo, cognitive.hi);
  return normal_pdf(y_tilde, mean, cognitive.noise_var + r_tilde);
}

template <typename Scalar, typename Derived>
VectorX<Scalar> edapf_likelihoods(const BasicCognitiveModel<Scalar>& cognitive, Scalar r_tilde, Scalar y_tilde,
                                  const Eigen::MatrixBase<Derived>& states) {
  VectorX<Scalar> out(states.cols());
  for (Index c = 0; c < states.cols(); ++c) out(c) = edapf_likelihood(cognitive, r_tilde, y_tilde, states.col(c));
  return out;
}

/// Joint likelihood of conditionally independent sensors.
template <typename Scalar>
Scalar multi_sensor_likelihood(std::span<const Scalar> likelihoods) {
  Scalar p = Scalar(1);
  for (Scalar l : likelihoods) {
    if (l < Scalar(0)) throw InvalidInput("likelihoods must be nonnegative");
    p *= l;
  }
  return p;
}

}  // namespace lapf
