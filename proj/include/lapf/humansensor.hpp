#pragma once

#include "lapf/core.hpp"
#include "lapf/corpus.hpp"
#include "lapf/quantization.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace lapf {

/// y = proj_[lo, hi](C x + v),  v ~ N(noise_mean, noise_var).
template <typename Scalar>
struct BasicCognitiveModel {
  RowVectorX<Scalar> C;
  Scalar noise_mean = Scalar(0);
  Scalar noise_var = Scalar(1);
  Scalar lo = Scalar(0);
  Scalar hi = Scalar(5);

  Index dim() const { return C.size(); }
};

using CognitiveModel = BasicCognitiveModel<double>;

/// Observer of the first reach with unit perception noise on [0, 5].
inline CognitiveModel canal_observer() {
  CognitiveModel m;
  m.C = RowVectorX<double>::Zero(5);
  m.C(0) = 1.0;
  return m;
}

template <typename Scalar, typename Derived>
Scalar perceive(const BasicCognitiveModel<Scalar>& model, const Eigen::MatrixBase<Derived>& x,
                Scalar noise) {
  if (x.size() != model.C.size()) throw ConfigError("perceive: state dimension mismatch");
  return project(Scalar(model.C.dot(x)) + noise, model.lo, model.hi);
}

template <typename Scalar, typename Derived>
Scalar perceive(const BasicCognitiveModel<Scalar>& model, const Eigen::MatrixBase<Derived>& x,
                RandomStream& rng) {
  const Scalar v = model.noise_mean + std::sqrt(model.noise_var) * static_cast<Scalar>(rng.normal());
  return perceive(model, x, v);
}

struct LevelBucket {
  double level_ratio;
  std::vector<std::string> texts;
};

/// Simulated human sensor: perception, quantization and text emission from
/// a bucketed corpus. Immutable once built.
struct HumanSensorSim {
  CognitiveModel cognitive;
  QuantizationScheme scheme = QuantizationScheme::uniform(0.0, 5.0, 5);
  std::vector<LevelBucket> buckets;  // ascending level_ratio
  std::vector<std::string> ood_bank;
  std::optional<double> ood_threshold;

  /// Buckets the in-domain records of `split`.
  static HumanSensorSim from_corpus(const Corpus& corpus, Split split, CognitiveModel cognitive,
                                    QuantizationScheme scheme);
};

struct Observation {
  std::string text;
  double y = 0.0;  // cognitive value, never shown to the estimator
  int q = 0;       // its label
  bool ood = false;
};

/// Index of the bucket whose key is nearest to y's level ratio; ties go to
/// the lower key.
std::size_t nearest_bucket(const HumanSensorSim& sim, double y);

/// Samples a text for cognitive value y. Both the in-domain and the OOD
/// draw are always taken so the random stream advances identically whether
/// or not injection is enabled.
Observation emit_text(const HumanSensorSim& sim, double y, RandomStream& rng);

Observation observe(const HumanSensorSim& sim, const Eigen::VectorXd& x, RandomStream& rng);

/// `count` independent observers of the same state.
std::vector<Observation> observe_all(const HumanSensorSim& sim, const Eigen::VectorXd& x,
                                     int count, RandomStream& rng);

}  // namespace lapf
