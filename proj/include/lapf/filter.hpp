#pragma once

#include "lapf/humansensor.hpp"
#include "lapf/likelihood.hpp"
#include "lapf/particles.hpp"
#include "lapf/statespace.hpp"
#include "lapf/text_models.hpp"

#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace lapf {

/// Prediction only: the update step is skipped.
struct NoUpdate {};

/// Weights from sum_j p(q_j | s) p(q_j | x), with p(q | x) in closed form.
struct LapfLikelihoodModel {
  QuantizationScheme scheme = QuantizationScheme::uniform(0.0, 5.0, 5);
  CognitiveModel cognitive;
  std::shared_ptr<const TextClassifier> classifier;
};

/// Weights from a Gaussian density around a regressed pseudo-observation.
struct EdapfLikelihoodModel {
  CognitiveModel cognitive;
  std::shared_ptr<const TextRegressor> regressor;
  double r_tilde = 0.04;
};

using LikelihoodBackend = std::variant<NoUpdate, LapfLikelihoodModel, EdapfLikelihoodModel>;

void validate_backend(const LikelihoodBackend& backend, Index state_dim);

struct StepSummary {
  int step = 0;
  Eigen::VectorXd estimate;  // posterior mean
  double ess = 0.0;
  std::size_t degenerate = 0;  // cumulative count of uniform-fallback updates
};

/// Per-text interpretation from the latest update, for display.
struct TextReading {
  std::string text;
  Eigen::VectorXd label_distribution;  // LAPF
  double pseudo_observation = 0.0;     // EDAPF
};

/// Particle filter over text observations: each step propagates through the
/// plant, weights particles by the text likelihood, takes the posterior
/// mean, then resamples systematically. The filter sees texts only.
class LanguageAidedFilter {
 public:
  LanguageAidedFilter(PlantModel plant, LikelihoodBackend backend, const PriorSpec& prior, Index particles,
                      RandomStream rng);

  /// Summary of the prior ensemble (step 0).
  StepSummary prior_summary() const;
  /// Advances one step using all texts observed at that step; an empty span
  /// leaves the weights uniform.
  StepSummary step(std::span<const std::string> texts);

  const ParticleSet& particles() const { return particles_; }
  const std::vector<TextReading>& last_readings() const { return readings_; }
  RandomStream& rng() { return rng_; }

 private:
  Eigen::VectorXd likelihoods(std::span<const std::string> texts);

  PlantModel plant_;
  LikelihoodBackend backend_;
  ParticleSet particles_;
  RandomStream rng_;
  int step_ = 0;
  std::size_t degenerate_ = 0;
  std::vector<TextReading> readings_;
};

struct FilterTrajectory {
  std::vector<StepSummary> steps;  // steps[0] is the prior
};

/// Runs T = observations.size() steps.
FilterTrajectory run_filter(const PlantModel& plant, const LikelihoodBackend& backend, const PriorSpec& prior,
                            const std::vector<std::vector<std::string>>& observations, Index particles,
                            RandomStream& rng);

}  // namespace lapf
