#pragma once

#include "lapf/humansensor.hpp"
#include "lapf/particles.hpp"
#include "lapf/quantization.hpp"
#include "lapf/statespace.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

namespace lapf {

/// Everything a `run` needs. Defaults reproduce the canal experiment.
///
/// Config files are UTF-8 `key = value` lines; `#` starts a comment.
/// Vectors are whitespace- or comma-separated; matrix rows are separated
/// by `;`. Recognized keys:
///   plant.A plant.u plant.Q plant.clamp plant.x0
///   prior.mean prior.cov
///   scheme.range scheme.levels scheme.boundaries
///   cognitive.C cognitive.variance
///   steps particles trials sensors seed workers
///   ood.threshold ood.bank
///   paths.corpus paths.classifier paths.regressor paths.output
///   embedder.endpoint
struct ExperimentConfig {
  PlantModel plant = canal_plant();
  PriorSpec prior{Eigen::VectorXd::Zero(5), Eigen::VectorXd::Ones(5)};
  QuantizationScheme scheme = QuantizationScheme::uniform(0.0, 5.0, 5);
  CognitiveModel cognitive = canal_observer();
  int steps = 100;
  Index particles = 1000;
  int trials = 1000;
  int sensors = 1;
  std::uint64_t seed = 1;
  int workers = 0;  // 0: hardware concurrency
  double ood_threshold = 0.2;
  std::string ood_bank;  // empty: built-in dialect phrases
  std::string corpus_path = "corpus.csv";
  std::string classifier_path = "classifier.model";
  std::string regressor_path = "regressor.model";
  std::string output_dir = "out";
  std::string embedder_endpoint;

  /// Checks dimensions and ranges; throws ConfigError.
  void validate() const;
};

/// Sets one key; throws ConfigError for unknown keys or bad values.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

ExperimentConfig read_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);
void write_config(const ExperimentConfig& cfg, std::ostream& out);

}  // namespace lapf
