#pragma once

#include "lapf/config.hpp"
#include "lapf/corpus.hpp"
#include "lapf/filter.hpp"
#include "lapf/humansensor.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace lapf {

enum class Method { baseline, edapf, lapf };

std::string_view to_string(Method m);
Method parse_method(std::string_view s);

/// Ground truth of one trial: states x_1..x_T (one column per step) and the
/// observations each sensor produced. Depends only on the config and the
/// trial index, so every method sees the same realization.
struct TruthTrace {
  Eigen::MatrixXd states;
  std::vector<std::vector<Observation>> observations;
};

TruthTrace simulate_truth(const ExperimentConfig& cfg, const HumanSensorSim& sensor, int trial);

struct TrialOutcome {
  int trial = 0;
  Eigen::MatrixXd truth;      // n x T
  Eigen::MatrixXd estimates;  // n x T
  Eigen::VectorXd ess;        // T
  std::vector<std::size_t> degenerate;  // cumulative, per step
  Eigen::VectorXd location_mse;         // mean over steps, per location
  double mse = 0.0;                     // mean over steps and locations
  int ood_injections = 0;
};

TrialOutcome run_trial(const ExperimentConfig& cfg, const HumanSensorSim& sensor, const LikelihoodBackend& backend,
                       int trial);

struct MetricsReport {
  std::string method;
  int trials = 0;
  Eigen::VectorXd location_mean;
  Eigen::VectorXd location_std;
  double overall_mean = 0.0;
  double overall_std = 0.0;
  std::size_t degenerate_total = 0;
  long ood_injections = 0;
};

/// Sample standard deviation (n - 1); zero for a single trial.
MetricsReport summarize(const std::string& method, const std::vector<TrialOutcome>& trials);

struct ExperimentResult {
  std::vector<TrialOutcome> trials;
  MetricsReport report;
};

/// Runs cfg.trials trials on a worker pool. Results are stored and reduced
/// in trial order, so output does not depend on scheduling.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const HumanSensorSim& sensor,
                                const LikelihoodBackend& backend, const std::string& method);

/// Text emission source for the true system: the test split, plus the OOD
/// bank and threshold when `ood` is set.
HumanSensorSim make_sensor(const ExperimentConfig& cfg, const Corpus& corpus, bool ood);

/// Loads the classifier or regressor named by the config. Throws ConfigError
/// if the model file is missing.
LikelihoodBackend make_backend(const ExperimentConfig& cfg, Method method);

std::string method_label(Method m, bool ood);

/// trial,step,true_1..true_n,est_1..est_n,ess,degenerate
void write_trajectory_csv(const std::vector<TrialOutcome>& trials, std::ostream& out);
/// location,method,mse_mean,mse_std with one row per location and an `overall` row.
void write_metrics_csv(const MetricsReport& report, std::ostream& out);
void write_summary(const MetricsReport& report, std::ostream& out);

/// Merges metrics CSVs into one table. Values are copied verbatim; methods
/// are ordered baseline, edapf, lapf, edapf_ood, lapf_ood, then others by name.
void merge_metrics(const std::vector<std::filesystem::path>& inputs, std::ostream& out);

}  // namespace lapf
