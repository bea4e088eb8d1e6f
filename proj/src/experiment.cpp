#include "lapf/experiment.hpp"

#include "lapf/model_io.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

namespace lapf {

namespace {

enum Stream : std::uint64_t { kPlantStream = 1, kSensorStream = 2, kFilterStream = 3 };

std::uint64_t trial_seed(const ExperimentConfig& cfg, int trial) { return cfg.seed + static_cast<std::uint64_t>(trial); }

std::shared_ptr<const Embedder> embedder_for(const ModelFile& file, const ExperimentConfig& cfg) {
  EmbedderConfig ec;
  ec.kind = file.embedder;
  ec.dim = file.dim;
  ec.endpoint = cfg.embedder_endpoint;
  return make_embedder(ec);
}

ModelFile load_required(const std::string& path, const char* what) {
  if (path.empty() || !std::filesystem::exists(path))
    throw ConfigError(std::string(what) + " model not found: '" + path + "' (train one first)");
  return load_model(path);
}

int method_rank(const std::string& m) {
  static const std::map<std::string, int> order = {
      {"baseline", 0}, {"edapf", 1}, {"lapf", 2}, {"baseline_ood", 3}, {"edapf_ood", 4}, {"lapf_ood", 5}};
  const auto it = order.find(m);
  return it == order.end() ? 100 : it->second;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::baseline: return "baseline";
    case Method::edapf: return "edapf";
    case Method::lapf: return "lapf";
  }
  return "?";
}

Method parse_method(std::string_view s) {
  if (s == "baseline") return Method::baseline;
  if (s == "edapf") return Method::edapf;
  if (s == "lapf") return Method::lapf;
  throw ConfigError("unknown mode '" + std::string(s) + "'");
}

std::string method_label(Method m, bool ood) { return std::string(to_string(m)) + (ood ? "_ood" : ""); }

TruthTrace simulate_truth(const ExperimentConfig& cfg, const HumanSensorSim& sensor, int trial) {
  RandomStream plant_rng(trial_seed(cfg, trial), kPlantStream);
  RandomStream sensor_rng(trial_seed(cfg, trial), kSensorStream);
  TruthTrace t;
  t.states.resize(cfg.plant.dim(), cfg.steps);
  t.observations.reserve(static_cast<std::size_t>(cfg.steps));
  Eigen::VectorXd x = cfg.plant.x0_true;
  for (int k = 0; k < cfg.steps; ++k) {
    x = step_plant(cfg.plant, x, plant_rng);
    t.states.col(k) = x;
    t.observations.push_back(observe_all(sensor, x, cfg.sensors, sensor_rng));
  }
  return t;
}

TrialOutcome run_trial(const ExperimentConfig& cfg, const HumanSensorSim& sensor, const LikelihoodBackend& backend,
                       int trial) {
  const TruthTrace truth = simulate_truth(cfg, sensor, trial);
  TrialOutcome out;
  out.trial = trial;
  std::vector<std::vector<std::string>> texts;
  texts.reserve(truth.observations.size());
  for (const auto& step : truth.observations) {
    std::vector<std::string> row;
    for (const auto& o : step) {
      row.push_back(o.text);
      out.ood_injections += o.ood ? 1 : 0;
    }
    texts.push_back(std::move(row));
  }
  RandomStream filter_rng(trial_seed(cfg, trial), kFilterStream);
  const auto traj = run_filter(cfg.plant, backend, cfg.prior, texts, cfg.particles, filter_rng);

  const Index n = cfg.plant.dim();
  out.truth = truth.states;
  out.estimates.resize(n, cfg.steps);
  out.ess.resize(cfg.steps);
  out.degenerate.resize(static_cast<std::size_t>(cfg.steps));
  for (int k = 0; k < cfg.steps; ++k) {
    const auto& s = traj.steps[static_cast<std::size_t>(k) + 1];
    out.estimates.col(k) = s.estimate;
    out.ess(k) = s.ess;
    out.degenerate[static_cast<std::size_t>(k)] = s.degenerate;
  }
  out.location_mse = (out.estimates - out.truth).array().square().rowwise().mean();
  out.mse = out.location_mse.mean();
  return out;
}

MetricsReport summarize(const std::string& method, const std::vector<TrialOutcome>& trials) {
  MetricsReport r;
  r.method = method;
  r.trials = static_cast<int>(trials.size());
  if (trials.empty()) return r;
  const Index n = trials.front().location_mse.size();
  Eigen::MatrixXd per(n + 1, r.trials);
  for (std::size_t t = 0; t < trials.size(); ++t) {
    per.col(static_cast<Index>(t)).head(n) = trials[t].location_mse;
    per(n, static_cast<Index>(t)) = trials[t].mse;
    if (!trials[t].degenerate.empty()) r.degenerate_total += trials[t].degenerate.back();
    r.ood_injections += trials[t].ood_injections;
  }
  const Eigen::VectorXd mean = per.rowwise().mean();
  Eigen::VectorXd sd = Eigen::VectorXd::Zero(n + 1);
  if (r.trials > 1) sd = ((per.colwise() - mean).array().square().rowwise().sum() / (r.trials - 1)).sqrt();
  r.location_mean = mean.head(n);
  r.location_std = sd.head(n);
  r.overall_mean = mean(n);
  r.overall_std = sd(n);
  return r;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const HumanSensorSim& sensor,
                                const LikelihoodBackend& backend, const std::string& method) {
  cfg.validate();
  validate_backend(backend, cfg.plant.dim());
  ExperimentResult result;
  result.trials.resize(static_cast<std::size_t>(cfg.trials));
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int workers = std::min(cfg.trials, cfg.workers > 0 ? cfg.workers : static_cast<int>(hw));

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (int t = next++; t < cfg.trials; t = next++) {
      try {
        result.trials[static_cast<std::size_t>(t)] = run_trial(cfg, sensor, backend, t);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = cfg.trials;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  result.report = summarize(method, result.trials);
  return result;
}

HumanSensorSim make_sensor(const ExperimentConfig& cfg, const Corpus& corpus, bool ood) {
  auto sim = HumanSensorSim::from_corpus(corpus, Split::test, cfg.cognitive, cfg.scheme);
  sim.ood_bank = cfg.ood_bank.empty() ? builtin_ood_bank() : load_text_lines(cfg.ood_bank);
  if (ood) sim.ood_threshold = cfg.ood_threshold;
  return sim;
}

LikelihoodBackend make_backend(const ExperimentConfig& cfg, Method method) {
  switch (method) {
    case Method::baseline: return NoUpdate{};
    case Method::lapf: {
      const auto file = load_required(cfg.classifier_path, "classifier");
      return LapfLikelihoodModel{cfg.scheme, cfg.cognitive,
                                 std::make_shared<MlpTextClassifier>(file.model, embedder_for(file, cfg))};
    }
    case Method::edapf: {
      const auto file = load_required(cfg.regressor_path, "regressor");
      const auto it = file.meta.find("r_tilde");
      if (it == file.meta.end()) throw ConfigError("regressor model lacks its r_tilde calibration");
      return EdapfLikelihoodModel{cfg.cognitive,
                                  std::make_shared<MlpTextRegressor>(file.model, embedder_for(file, cfg)),
                                  parse_real(it->second)};
    }
  }
  throw ConfigError("unknown method");
}

void write_trajectory_csv(const std::vector<TrialOutcome>& trials, std::ostream& out) {
  const Index n = trials.empty() ? 0 : trials.front().truth.rows();
  out << "trial,step";
  for (Index i = 1; i <= n; ++i) out << ",true_" << i;
  for (Index i = 1; i <= n; ++i) out << ",est_" << i;
  out << ",ess,degenerate\n";
  for (const auto& t : trials) {
    for (Index k = 0; k < t.truth.cols(); ++k) {
      out << t.trial << ',' << (k + 1);
      for (Index i = 0; i < n; ++i) out << ',' << format_real(t.truth(i, k));
      for (Index i = 0; i < n; ++i) out << ',' << format_real(t.estimates(i, k));
      out << ',' << format_real(t.ess(k)) << ',' << t.degenerate[static_cast<std::size_t>(k)] << '\n';
    }
  }
}

void write_metrics_csv(const MetricsReport& report, std::ostream& out) {
  out << "location,method,mse_mean,mse_std\n";
  for (Index i = 0; i < report.location_mean.size(); ++i)
    out << (i + 1) << ',' << report.method << ',' << format_real(report.location_mean(i)) << ','
        << format_real(report.location_std(i)) << '\n';
  out << "overall," << report.method << ',' << format_real(report.overall_mean) << ','
      << format_real(report.overall_std) << '\n';
}

void write_summary(const MetricsReport& report, std::ostream& out) {
  out << "method = " << report.method << '\n';
  out << "trials = " << report.trials << '\n';
  out << "mse_mean = " << format_real(report.overall_mean) << '\n';
  out << "mse_std = " << format_real(report.overall_std) << '\n';
  out << "degenerate_total = " << report.degenerate_total << '\n';
  out << "ood_injections = " << report.ood_injections << '\n';
}

void merge_metrics(const std::vector<std::filesystem::path>& inputs, std::ostream& out) {
  struct Row {
    std::string location, method, mean, sd;
    int input;
    int line;
  };
  std::vector<Row> rows;
  for (std::size_t f = 0; f < inputs.size(); ++f) {
    std::ifstream in(inputs[f]);
    if (!in) throw ConfigError("cannot open metrics file " + inputs[f].string());
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (lineno == 1) {
        if (line != "location,method,mse_mean,mse_std")
          throw ParseError(1, inputs[f].string() + ": not a metrics file");
        continue;
      }
      if (line.empty()) continue;
      const auto fields = split_fields(line);
      if (fields.size() != 4) throw ParseError(static_cast<std::size_t>(lineno), inputs[f].string() + ": expected 4 fields");
      rows.push_back({fields[0], fields[1], fields[2], fields[3], static_cast<int>(f), lineno});
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    const int ra = method_rank(a.method), rb = method_rank(b.method);
    if (ra != rb) return ra < rb;
    if (a.method != b.method) return a.method < b.method;
    if (a.input != b.input) return a.input < b.input;
    return a.line < b.line;
  });
  out << "location,method,mse_mean,mse_std\n";
  for (const auto& r : rows) out << r.location << ',' << r.method << ',' << r.mean << ',' << r.sd << '\n';
}

}  // namespace lapf
