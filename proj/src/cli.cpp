#include "lapf/cli.hpp"

#include "lapf/config.hpp"
#include "lapf/corpus.hpp"
#include "lapf/experiment.hpp"
#include "lapf/model_io.hpp"
#include "lapf/training.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <map>
#include <optional>
#include <ostream>

namespace lapf::cli {

namespace {

namespace fs = std::filesystem;

// Options shared by subcommands that read an ExperimentConfig.
struct ConfigOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::map<std::string, std::string> flags;  // config key -> value from a dedicated flag

  void attach(CLI::App* cmd) {
    cmd->add_option("-c,--config", config_path, "Experiment config file (key = value lines)");
    cmd->add_option("--set", overrides, "Override a config key, as key=value")->take_all();
  }

  // Registers a flag that sets `key` when given.
  void flag(CLI::App* cmd, const std::string& name, const std::string& key, const std::string& help) {
    cmd->add_option_function<std::string>(name, [this, key](const std::string& v) { flags[key] = v; }, help);
  }

  ExperimentConfig resolve() const {
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
      apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    for (const auto& [key, value] : flags) apply_setting(cfg, key, value);
    cfg.validate();
    return cfg;
  }
};

void require_file(const std::string& path, const std::string& what) {
  if (path.empty() || !fs::exists(path)) throw ConfigError(what + " not found: '" + path + "'");
}

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

std::ofstream open_output(const fs::path& path) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

// gen-corpus ---------------------------------------------------------------

struct GenCorpusArgs {
  ConfigOptions config;
  std::string out;
  std::optional<std::uint64_t> seed;
  int texts_per_level = 48;
  std::vector<double> fractions;
};

int cmd_gen_corpus(const GenCorpusArgs& a, std::ostream& out) {
  const ExperimentConfig cfg = a.config.resolve();
  SplitFractions fr;
  if (!a.fractions.empty()) {
    if (a.fractions.size() != 3) throw ConfigError("--fractions expects train,val,test");
    double sum = 0.0;
    for (double f : a.fractions) {
      if (!(f >= 0.0)) throw ConfigError("split fractions must be nonnegative");
      sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("split fractions must sum to 1");
    fr = {a.fractions[0], a.fractions[1], a.fractions[2]};
  }
  if (a.texts_per_level < 3) throw ConfigError("--texts-per-level must be at least 3");
  const std::uint64_t seed = a.seed.value_or(cfg.seed);
  const std::string path = a.out.empty() ? cfg.corpus_path : a.out;
  Corpus corpus = split_corpus(generate_corpus(seed, LevelGrid{}, a.texts_per_level), fr, seed);
  ensure_parent(path);
  save_corpus(corpus, path);
  std::map<Split, int> counts;
  for (const auto& r : corpus.records) ++counts[r.split];
  out << "wrote " << corpus.records.size() << " records to " << path << '\n';
  for (Split s : {Split::train, Split::val, Split::test}) out << "  " << to_string(s) << ' ' << counts[s] << '\n';
  return 0;
}

// train-classifier / train-regressor ----------------------------------------

struct TrainArgs {
  ConfigOptions config;
  std::string corpus;
  std::string out;
  std::string loss_csv;
  std::optional<std::uint64_t> seed;
  TrainConfig train;
  std::string embedder = "hashing";
  int dim = 256;
  std::string endpoint;
};

int cmd_train(const TrainArgs& a, bool classifier, std::ostream& out) {
  const ExperimentConfig cfg = a.config.resolve();
  const std::string corpus_path = a.corpus.empty() ? cfg.corpus_path : a.corpus;
  require_file(corpus_path, "corpus file");
  const std::string model_path =
      !a.out.empty() ? a.out : (classifier ? cfg.classifier_path : cfg.regressor_path);
  const std::string loss_path = a.loss_csv.empty() ? model_path + ".loss.csv" : a.loss_csv;

  TrainConfig tc = a.train;
  tc.seed = a.seed.value_or(cfg.seed);
  tc.validate();
  EmbedderConfig ec;
  ec.kind = parse_embedder_kind(a.embedder);
  ec.dim = a.dim;
  ec.endpoint = a.endpoint.empty() ? cfg.embedder_endpoint : a.endpoint;
  const Corpus corpus = load_corpus(corpus_path);
  const auto embedder = make_embedder(ec);

  const TrainResult result = classifier ? train_classifier(corpus, cfg.scheme, *embedder, tc)
                                        : train_regressor(corpus, *embedder, tc, cfg.scheme.hi());
  ModelFile file;
  file.model = result.best_model;
  file.embedder = ec.kind;
  file.dim = embedder->dim();
  file.seed = tc.seed;
  file.meta["best_epoch"] = std::to_string(result.best_epoch);
  if (!classifier) file.meta["r_tilde"] = format_real(result.val_mse);
  ensure_parent(model_path);
  save_model(file, model_path);
  {
    auto loss = open_output(loss_path);
    write_loss_csv(result, loss);
  }
  const auto& last = result.history.back();
  out << "trained " << (classifier ? "classifier" : "regressor") << " for " << result.history.size()
      << " epochs; best epoch " << result.best_epoch << '\n';
  out << "final train_loss " << format_real(last.train_loss) << " val_loss " << format_real(last.val_loss) << '\n';
  if (classifier) out << "final val_accuracy " << format_real(last.val_accuracy) << '\n';
  else out << "r_tilde " << format_real(result.val_mse) << '\n';
  out << "model " << model_path << "\nloss " << loss_path << '\n';
  return 0;
}

// run ----------------------------------------------------------------------

struct RunArgs {
  ConfigOptions config;
  std::string mode = "lapf";
  bool ood = false;
};

int cmd_run(const RunArgs& a, std::ostream& out) {
  const ExperimentConfig cfg = a.config.resolve();
  const Method method = parse_method(a.mode);
  const std::string label = method_label(method, a.ood);
  const LikelihoodBackend backend = make_backend(cfg, method);
  require_file(cfg.corpus_path, "corpus file");
  if (!cfg.ood_bank.empty()) require_file(cfg.ood_bank, "OOD bank");
  const HumanSensorSim sensor = make_sensor(cfg, load_corpus(cfg.corpus_path), a.ood);

  const ExperimentResult result = run_experiment(cfg, sensor, backend, label);
  const fs::path dir = cfg.output_dir;
  fs::create_directories(dir);
  {
    auto f = open_output(dir / (label + "_trajectory.csv"));
    write_trajectory_csv(result.trials, f);
  }
  {
    auto f = open_output(dir / (label + "_metrics.csv"));
    write_metrics_csv(result.report, f);
  }
  {
    auto f = open_output(dir / (label + "_summary.txt"));
    write_summary(result.report, f);
  }
  write_summary(result.report, out);
  return 0;
}

// report -------------------------------------------------------------------

struct ReportArgs {
  std::vector<std::string> inputs;
  std::string out;
};

int cmd_report(const ReportArgs& a, std::ostream& out) {
  std::vector<fs::path> inputs;
  for (const auto& p : a.inputs) {
    require_file(p, "metrics file");
    inputs.emplace_back(p);
  }
  if (a.out.empty()) {
    merge_metrics(inputs, out);
  } else {
    auto f = open_output(a.out);
    merge_metrics(inputs, f);
  }
  return 0;
}

// interactive ----------------------------------------------------------------

int cmd_interactive(const ConfigOptions& config, std::istream& in, std::ostream& out) {
  const ExperimentConfig cfg = config.resolve();
  LanguageAidedFilter filter(cfg.plant, make_backend(cfg, Method::lapf), cfg.prior, cfg.particles,
                             RandomStream(cfg.seed, 3));
  run_interactive(filter, in, out);
  return 0;
}

}  // namespace

int main(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Particle filtering with natural-language observations", "lapf"};
  app.require_subcommand(1);

  GenCorpusArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-corpus", "Generate and split the synthetic observation corpus");
  gen.config.attach(gen_cmd);
  gen_cmd->add_option("-o,--out", gen.out, "Corpus CSV path (default: paths.corpus)");
  gen_cmd->add_option("--seed", gen.seed, "Generation and split seed (default: config seed)");
  gen_cmd->add_option("--texts-per-level", gen.texts_per_level, "Texts per 2% level key")->capture_default_str();
  gen_cmd->add_option("--fractions", gen.fractions, "Train, validation and test fractions")->delimiter(',')->expected(3);

  TrainArgs train_c, train_r;
  auto add_train = [&](TrainArgs& t, const char* name, const char* help) {
    auto* cmd = app.add_subcommand(name, help);
    t.config.attach(cmd);
    cmd->add_option("--corpus", t.corpus, "Corpus CSV (default: paths.corpus)");
    cmd->add_option("-o,--out", t.out, "Model file (default: paths.classifier / paths.regressor)");
    cmd->add_option("--loss-csv", t.loss_csv, "Per-epoch loss CSV (default: <model>.loss.csv)");
    cmd->add_option("--seed", t.seed, "Training seed (default: config seed)");
    cmd->add_option("--epochs", t.train.epochs)->capture_default_str();
    cmd->add_option("--lr", t.train.learning_rate)->capture_default_str();
    cmd->add_option("--batch-size", t.train.batch_size)->capture_default_str();
    cmd->add_option("--embedder", t.embedder, "hashing or remote")->capture_default_str();
    cmd->add_option("--dim", t.dim, "Hashing embedder dimension")->capture_default_str();
    cmd->add_option("--endpoint", t.endpoint, "Embedding service URL (remote embedder)");
    return cmd;
  };
  auto* train_c_cmd = add_train(train_c, "train-classifier", "Train the quantized-label text classifier");
  auto* train_r_cmd = add_train(train_r, "train-regressor", "Train the text-to-level regressor used by EDAPF");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run filtering trials and write trajectories and metrics");
  run.config.attach(run_cmd);
  run_cmd->add_option("--mode", run.mode, "baseline, edapf or lapf")
      ->check(CLI::IsMember({"baseline", "edapf", "lapf"}))
      ->capture_default_str();
  run_cmd->add_flag("--ood", run.ood, "Inject dialect texts when the perceived level is low");
  run.config.flag(run_cmd, "--trials", "trials", "Number of trials");
  run.config.flag(run_cmd, "--particles", "particles", "Particles per filter");
  run.config.flag(run_cmd, "--steps", "steps", "Time steps per trial");
  run.config.flag(run_cmd, "--seed", "seed", "Base seed; trial t uses seed + t");
  run.config.flag(run_cmd, "--sensors", "sensors", "Human sensors per step");
  run.config.flag(run_cmd, "--workers", "workers", "Worker threads (0: all cores)");
  run.config.flag(run_cmd, "--corpus", "paths.corpus", "Corpus CSV");
  run.config.flag(run_cmd, "--classifier", "paths.classifier", "Classifier model file");
  run.config.flag(run_cmd, "--regressor", "paths.regressor", "Regressor model file");
  run.config.flag(run_cmd, "-o,--out", "paths.output", "Output directory");

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Merge metrics CSVs into one comparison table");
  report_cmd->add_option("inputs", report.inputs, "Metrics CSV files")->required();
  report_cmd->add_option("-o,--out", report.out, "Output CSV (default: stdout)");

  ConfigOptions inter;
  auto* inter_cmd = app.add_subcommand("interactive", "Filter texts typed on standard input, one per step");
  inter.attach(inter_cmd);
  inter.flag(inter_cmd, "--classifier", "paths.classifier", "Classifier model file");
  inter.flag(inter_cmd, "--particles", "particles", "Particles");
  inter.flag(inter_cmd, "--seed", "seed", "Seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen_cmd) return cmd_gen_corpus(gen, out);
    if (*train_c_cmd) return cmd_train(train_c, true, out);
    if (*train_r_cmd) return cmd_train(train_r, false, out);
    if (*run_cmd) return cmd_run(run, out);
    if (*report_cmd) return cmd_report(report, out);
    if (*inter_cmd) return cmd_interactive(inter, in, out);
  } catch (const ConfigError& e) {
    err << "lapf: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "lapf: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace lapf::cli
