#include "lapf/config.hpp"

#include "lapf/model_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace lapf {

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<double> parse_list(const std::string& value) {
  std::string v = value;
  std::replace(v.begin(), v.end(), ',', ' ');
  std::istringstream ss(v);
  std::vector<double> out;
  std::string tok;
  while (ss >> tok) out.push_back(parse_real(tok));
  return out;
}

Eigen::VectorXd parse_vector(const std::string& value) {
  const auto xs = parse_list(value);
  return Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Index>(xs.size()));
}

Eigen::MatrixXd parse_matrix(const std::string& value) {
  std::vector<std::vector<double>> rows;
  std::istringstream ss(value);
  std::string row;
  while (std::getline(ss, row, ';')) {
    if (trim(row).empty()) continue;
    rows.push_back(parse_list(row));
  }
  if (rows.empty()) throw ConfigError("empty matrix");
  Eigen::MatrixXd m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows.front().size()) throw ConfigError("ragged matrix rows");
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  }
  return m;
}

long long parse_integer(const std::string& value) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &used);
  } catch (const std::exception&) {
    throw ConfigError("not an integer: '" + value + "'");
  }
  if (used != value.size()) throw ConfigError("not an integer: '" + value + "'");
  return v;
}

std::pair<double, double> parse_pair(const std::string& value) {
  const auto xs = parse_list(value);
  if (xs.size() != 2) throw ConfigError("expected two numbers, got '" + value + "'");
  return {xs[0], xs[1]};
}

std::string join(const Eigen::VectorXd& v) {
  std::string s;
  for (Index i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_real(v(i));
  return s;
}

}  // namespace

void ExperimentConfig::validate() const {
  plant.validate();
  const Index n = plant.dim();
  if (plant.x0_true.size() != n) throw ConfigError("plant.x0 must have the state dimension");
  if ((plant.noise_cov.array() <= 0.0).any()) throw ConfigError("plant.Q entries must be positive");
  prior.validate();
  if (prior.mean.size() != n) throw ConfigError("prior dimension does not match the plant");
  if ((prior.cov_diag.array() <= 0.0).any()) throw ConfigError("prior.cov entries must be positive");
  if (cognitive.C.size() != n) throw ConfigError("cognitive.C must have the state dimension");
  if (!(cognitive.noise_var > 0.0)) throw ConfigError("cognitive.variance must be positive");
  if (steps < 1 || particles < 1 || trials < 1) throw ConfigError("steps, particles and trials must be at least 1");
  if (sensors < 1) throw ConfigError("sensors must be at least 1");
  if (workers < 0) throw ConfigError("workers must be nonnegative");
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  try {
    if (key == "plant.A") cfg.plant.A = parse_matrix(value);
    else if (key == "plant.u") cfg.plant.noise_mean = parse_vector(value);
    else if (key == "plant.Q") cfg.plant.noise_cov = parse_vector(value);
    else if (key == "plant.clamp") std::tie(cfg.plant.clamp_lo, cfg.plant.clamp_hi) = parse_pair(value);
    else if (key == "plant.x0") cfg.plant.x0_true = parse_vector(value);
    else if (key == "prior.mean") cfg.prior.mean = parse_vector(value);
    else if (key == "prior.cov") cfg.prior.cov_diag = parse_vector(value);
    else if (key == "scheme.range") {
      const auto [lo, hi] = parse_pair(value);
      cfg.scheme = QuantizationScheme::uniform(lo, hi, cfg.scheme.levels());
      cfg.cognitive.lo = lo;
      cfg.cognitive.hi = hi;
    } else if (key == "scheme.levels") {
      cfg.scheme = QuantizationScheme::uniform(cfg.scheme.lo(), cfg.scheme.hi(), static_cast<int>(parse_integer(value)));
    } else if (key == "scheme.boundaries") {
      cfg.scheme = QuantizationScheme(parse_list(value));
      cfg.cognitive.lo = cfg.scheme.lo();
      cfg.cognitive.hi = cfg.scheme.hi();
    } else if (key == "cognitive.C") cfg.cognitive.C = parse_vector(value).transpose();
    else if (key == "cognitive.variance") cfg.cognitive.noise_var = parse_real(value);
    else if (key == "steps") cfg.steps = static_cast<int>(parse_integer(value));
    else if (key == "particles") cfg.particles = static_cast<Index>(parse_integer(value));
    else if (key == "trials") cfg.trials = static_cast<int>(parse_integer(value));
    else if (key == "sensors") cfg.sensors = static_cast<int>(parse_integer(value));
    else if (key == "seed") {
      const auto s = parse_integer(value);
      if (s < 0) throw ConfigError("seed must be nonnegative");
      cfg.seed = static_cast<std::uint64_t>(s);
    } else if (key == "workers") cfg.workers = static_cast<int>(parse_integer(value));
    else if (key == "ood.threshold") cfg.ood_threshold = parse_real(value);
    else if (key == "ood.bank") cfg.ood_bank = value;
    else if (key == "paths.corpus") cfg.corpus_path = value;
    else if (key == "paths.classifier") cfg.classifier_path = value;
    else if (key == "paths.regressor") cfg.regressor_path = value;
    else if (key == "paths.output") cfg.output_dir = value;
    else if (key == "embedder.endpoint") cfg.embedder_endpoint = value;
    else throw ConfigError("unknown config key '" + key + "'");
  } catch (const ConfigError& e) {
    if (std::string(e.what()).starts_with("unknown config key")) throw;
    throw ConfigError(key + ": " + e.what());
  }
}

ExperimentConfig read_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    try {
      apply_setting(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return read_config(in);
}

void write_config(const ExperimentConfig& cfg, std::ostream& out) {
  out << "plant.A = ";
  for (Index r = 0; r < cfg.plant.A.rows(); ++r)
    out << (r ? "; " : "") << join(cfg.plant.A.row(r).transpose());
  out << '\n';
  out << "plant.u = " << join(cfg.plant.noise_mean) << '\n';
  out << "plant.Q = " << join(cfg.plant.noise_cov) << '\n';
  out << "plant.clamp = " << format_real(cfg.plant.clamp_lo) << ' ' << format_real(cfg.plant.clamp_hi) << '\n';
  out << "plant.x0 = " << join(cfg.plant.x0_true) << '\n';
  out << "prior.mean = " << join(cfg.prior.mean) << '\n';
  out << "prior.cov = " << join(cfg.prior.cov_diag) << '\n';
  out << "scheme.boundaries =";
  for (double b : cfg.scheme.boundaries()) out << ' ' << format_real(b);
  out << '\n';
  out << "cognitive.C = " << join(cfg.cognitive.C.transpose()) << '\n';
  out << "cognitive.variance = " << format_real(cfg.cognitive.noise_var) << '\n';
  out << "steps = " << cfg.steps << '\n';
  out << "particles = " << cfg.particles << '\n';
  out << "trials = " << cfg.trials << '\n';
  out << "sensors = " << cfg.sensors << '\n';
  out << "seed = " << cfg.seed << '\n';
  out << "workers = " << cfg.workers << '\n';
  out << "ood.threshold = " << format_real(cfg.ood_threshold) << '\n';
  out << "ood.bank = " << cfg.ood_bank << '\n';
  out << "paths.corpus = " << cfg.corpus_path << '\n';
  out << "paths.classifier = " << cfg.classifier_path << '\n';
  out << "paths.regressor = " << cfg.regressor_path << '\n';
  out << "paths.output = " << cfg.output_dir << '\n';
  out << "embedder.endpoint = " << cfg.embedder_endpoint << '\n';
}

}  // namespace lapf
