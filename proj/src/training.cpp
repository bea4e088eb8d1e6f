#include "lapf/training.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

namespace lapf {

namespace {

struct Dataset {
  Eigen::MatrixXd X;  // d x N
  std::vector<int> labels;
  Eigen::VectorXd targets;

  Index size() const { return X.cols(); }
};

Dataset embed_split(const Corpus& corpus, Split split, const Embedder& embedder) {
  std::vector<std::string> texts;
  std::vector<const ObservationRecord*> rows = select(corpus, split);
  texts.reserve(rows.size());
  for (const auto* r : rows) texts.push_back(r->text);
  Dataset d;
  d.X = embedder.embed_batch(texts);
  if (d.X.rows() != embedder.dim()) d.X.resize(embedder.dim(), 0);
  return d;
}

std::vector<Index> network_sizes(Index input, const TrainConfig& cfg, Index output) {
  std::vector<Index> s{input};
  s.insert(s.end(), cfg.hidden.begin(), cfg.hidden.end());
  s.push_back(output);
  return s;
}

Dataset gather(const Dataset& d, std::span<const Index> idx) {
  Dataset b;
  b.X.resize(d.X.rows(), static_cast<Index>(idx.size()));
  if (!d.labels.empty()) b.labels.resize(idx.size());
  if (d.targets.size() > 0) b.targets.resize(static_cast<Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    b.X.col(static_cast<Index>(i)) = d.X.col(idx[i]);
    if (!d.labels.empty()) b.labels[i] = d.labels[static_cast<std::size_t>(idx[i])];
    if (d.targets.size() > 0) b.targets(static_cast<Index>(i)) = d.targets(idx[i]);
  }
  return b;
}

// Loss of a batch: classifier if labels are present, regressor otherwise.
double evaluate_loss(const Mlp& model, const Dataset& d) {
  if (d.size() == 0) return std::numeric_limits<double>::quiet_NaN();
  if (!d.labels.empty()) return cross_entropy_loss(model, d.X, d.labels);
  return squared_error_loss(model, d.X, d.targets);
}

double accuracy(const Mlp& model, const Dataset& d) {
  if (d.size() == 0 || d.labels.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto f = forward(model, d.X);
  Index hits = 0;
  for (Index c = 0; c < d.size(); ++c) {
    Index arg = 0;
    f.logits.col(c).maxCoeff(&arg);
    if (arg == d.labels[static_cast<std::size_t>(c)]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(d.size());
}

EpochMetrics measure(int epoch, const Mlp& model, const Dataset& train, const Dataset& val) {
  return {epoch, evaluate_loss(model, train), evaluate_loss(model, val), accuracy(model, val)};
}

TrainResult fit(Mlp model, const Dataset& train, const Dataset& val, const TrainConfig& cfg) {
  AdamOptimizer<double> adam(model, {cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.epsilon});
  RandomStream rng(cfg.seed, 0x7472616e6eULL);
  TrainResult result;
  result.initial_model = model;
  result.initial = measure(0, model, train, val);
  // Selection criterion: validation loss, or training loss without a validation split.
  auto score = [&](const EpochMetrics& m) { return val.size() > 0 ? m.val_loss : m.train_loss; };
  double best = score(result.initial);
  result.best_model = model;

  std::vector<Index> order(static_cast<std::size_t>(train.size()));
  std::iota(order.begin(), order.end(), Index{0});
  const auto batch = static_cast<std::size_t>(cfg.batch_size);
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng.engine());
    int batch_no = 0;
    for (std::size_t start = 0; start < order.size(); start += batch, ++batch_no) {
      const auto idx = std::span<const Index>(order).subspan(start, std::min(batch, order.size() - start));
      const Dataset b = gather(train, idx);
      const auto lg = b.labels.empty() ? backward(model, b.X, b.targets) : backward(model, b.X, std::span<const int>(b.labels));
      if (!std::isfinite(lg.loss) || !lg.gradient.all_finite()) throw TrainingDiverged(epoch, batch_no);
      adam.step(model, lg.gradient);
    }
    const auto m = measure(epoch, model, train, val);
    if (!std::isfinite(m.train_loss)) throw TrainingDiverged(epoch, batch_no);
    result.history.push_back(m);
    if (score(m) < best) {
      best = score(m);
      result.best_model = model;
      result.best_epoch = epoch;
    }
  }
  result.final_model = std::move(model);
  return result;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning rate must be nonnegative");
  if (batch_size < 1) throw ConfigError("batch size must be at least 1");
  if (epochs < 0) throw ConfigError("epoch count must be nonnegative");
  for (Index h : hidden)
    if (h < 1) throw ConfigError("hidden layer sizes must be positive");
}

TrainResult train_classifier(const Corpus& corpus, const QuantizationScheme& scheme,
                             const Embedder& embedder, const TrainConfig& cfg) {
  cfg.validate();
  Dataset train = embed_split(corpus, Split::train, embedder);
  Dataset val = embed_split(corpus, Split::val, embedder);
  if (train.size() == 0) throw CorpusError("training split is empty");
  for (const auto* r : select(corpus, Split::train)) train.labels.push_back(label_of(*r, scheme) - 1);
  for (const auto* r : select(corpus, Split::val)) val.labels.push_back(label_of(*r, scheme) - 1);

  RandomStream init_rng(cfg.seed, 0x696e6974ULL);
  const auto sizes = network_sizes(train.X.rows(), cfg, scheme.levels());
  return fit(init_mlp<double>(sizes, HeadKind::softmax, init_rng), train, val, cfg);
}

TrainResult train_regressor(const Corpus& corpus, const Embedder& embedder, const TrainConfig& cfg,
                            double output_scale) {
  cfg.validate();
  Dataset train = embed_split(corpus, Split::train, embedder);
  Dataset val = embed_split(corpus, Split::val, embedder);
  if (train.size() == 0) throw CorpusError("training split is empty");
  auto targets = [&](Split s) {
    const auto rows = select(corpus, s);
    Eigen::VectorXd t(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) t(static_cast<Index>(i)) = rows[i]->level_ratio * output_scale;
    return t;
  };
  train.targets = targets(Split::train);
  val.targets = targets(Split::val);

  RandomStream init_rng(cfg.seed, 0x696e6974ULL);
  const auto sizes = network_sizes(train.X.rows(), cfg, 1);
  auto result = fit(init_mlp<double>(sizes, HeadKind::sigmoid_scaled, init_rng, output_scale), train, val, cfg);
  const Dataset& held_out = val.size() > 0 ? val : train;
  result.val_mse = squared_error_loss(result.best_model, held_out.X, held_out.targets);
  return result;
}

void write_loss_csv(const TrainResult& result, std::ostream& out) {
  out << "epoch,train_loss,val_loss,val_accuracy\n";
  for (const auto& m : result.history)
    out << m.epoch << ',' << fmt(m.train_loss) << ',' << fmt(m.val_loss) << ',' << fmt(m.val_accuracy) << '\n';
}

}  // namespace lapf
