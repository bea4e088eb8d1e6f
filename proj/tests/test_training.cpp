#include "lapf/training.hpp"

#include <doctest.h>

#include "support.hpp"

#include <sstream>

using namespace lapf;
using lapf::testing::small_corpus;

namespace {

const QuantizationScheme kScheme = QuantizationScheme::uniform(0.0, 5.0, 5);

TrainConfig quick(double lr, int epochs) {
  TrainConfig c;
  c.learning_rate = lr;
  c.epochs = epochs;
  c.hidden = {32, 16};
  c.seed = 3;
  return c;
}

double max_difference(const Mlp& a, const Mlp& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.layers.size(); ++i) {
    d = std::max(d, (a.layers[i].weight - b.layers[i].weight).cwiseAbs().maxCoeff());
    d = std::max(d, (a.layers[i].bias - b.layers[i].bias).cwiseAbs().maxCoeff());
  }
  return d;
}

}  // namespace

TEST_CASE("zero learning rate leaves the parameters unchanged") {
  const HashingEmbedder emb(64);
  const auto r = train_classifier(small_corpus(), kScheme, emb, quick(0.0, 3));
  CHECK(max_difference(r.initial_model, r.final_model) == 0.0);
  CHECK(r.history.size() == 3);
}

TEST_CASE("classifier training lowers the loss and beats chance") {
  const HashingEmbedder emb(128);
  const auto r = train_classifier(small_corpus(), kScheme, emb, quick(3e-3, 30));
  CHECK(r.history.back().train_loss < r.initial.train_loss);
  CHECK(r.history[static_cast<std::size_t>(r.best_epoch - 1)].val_loss < r.initial.val_loss);
  CHECK(r.history[static_cast<std::size_t>(r.best_epoch - 1)].val_accuracy > 0.2);
  CHECK(r.best_model.sizes() == std::vector<Index>{128, 32, 16, 5});
}

TEST_CASE("best model is the lowest validation loss") {
  const HashingEmbedder emb(64);
  const auto r = train_classifier(small_corpus(), kScheme, emb, quick(1e-2, 15));
  double best = r.initial.val_loss;
  int epoch = 0;
  for (const auto& m : r.history)
    if (m.val_loss < best) {
      best = m.val_loss;
      epoch = m.epoch;
    }
  CHECK(r.best_epoch == epoch);
}

TEST_CASE("training is deterministic for a seed") {
  const HashingEmbedder emb(64);
  const auto a = train_classifier(small_corpus(), kScheme, emb, quick(1e-3, 4));
  const auto b = train_classifier(small_corpus(), kScheme, emb, quick(1e-3, 4));
  CHECK(max_difference(a.final_model, b.final_model) < 1e-12);
  auto other = quick(1e-3, 4);
  other.seed = 4;
  CHECK(max_difference(a.final_model, train_classifier(small_corpus(), kScheme, emb, other).final_model) > 0.0);
}

TEST_CASE("regressor training reduces validation error") {
  const HashingEmbedder emb(128);
  const auto r = train_regressor(small_corpus(), emb, quick(3e-3, 30));
  CHECK(r.best_model.head == HeadKind::sigmoid_scaled);
  CHECK(r.val_mse < r.initial.val_loss);
  CHECK(r.val_mse == doctest::Approx(r.best_epoch == 0 ? r.initial.val_loss
                                                       : r.history[static_cast<std::size_t>(r.best_epoch - 1)].val_loss));
  CHECK(std::isnan(r.history.front().val_accuracy));
}

TEST_CASE("loss csv has one row per epoch") {
  const HashingEmbedder emb(32);
  const auto r = train_classifier(small_corpus(), kScheme, emb, quick(1e-3, 5));
  std::ostringstream out;
  write_loss_csv(r, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "epoch,train_loss,val_loss,val_accuracy");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.rfind(std::to_string(rows) + ",", 0) == 0);
  }
  CHECK(rows == 5);
}

TEST_CASE("training configuration errors") {
  const HashingEmbedder emb(32);
  auto c = quick(-1.0, 1);
  CHECK_THROWS_AS(train_classifier(small_corpus(), kScheme, emb, c), ConfigError);
  c = quick(1e-3, 1);
  c.batch_size = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = quick(1e-3, 1);
  c.hidden = {0};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_THROWS_AS(train_classifier(Corpus{}, kScheme, emb, quick(1e-3, 1)), CorpusError);
}
