#pragma once

#include "lapf/corpus.hpp"
#include "lapf/embedding.hpp"
#include "lapf/mlp.hpp"
#include "lapf/quantization.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace lapf {

struct TrainConfig {
  double learning_rate = 1e-5;
  int batch_size = 16;
  int epochs = 100;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;
  std::vector<Index> hidden = {128, 64};

  void validate() const;
};

struct EpochMetrics {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;  // classifier only; NaN for the regressor
};

/// Both the last-epoch and the best-validation-epoch parameters are kept;
/// `best_model` is the one meant for inference.
struct TrainResult {
  Mlp initial_model;
  Mlp final_model;
  Mlp best_model;
  int best_epoch = 0;
  EpochMetrics initial;  // before the first update, epoch 0
  std::vector<EpochMetrics> history;
  double val_mse = 0.0;  // regressor: validation MSE of best_model
};

/// Minibatch Adam on softmax cross-entropy with labels from label_of.
TrainResult train_classifier(const Corpus& corpus, const QuantizationScheme& scheme,
                             const Embedder& embedder, const TrainConfig& cfg);

/// Minibatch Adam on squared error against level_ratio * output_scale.
TrainResult train_regressor(const Corpus& corpus, const Embedder& embedder, const TrainConfig& cfg,
                            double output_scale = 5.0);

/// epoch,train_loss,val_loss,val_accuracy rows, one per epoch.
void write_loss_csv(const TrainResult& result, std::ostream& out);

}  // namespace lapf
