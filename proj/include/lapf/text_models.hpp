#pragma once

#include "lapf/embedding.hpp"
#include "lapf/mlp.hpp"

#include <memory>
#include <string_view>

namespace lapf {

/// Text -> p(q | s) over the quantization labels.
class TextClassifier {
 public:
  virtual ~TextClassifier() = default;
  virtual int levels() const = 0;
  virtual Eigen::VectorXd label_distribution(std::string_view text) const = 0;
};

/// Text -> point estimate of the cognitive value.
class TextRegressor {
 public:
  virtual ~TextRegressor() = default;
  virtual double predict(std::string_view text) const = 0;
};

class MlpTextClassifier final : public TextClassifier {
 public:
  MlpTextClassifier(Mlp model, std::shared_ptr<const Embedder> embedder);
  int levels() const override { return static_cast<int>(model_.output_size()); }
  Eigen::VectorXd label_distribution(std::string_view text) const override;
  const Mlp& model() const { return model_; }

 private:
  Mlp model_;
  std::shared_ptr<const Embedder> embedder_;
};

class MlpTextRegressor final : public TextRegressor {
 public:
  MlpTextRegressor(Mlp model, std::shared_ptr<const Embedder> embedder);
  double predict(std::string_view text) const override;

 private:
  Mlp model_;
  std::shared_ptr<const Embedder> embedder_;
};

/// Shannon entropy in nats; 0 log 0 = 0.
double entropy(const Eigen::VectorXd& p);

}  // namespace lapf
