#include "lapf/text_models.hpp"

#include <cmath>

namespace lapf {

namespace {

void check_input(const Mlp& model, const Embedder& embedder) {
  model.validate();
  if (model.input_size() != embedder.dim())
    throw ConfigError("network input size " + std::to_string(model.input_size()) +
                      " does not match embedding dimension " + std::to_string(embedder.dim()));
}

}  // namespace

MlpTextClassifier::MlpTextClassifier(Mlp model, std::shared_ptr<const Embedder> embedder)
    : model_(std::move(model)), embedder_(std::move(embedder)) {
  if (model_.head != HeadKind::softmax) throw ConfigError("classifier needs a softmax head");
  check_input(model_, *embedder_);
}

Eigen::VectorXd MlpTextClassifier::label_distribution(std::string_view text) const {
  return classify(model_, embedder_->embed(text));
}

MlpTextRegressor::MlpTextRegressor(Mlp model, std::shared_ptr<const Embedder> embedder)
    : model_(std::move(model)), embedder_(std::move(embedder)) {
  if (model_.head != HeadKind::sigmoid_scaled) throw ConfigError("regressor needs a regression head");
  check_input(model_, *embedder_);
}

double MlpTextRegressor::predict(std::string_view text) const { return regress(model_, embedder_->embed(text)); }

double entropy(const Eigen::VectorXd& p) {
  double h = 0.0;
  for (Index i = 0; i < p.size(); ++i)
    if (p(i) > 0.0) h -= p(i) * std::log(p(i));
  return h;
}

}  // namespace lapf
