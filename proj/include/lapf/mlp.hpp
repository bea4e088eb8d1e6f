#pragma once

#include "lapf/core.hpp"

#include <cmath>
#include <span>
#include <string_view>
#include <vector>

namespace lapf {

/// Output head: softmax over K logits (classifier) or scale * sigmoid of one
/// logit (regressor).
enum class HeadKind { softmax, sigmoid_scaled };

std::string_view to_string(HeadKind h);
HeadKind parse_head_kind(std::string_view s);

template <typename Scalar>
struct DenseLayer {
  MatrixX<Scalar> weight;  // out x in
  VectorX<Scalar> bias;
};

/// Fully connected network with rectified hidden layers and a linear last
/// layer feeding the head. Also used to hold gradients of the same shape.
template <typename Scalar>
struct BasicMlp {
  std::vector<DenseLayer<Scalar>> layers;
  HeadKind head = HeadKind::softmax;
  Scalar output_scale = Scalar(5);

  Index input_size() const { return layers.empty() ? 0 : layers.front().weight.cols(); }
  Index output_size() const { return layers.empty() ? 0 : layers.back().weight.rows(); }

  std::vector<Index> sizes() const {
    std::vector<Index> s;
    if (layers.empty()) return s;
    s.push_back(input_size());
    for (const auto& l : layers) s.push_back(l.weight.rows());
    return s;
  }

  bool all_finite() const {
    for (const auto& l : layers)
      if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
    return true;
  }

  void validate() const {
    if (layers.empty()) throw ConfigError("network has no layers");
    for (std::size_t i = 0; i < layers.size(); ++i) {
      if (layers[i].bias.size() != layers[i].weight.rows())
        throw ConfigError("layer " + std::to_string(i) + ": bias size does not match weight rows");
      if (i > 0 && layers[i].weight.cols() != layers[i - 1].weight.rows())
        throw ConfigError("layer " + std::to_string(i) + ": input size does not chain");
    }
    if (head == HeadKind::sigmoid_scaled && output_size() != 1)
      throw ConfigError("regression head needs exactly one output");
    if (!all_finite()) throw ConfigError("network parameters must be finite");
  }

  Scalar squared_norm() const {
    Scalar s = 0;
    for (const auto& l : layers) s += l.weight.squaredNorm() + l.bias.squaredNorm();
    return s;
  }
};

using Mlp = BasicMlp<double>;

/// All-zero parameters with the given layer sizes [in, hidden..., out].
template <typename Scalar>
BasicMlp<Scalar> zero_mlp(std::span<const Index> sizes, HeadKind head, Scalar output_scale = Scalar(5)) {
  if (sizes.size() < 2) throw ConfigError("network needs at least an input and an output size");
  BasicMlp<Scalar> m;
  m.head = head;
  m.output_scale = output_scale;
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    if (sizes[i] < 1 || sizes[i - 1] < 1) throw ConfigError("layer sizes must be positive");
    m.layers.push_back({MatrixX<Scalar>::Zero(sizes[i], sizes[i - 1]), VectorX<Scalar>::Zero(sizes[i])});
  }
  m.validate();
  return m;
}

/// Glorot-uniform weights, zero biases.
template <typename Scalar>
BasicMlp<Scalar> init_mlp(std::span<const Index> sizes, HeadKind head, RandomStream& rng,
                          Scalar output_scale = Scalar(5)) {
  auto m = zero_mlp<Scalar>(sizes, head, output_scale);
  for (auto& l : m.layers) {
    const Scalar bound = std::sqrt(Scalar(6) / Scalar(l.weight.rows() + l.weight.cols()));
    for (Index c = 0; c < l.weight.cols(); ++c)
      for (Index r = 0; r < l.weight.rows(); ++r)
        l.weight(r, c) = bound * static_cast<Scalar>(2.0 * rng.uniform() - 1.0);
  }
  return m;
}

template <typename Scalar>
struct ForwardPass {
  std::vector<MatrixX<Scalar>> activations;  // activations[0] is the input
  MatrixX<Scalar> logits;
};

/// Batched forward pass; one sample per column of X.
template <typename Scalar, typename Derived>
ForwardPass<Scalar> forward(const BasicMlp<Scalar>& mlp, const Eigen::MatrixBase<Derived>& X) {
  if (X.rows() != mlp.input_size())
    throw ConfigError("input size " + std::to_string(X.rows()) + " does not match network input " +
                      std::to_string(mlp.input_size()));
  ForwardPass<Scalar> f;
  f.activations.reserve(mlp.layers.size());
  f.activations.emplace_back(X);
  for (std::size_t i = 0; i < mlp.layers.size(); ++i) {
    const auto& l = mlp.layers[i];
    MatrixX<Scalar> z = (l.weight * f.activations.back()).colwise() + l.bias;
    if (i + 1 == mlp.layers.size()) {
      f.logits = std::move(z);
    } else {
      f.activations.push_back(z.cwiseMax(Scalar(0)));
    }
  }
  return f;
}

/// Column-wise softmax with the max subtracted for stability.
template <typename Derived>
MatrixX<typename Derived::Scalar> softmax_columns(const Eigen::MatrixBase<Derived>& z) {
  using Scalar = typename Derived::Scalar;
  MatrixX<Scalar> p(z.rows(), z.cols());
  for (Index c = 0; c < z.cols(); ++c) {
    const Scalar mx = z.col(c).maxCoeff();
    p.col(c) = (z.col(c).array() - mx).exp().matrix();
    p.col(c) /= p.col(c).sum();
  }
  return p;
}

template <typename Scalar>
Scalar sigmoid(Scalar z) {
  return z >= Scalar(0) ? Scalar(1) / (Scalar(1) + std::exp(-z)) : std::exp(z) / (Scalar(1) + std::exp(z));
}

/// p(label | text embedding) for a softmax-head network.
template <typename Scalar, typename Derived>
VectorX<Scalar> classify(const BasicMlp<Scalar>& mlp, const Eigen::MatrixBase<Derived>& e) {
  if (mlp.head != HeadKind::softmax) throw ConfigError("classify needs a softmax head");
  return softmax_columns(forward(mlp, e).logits).col(0);
}

/// Scalar prediction in [0, output_scale] for a regression-head network.
template <typename Scalar, typename Derived>
Scalar regress(const BasicMlp<Scalar>& mlp, const Eigen::MatrixBase<Derived>& e) {
  if (mlp.head != HeadKind::sigmoid_scaled) throw ConfigError("regress needs a regression head");
  return mlp.output_scale * sigmoid(forward(mlp, e).logits(0, 0));
}

template <typename Scalar>
struct LossAndGradient {
  Scalar loss;
  BasicMlp<Scalar> gradient;
};

namespace detail {

// Back-propagates dL/dlogits through the network.
template <typename Scalar>
BasicMlp<Scalar> backprop(const BasicMlp<Scalar>& mlp, const ForwardPass<Scalar>& f, MatrixX<Scalar> delta) {
  BasicMlp<Scalar> g;
  g.head = mlp.head;
  g.output_scale = mlp.output_scale;
  g.layers.resize(mlp.layers.size());
  for (std::size_t i = mlp.layers.size(); i-- > 0;) {
    const auto& a_in = f.activations[i];
    g.layers[i].weight = delta * a_in.transpose();
    g.layers[i].bias = delta.rowwise().sum();
    if (i > 0) {
      MatrixX<Scalar> back = mlp.layers[i].weight.transpose() * delta;
      delta = back.cwiseProduct((a_in.array() > Scalar(0)).template cast<Scalar>().matrix());
    }
  }
  return g;
}

}  // namespace detail

/// Mean softmax cross-entropy over the batch. Labels are 0-based class indices.
template <typename Scalar, typename Derived>
Scalar cross_entropy_loss(const BasicMlp<Scalar>& mlp, const Eigen::MatrixBase<Derived>& X,
                          std::span<const int> labels) {
  const auto f = forward(mlp, X);
  Scalar loss = 0;
  for (Index c = 0; c < f.logits.cols(); ++c) {
    const Scalar mx = f.logits.col(c).maxCoeff();
    const Scalar lse = mx + std::log((f.logits.col(c).array() - mx).exp().sum());
    loss += lse - f.logits(labels[c], c);
  }
  return loss / Scalar(X.cols());
}

/// Mean squared error of scale * sigmoid(logit) against the targets.
template <typename Scalar, typename Derived, typename DerivedT>
Scalar squared_error_loss(const BasicMlp<Scalar>& mlp, const Eigen::MatrixBase<Derived>& X,
                          const Eigen::MatrixBase<DerivedT>& targets) {
  const auto f = forward(mlp, X);
  Scalar loss = 0;
  for (Index c = 0; c < f.logits.cols(); ++c) {
    const Scalar d = mlp.output_scale * sigmoid(f.logits(0, c)) - targets(c);
    loss += d * d;
  }
  return loss / Scalar(X.cols());
}

/// Reverse-mode gradient of cross_entropy_loss.
template <typename Scalar, typename Derived>
LossAndGradient<Scalar> backward(const BasicMlp<Scalar>& mlp, const Eigen::MatrixBase<Derived>& X,
                                 std::span<const int> labels) {
  if (mlp.head != HeadKind::softmax) throw ConfigError("label targets need a softmax head");
  if (static_cast<Index>(labels.size()) != X.cols()) throw ConfigError("label count does not match batch size");
  const auto f = forward(mlp, X);
  const Index batch = X.cols();
  MatrixX<Scalar> delta = softmax_columns(f.logits);
  Scalar loss = 0;
  for (Index c = 0; c < batch; ++c) {
    const int y = labels[c];
    if (y < 0 || y >= delta.rows()) throw ConfigError("label out of range");
    const Scalar mx = f.logits.col(c).maxCoeff();
    loss += mx + std::log((f.logits.col(c).array() - mx).exp().sum()) - f.logits(y, c);
    delta(y, c) -= Scalar(1);
  }
  delta /= Scalar(batch);
  return {loss / Scalar(batch), detail::backprop(mlp, f, std::move(delta))};
}

/// Reverse-mode gradient of squared_error_loss.
template <typename Scalar, typename Derived, typename DerivedT>
LossAndGradient<Scalar> backward(const BasicMlp<Scalar>& mlp, const Eigen::MatrixBase<Derived>& X,
                                 const Eigen::MatrixBase<DerivedT>& targets) {
  if (mlp.head != HeadKind::sigmoid_scaled) throw ConfigError("real targets need a regression head");
  if (targets.size() != X.cols()) throw ConfigError("target count does not match batch size");
  const auto f = forward(mlp, X);
  const Index batch = X.cols();
  MatrixX<Scalar> delta(1, batch);
  Scalar loss = 0;
  for (Index c = 0; c < batch; ++c) {
    const Scalar s = sigmoid(f.logits(0, c));
    const Scalar d = mlp.output_scale * s - targets(c);
    loss += d * d;
    delta(0, c) = Scalar(2) * d * mlp.output_scale * s * (Scalar(1) - s) / Scalar(batch);
  }
  return {loss / Scalar(batch), detail::backprop(mlp, f, std::move(delta))};
}

template <typename Scalar>
struct AdamSettings {
  Scalar learning_rate = Scalar(1e-5);
  Scalar beta1 = Scalar(0.9);
  Scalar beta2 = Scalar(0.999);
  Scalar epsilon = Scalar(1e-8);
};

template <typename Scalar>
class AdamOptimizer {
 public:
  AdamOptimizer(const BasicMlp<Scalar>& shape, AdamSettings<Scalar> settings) : settings_(settings) {
    for (const auto& l : shape.layers) {
      m_.push_back({MatrixX<Scalar>::Zero(l.weight.rows(), l.weight.cols()), VectorX<Scalar>::Zero(l.bias.size())});
    }
    v_ = m_;
  }

  void step(BasicMlp<Scalar>& params, const BasicMlp<Scalar>& grad) {
    ++t_;
    const Scalar c1 = Scalar(1) - std::pow(settings_.beta1, Scalar(t_));
    const Scalar c2 = Scalar(1) - std::pow(settings_.beta2, Scalar(t_));
    for (std::size_t i = 0; i < params.layers.size(); ++i) {
      update(params.layers[i].weight, grad.layers[i].weight, m_[i].weight, v_[i].weight, c1, c2);
      update(params.layers[i].bias, grad.layers[i].bias, m_[i].bias, v_[i].bias, c1, c2);
    }
  }

  long steps() const { return t_; }

 private:
  template <typename P, typename G>
  void update(P& p, const G& g, P& m, P& v, Scalar c1, Scalar c2) const {
    m = settings_.beta1 * m + (Scalar(1) - settings_.beta1) * g;
    v = settings_.beta2 * v + (Scalar(1) - settings_.beta2) * g.cwiseProduct(g);
    p.array() -= settings_.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + settings_.epsilon);
  }

  AdamSettings<Scalar> settings_;
  std::vector<DenseLayer<Scalar>> m_, v_;
  long t_ = 0;
};

}  // namespace lapf
