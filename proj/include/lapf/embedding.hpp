#pragma once

#include "lapf/core.hpp"

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lapf {

enum class EmbedderKind { hashing, remote };

std::string_view to_string(EmbedderKind k);
EmbedderKind parse_embedder_kind(std::string_view s);

struct EmbedderConfig {
  EmbedderKind kind = EmbedderKind::hashing;
  /// Embedding dimension. For the remote kind 0 accepts whatever the service
  /// reports; a positive value is checked against it.
  int dim = 256;
  std::vector<int> ngram_orders = {2, 3};
  std::string endpoint;  // e.g. http://127.0.0.1:8000
  std::chrono::milliseconds timeout{30000};
  int batch_size = 32;
};

/// Text encoder. Implementations are reentrant; outputs are L2-normalized
/// (the zero vector stays zero).
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual int dim() const = 0;
  virtual Eigen::VectorXd embed(std::string_view text) const = 0;
  /// One column per text.
  virtual Eigen::MatrixXd embed_batch(std::span<const std::string> texts) const;
};

std::uint64_t fnv1a64(std::string_view bytes);

/// Splits UTF-8 text into code points, each kept as its byte sequence.
/// Invalid bytes become single-byte units.
std::vector<std::string_view> utf8_chars(std::string_view text);

/// Signed feature hashing of character n-grams. Each n-gram's UTF-8 bytes are
/// hashed with 64-bit FNV-1a; the hash modulo d picks the bucket and the top
/// bit picks the sign. ASCII letters are lowercased first.
class HashingEmbedder final : public Embedder {
 public:
  explicit HashingEmbedder(int dim = 256, std::vector<int> orders = {2, 3});

  int dim() const override { return dim_; }
  Eigen::VectorXd embed(std::string_view text) const override;

  /// (bucket, sign) of every n-gram occurrence, in text order.
  std::vector<std::pair<int, int>> features(std::string_view text) const;

 private:
  int dim_;
  std::vector<int> orders_;
};

/// Client of the `/embed` HTTP service.
class RemoteEmbedder final : public Embedder {
 public:
  explicit RemoteEmbedder(EmbedderConfig config);

  int dim() const override;
  Eigen::VectorXd embed(std::string_view text) const override;
  Eigen::MatrixXd embed_batch(std::span<const std::string> texts) const override;

 private:
  Eigen::MatrixXd request(std::span<const std::string> texts) const;

  EmbedderConfig config_;
  mutable std::atomic<int> dim_;
};

std::shared_ptr<const Embedder> make_embedder(const EmbedderConfig& config);

/// Convenience wrapper around make_embedder(config)->embed(text).
Eigen::VectorXd embed(const EmbedderConfig& config, std::string_view text);

}  // namespace lapf
