#include "lapf/embedding.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace lapf {

namespace {

void normalize_in_place(Eigen::Ref<Eigen::VectorXd> v) {
  const double norm = v.norm();
  if (norm > 0.0) v /= norm;
}

}  // namespace

std::string_view to_string(EmbedderKind k) { return k == EmbedderKind::remote ? "remote" : "hashing"; }

EmbedderKind parse_embedder_kind(std::string_view s) {
  if (s == "hashing") return EmbedderKind::hashing;
  if (s == "remote") return EmbedderKind::remote;
  throw ConfigError("unknown embedder kind '" + std::string(s) + "'");
}

Eigen::MatrixXd Embedder::embed_batch(std::span<const std::string> texts) const {
  Eigen::MatrixXd out(dim(), static_cast<Index>(texts.size()));
  for (std::size_t i = 0; i < texts.size(); ++i) out.col(static_cast<Index>(i)) = embed(texts[i]);
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::string_view> utf8_chars(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    if (lead >= 0xF0 && lead < 0xF8) len = 4;
    else if (lead >= 0xE0) len = 3;
    else if (lead >= 0xC0) len = 2;
    if (lead >= 0xF8 || i + len > text.size()) len = 1;
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(text[i + k]) & 0xC0) != 0x80) {
        len = 1;
        break;
      }
    }
    out.push_back(text.substr(i, len));
    i += len;
  }
  return out;
}

HashingEmbedder::HashingEmbedder(int dim, std::vector<int> orders) : dim_(dim), orders_(std::move(orders)) {
  if (dim_ <= 0) throw ConfigError("embedding dimension must be positive");
  if (orders_.empty()) throw ConfigError("hashing embedder needs at least one n-gram order");
  for (int n : orders_)
    if (n < 1) throw ConfigError("n-gram orders must be positive");
}

std::vector<std::pair<int, int>> HashingEmbedder::features(std::string_view text) const {
  std::string lowered(text);
  for (auto& c : lowered)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  const auto chars = utf8_chars(lowered);
  std::vector<std::pair<int, int>> out;
  std::string gram;
  for (int n : orders_) {
    if (chars.size() < static_cast<std::size_t>(n)) continue;
    for (std::size_t i = 0; i + n <= chars.size(); ++i) {
      gram.clear();
      for (int k = 0; k < n; ++k) gram += chars[i + k];
      const std::uint64_t h = fnv1a64(gram);
      const int bucket = static_cast<int>(h % static_cast<std::uint64_t>(dim_));
      const int sign = (h >> 63) ? -1 : 1;
      out.emplace_back(bucket, sign);
    }
  }
  return out;
}

Eigen::VectorXd HashingEmbedder::embed(std::string_view text) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim_);
  for (const auto& [bucket, sign] : features(text)) v(bucket) += sign;
  normalize_in_place(v);
  return v;
}

RemoteEmbedder::RemoteEmbedder(EmbedderConfig config) : config_(std::move(config)), dim_(config_.dim) {
  if (config_.endpoint.empty()) throw ConfigError("remote embedder requires an endpoint");
  if (config_.batch_size < 1) throw ConfigError("remote embedder batch size must be at least 1");
  if (config_.dim < 0) throw ConfigError("embedding dimension must be nonnegative");
}

int RemoteEmbedder::dim() const {
  if (dim_.load() <= 0) {
    const std::string probe = "probe";
    request(std::span<const std::string>(&probe, 1));
  }
  return dim_.load();
}

Eigen::VectorXd RemoteEmbedder::embed(std::string_view text) const {
  const std::string t(text);
  return request(std::span<const std::string>(&t, 1)).col(0);
}

Eigen::MatrixXd RemoteEmbedder::embed_batch(std::span<const std::string> texts) const {
  if (texts.empty()) return Eigen::MatrixXd(std::max(dim_.load(), 0), 0);
  std::vector<Eigen::MatrixXd> parts;
  Index cols = 0;
  for (std::size_t start = 0; start < texts.size(); start += static_cast<std::size_t>(config_.batch_size)) {
    const auto len = std::min(texts.size() - start, static_cast<std::size_t>(config_.batch_size));
    parts.push_back(request(texts.subspan(start, len)));
    cols += parts.back().cols();
  }
  Eigen::MatrixXd out(parts.front().rows(), cols);
  Index c = 0;
  for (const auto& p : parts) {
    out.middleCols(c, p.cols()) = p;
    c += p.cols();
  }
  return out;
}

Eigen::MatrixXd RemoteEmbedder::request(std::span<const std::string> texts) const {
  using nlohmann::json;
  httplib::Client client(config_.endpoint);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  client.set_write_timeout(config_.timeout);

  const json body = {{"texts", std::vector<std::string>(texts.begin(), texts.end())}};
  const auto res = client.Post("/embed", body.dump(), "application/json");
  if (!res) throw EmbeddingServiceError("embedding service unreachable: " + httplib::to_string(res.error()), true);
  if (res->status == 503) throw EmbeddingServiceError("embedding service is loading its model", true);
  if (res->status == 400) throw ProtocolError("embedding service rejected the request: " + res->body);
  if (res->status != 200)
    throw EmbeddingServiceError("embedding service answered HTTP " + std::to_string(res->status), false);

  json reply;
  try {
    reply = json::parse(res->body);
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("embedding reply is not JSON: ") + e.what());
  }
  if (!reply.is_object() || !reply.contains("dim") || !reply.contains("embeddings") ||
      !reply["dim"].is_number_integer() || !reply["embeddings"].is_array())
    throw ProtocolError("embedding reply lacks dim/embeddings");
  const int dim = reply["dim"].get<int>();
  if (dim <= 0) throw ProtocolError("embedding reply has a nonpositive dim");
  const int expected = dim_.load();
  if (expected > 0 && dim != expected)
    throw ProtocolError("embedding dim " + std::to_string(dim) + " does not match expected " +
                        std::to_string(expected));
  const auto& rows = reply["embeddings"];
  if (rows.size() != texts.size()) throw ProtocolError("embedding reply row count does not match the request");

  Eigen::MatrixXd out(dim, static_cast<Index>(texts.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(dim))
      throw ProtocolError("embedding row " + std::to_string(i) + " has the wrong length");
    for (int k = 0; k < dim; ++k) {
      if (!row[k].is_number()) throw ProtocolError("embedding row holds a non-number");
      out(k, static_cast<Index>(i)) = row[k].get<double>();
    }
    if (!out.col(static_cast<Index>(i)).allFinite()) throw ProtocolError("embedding row holds a non-finite value");
    normalize_in_place(out.col(static_cast<Index>(i)));
  }
  if (expected <= 0) dim_.store(dim);
  return out;
}

std::shared_ptr<const Embedder> make_embedder(const EmbedderConfig& config) {
  if (config.kind == EmbedderKind::remote) return std::make_shared<RemoteEmbedder>(config);
  return std::make_shared<HashingEmbedder>(config.dim, config.ngram_orders);
}

Eigen::VectorXd embed(const EmbedderConfig& config, std::string_view text) {
  return make_embedder(config)->embed(text);
}

}  // namespace lapf
