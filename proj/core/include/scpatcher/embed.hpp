#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "scpatcher/error.hpp"

namespace scpatcher::embed {

enum class ProviderErrorKind { RemoteUnavailable, DimensionMismatch, BadResponse };
using ProviderError = KindedError<ProviderErrorKind>;

/// Thrown when two vectors of different dimension meet.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

struct EmbeddingVector {
  std::vector<double> values;

  std::size_t dimension() const noexcept { return values.size(); }
  double norm() const;

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;
};

/// Euclidean distance ||q - d||_2. Throws DimensionMismatch.
double semantic_distance(const EmbeddingVector& q, const EmbeddingVector& d);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::string name() const = 0;
  virtual std::size_t dimension() const = 0;
  virtual EmbeddingVector embed(std::string_view code_text) const = 0;
  /// Batch form; the default embeds one text at a time.
  virtual std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) const;
};

inline constexpr std::size_t kDefaultDimension = 256;
inline constexpr std::string_view kHashingEmbedderName = "hash-v1";

/// Reference provider: lexes the code (comments dropped, identifiers kept,
/// literals collapsed to LIT), hashes each token into one of D buckets with
/// FNV-1a, applies log(1 + count) and L2-normalizes. An empty bag maps to e0.
class HashingEmbedder final : public EmbeddingProvider {
 public:
  explicit HashingEmbedder(std::size_t dimension = kDefaultDimension);
  std::string name() const override { return std::string(kHashingEmbedderName); }
  std::size_t dimension() const override { return dimension_; }
  EmbeddingVector embed(std::string_view code_text) const override;

 private:
  std::size_t dimension_;
};

struct RemoteEmbedderConfig {
  std::string url;    // full endpoint, e.g. http://host:8080/v1/embeddings
  std::string api_key;
  std::string model = "text-embedding-3-small";
  std::size_t dimension = 1536;
  std::chrono::milliseconds timeout{30000};

  /// Reads SCPATCHER_EMBED_URL / SCPATCHER_EMBED_KEY (/ SCPATCHER_EMBED_MODEL).
  static RemoteEmbedderConfig from_env(std::size_t dimension);
};

/// POSTs {"model", "input": [texts]} and accepts either an OpenAI-style
/// {"data": [{"embedding": [...]}]} or {"embeddings": [[...]]} body. Requests
/// are serialized through an internal mutex.
class RemoteEmbedder final : public EmbeddingProvider {
 public:
  explicit RemoteEmbedder(RemoteEmbedderConfig cfg);
  std::string name() const override { return "remote:" + cfg_.model; }
  std::size_t dimension() const override { return cfg_.dimension; }
  EmbeddingVector embed(std::string_view code_text) const override;
  std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) const override;

 private:
  RemoteEmbedderConfig cfg_;
  mutable std::mutex mu_;
};

/// Provider recorded in a KB's metadata: "hash-v1" or "remote:<model>".
std::unique_ptr<EmbeddingProvider> make_provider(std::string_view name, std::size_t dimension);

}  // namespace scpatcher::embed
