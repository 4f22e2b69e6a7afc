#include "scpatcher/embed.hpp"

#include <cmath>
#include <cstdlib>
#include <nlohmann/json.hpp>

#include "scpatcher/digest.hpp"
#include "scpatcher/http.hpp"
#include "scpatcher/lexer.hpp"

namespace scpatcher::embed {

using nlohmann::json;

double EmbeddingVector::norm() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s);
}

double semantic_distance(const EmbeddingVector& q, const EmbeddingVector& d) {
  if (q.dimension() != d.dimension()) {
    throw DimensionMismatch("DimensionMismatch: " + std::to_string(q.dimension()) + " vs " +
                            std::to_string(d.dimension()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < q.values.size(); ++i) {
    const double diff = q.values[i] - d.values[i];
    s += diff * diff;
  }
  return std::sqrt(s);
}

std::vector<EmbeddingVector> EmbeddingProvider::embed_batch(const std::vector<std::string>& texts) const {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed(t));
  return out;
}

HashingEmbedder::HashingEmbedder(std::size_t dimension) : dimension_(dimension) {
  if (dimension_ == 0) throw std::invalid_argument("HashingEmbedder: dimension must be positive");
}

EmbeddingVector HashingEmbedder::embed(std::string_view code_text) const {
  std::vector<double> counts(dimension_, 0.0);
  bool any = false;
  for (const auto& tk : ingest::lex(code_text).tokens) {
    const bool literal = tk.kind == ingest::TokenKind::Number || tk.kind == ingest::TokenKind::String;
    const std::string_view key = literal ? std::string_view("LIT") : std::string_view(tk.text);
    counts[fnv1a64(key) % dimension_] += 1.0;
    any = true;
  }
  EmbeddingVector v;
  v.values.assign(dimension_, 0.0);
  if (!any) {
    v.values[0] = 1.0;
    return v;
  }
  double norm2 = 0.0;
  for (std::size_t i = 0; i < dimension_; ++i) {
    v.values[i] = std::log1p(counts[i]);
    norm2 += v.values[i] * v.values[i];
  }
  const double norm = std::sqrt(norm2);
  for (double& x : v.values) x /= norm;
  return v;
}

RemoteEmbedderConfig RemoteEmbedderConfig::from_env(std::size_t dimension) {
  RemoteEmbedderConfig cfg;
  if (const char* u = std::getenv("SCPATCHER_EMBED_URL")) cfg.url = u;
  if (const char* k = std::getenv("SCPATCHER_EMBED_KEY")) cfg.api_key = k;
  if (const char* m = std::getenv("SCPATCHER_EMBED_MODEL")) cfg.model = m;
  cfg.dimension = dimension;
  return cfg;
}

RemoteEmbedder::RemoteEmbedder(RemoteEmbedderConfig cfg) : cfg_(std::move(cfg)) {}

EmbeddingVector RemoteEmbedder::embed(std::string_view code_text) const {
  return embed_batch({std::string(code_text)}).front();
}

std::vector<EmbeddingVector> RemoteEmbedder::embed_batch(const std::vector<std::string>& texts) const {
  if (cfg_.url.empty()) {
    throw ProviderError(ProviderErrorKind::RemoteUnavailable, "RemoteUnavailable: SCPATCHER_EMBED_URL is not set");
  }
  const json request = {{"model", cfg_.model}, {"input", texts}};
  net::HttpResult res;
  {
    std::lock_guard lock(mu_);
    res = net::post_json(cfg_.url, cfg_.api_key, request.dump(), cfg_.timeout);
  }
  if (res.status == 0) {
    throw ProviderError(ProviderErrorKind::RemoteUnavailable, "RemoteUnavailable: " + res.transport_error);
  }
  if (res.status / 100 != 2) {
    throw ProviderError(ProviderErrorKind::RemoteUnavailable, "RemoteUnavailable: HTTP " + std::to_string(res.status));
  }
  std::vector<EmbeddingVector> out;
  try {
    const json body = json::parse(res.body);
    if (body.contains("data")) {
      for (const auto& item : body.at("data")) out.push_back({item.at("embedding").get<std::vector<double>>()});
    } else {
      for (const auto& item : body.at("embeddings")) out.push_back({item.get<std::vector<double>>()});
    }
  } catch (const json::exception& e) {
    throw ProviderError(ProviderErrorKind::BadResponse, std::string("BadResponse: ") + e.what());
  }
  if (out.size() != texts.size()) {
    throw ProviderError(ProviderErrorKind::BadResponse, "BadResponse: expected " + std::to_string(texts.size()) +
                                                            " vectors, got " + std::to_string(out.size()));
  }
  for (const auto& v : out) {
    if (v.dimension() != cfg_.dimension) {
      throw ProviderError(ProviderErrorKind::DimensionMismatch,
                          "DimensionMismatch: provider returned " + std::to_string(v.dimension()) +
                              ", expected " + std::to_string(cfg_.dimension));
    }
  }
  return out;
}

std::unique_ptr<EmbeddingProvider> make_provider(std::string_view name, std::size_t dimension) {
  if (name == kHashingEmbedderName) return std::make_unique<HashingEmbedder>(dimension);
  if (name.starts_with("remote:")) {
    auto cfg = RemoteEmbedderConfig::from_env(dimension);
    cfg.model = std::string(name.substr(7));
    return std::make_unique<RemoteEmbedder>(std::move(cfg));
  }
  throw std::invalid_argument("unknown embedder '" + std::string(name) + "'");
}

}  // namespace scpatcher::embed
