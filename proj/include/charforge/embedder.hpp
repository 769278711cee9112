#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "charforge/error.hpp"
#include "charforge/text.hpp"

namespace charforge {

using Vector = std::vector<double>;

// Raised when an embedding provider cannot produce vectors.
class EmbedderError : public Error {
 public:
  using Error::Error;
};

// Sentence embedding provider. Implementations return one vector per input
// text, all of the same dimension.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::vector<Vector> embed(const std::vector<std::string>& texts) = 0;
  virtual std::string name() const = 0;
};

// Cosine similarity clamped to [-1, 1]; 0 when either vector is zero.
inline double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw EmbedderError("cosine of vectors with different dimensions");
  }
  double dot = 0, na = 0, nb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  double c = dot / (std::sqrt(na) * std::sqrt(nb));
  if (c > 1.0) c = 1.0;
  if (c < -1.0) c = -1.0;
  return c;
}

// Deterministic hashed bag of words: each lowercased word token adds 1 to
// bucket FNV-1a(seed, token) mod dim. Stands in for a neural model in tests
// and replay runs.
class HashingEmbedder : public Embedder {
 public:
  explicit HashingEmbedder(size_t dim = 256, uint64_t seed = 0)
      : dim_(dim), seed_(seed) {
    if (dim_ == 0) throw ConfigError("embedding dimension must be positive");
  }

  std::vector<Vector> embed(const std::vector<std::string>& texts) override {
    std::vector<Vector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed_one(t));
    return out;
  }

  Vector embed_one(std::string_view text) const {
    Vector v(dim_, 0.0);
    for (const auto& tok : word_tokens(text)) v[hash(tok) % dim_] += 1.0;
    return v;
  }

  std::string name() const override { return "stub"; }

 private:
  uint64_t hash(std::string_view s) const {
    uint64_t h = 1469598103934665603ULL ^ (seed_ * 0x9E3779B97F4A7C15ULL);
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    return h;
  }

  size_t dim_;
  uint64_t seed_;
};

}  // namespace charforge
