#pragma once

#include <string>
#include <vector>

#include "httplib.h"
#include "json.hpp"

#include "charforge/embedder.hpp"

namespace charforge {

// Checks a /embed reply: {"vectors": [...]} with `expected` numeric
// vectors of one non-zero dimension.
inline std::vector<Vector> parse_embed_reply(const nlohmann::json& reply, size_t expected) {
  auto it = reply.is_object() ? reply.find("vectors") : reply.end();
  if (it == reply.end() || !it->is_array() || it->size() != expected) {
    throw EmbedderError("embedder reply has wrong vector count");
  }
  std::vector<Vector> out;
  for (const auto& v : *it) {
    if (!v.is_array() || v.empty()) throw EmbedderError("embedder vector is not a non-empty array");
    Vector vec;
    vec.reserve(v.size());
    for (const auto& x : v) {
      if (!x.is_number()) throw EmbedderError("embedder vector has non-number");
      vec.push_back(x.get<double>());
    }
    if (!out.empty() && vec.size() != out.front().size()) {
      throw EmbedderError("embedder returned vectors of unequal dimension");
    }
    out.push_back(std::move(vec));
  }
  return out;
}

// Client for the embedding service: POST <base>/embed with {"texts": [...]}
// answered by {"vectors": [[...], ...]}. Requests are sent in batches.
class HttpEmbedder : public Embedder {
 public:
  explicit HttpEmbedder(std::string url, size_t batch_size = 64,
                        time_t timeout_seconds = 60)
      : url_(std::move(url)), batch_size_(batch_size ? batch_size : 1) {
    std::string base = url_;
    path_ = "/embed";
    auto scheme = base.find("://");
    size_t slash = base.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    if (slash != std::string::npos) {
      std::string p = base.substr(slash);
      base = base.substr(0, slash);
      while (!p.empty() && p.back() == '/') p.pop_back();
      if (!p.empty()) path_ = p.size() >= 6 && p.substr(p.size() - 6) == "/embed" ? p : p + "/embed";
    }
    client_ = std::make_unique<httplib::Client>(base);
    if (!client_->is_valid()) throw ConfigError("invalid embedder url '" + url_ + "'");
    client_->set_connection_timeout(timeout_seconds, 0);
    client_->set_read_timeout(timeout_seconds, 0);
  }

  std::vector<Vector> embed(const std::vector<std::string>& texts) override {
    std::vector<Vector> out;
    out.reserve(texts.size());
    for (size_t start = 0; start < texts.size(); start += batch_size_) {
      size_t end = std::min(texts.size(), start + batch_size_);
      nlohmann::json body = {{"texts", std::vector<std::string>(
                                           texts.begin() + static_cast<long>(start),
                                           texts.begin() + static_cast<long>(end))}};
      auto res = client_->Post(path_, body.dump(-1, ' ', false,
                                                nlohmann::json::error_handler_t::replace),
                               "application/json");
      if (!res) {
        throw EmbedderError("embedder request failed: " + httplib::to_string(res.error()));
      }
      if (res->status != 200) {
        throw EmbedderError("embedder returned HTTP " + std::to_string(res->status));
      }
      nlohmann::json reply;
      try {
        reply = nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::exception& e) {
        throw EmbedderError(std::string("embedder reply is not JSON: ") + e.what());
      }
      for (auto& v : parse_embed_reply(reply, end - start)) {
        if (!out.empty() && v.size() != out.front().size()) {
          throw EmbedderError("embedder returned vectors of unequal dimension");
        }
        out.push_back(std::move(v));
      }
    }
    return out;
  }

  std::string name() const override { return url_; }

 private:
  std::string url_;
  std::string path_;
  size_t batch_size_;
  std::unique_ptr<httplib::Client> client_;
};

}  // namespace charforge
