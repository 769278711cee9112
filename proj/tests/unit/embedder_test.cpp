#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include "charforge/http_embedder.hpp"
#include "test_support.hpp"

using namespace charforge;

namespace {

// In-process stand-in for the embedding service. `mode` selects the reply.
class FakeService {
 public:
  enum class Mode { kOk, kHttp500, kWrongCount, kRagged, kNotJson };

  FakeService() {
    server_.Post("/embed", [this](const httplib::Request& req, httplib::Response& res) {
      ++requests_;
      auto body = nlohmann::json::parse(req.body);
      auto texts = body.at("texts").get<std::vector<std::string>>();
      max_batch_ = std::max(max_batch_.load(), texts.size());
      nlohmann::json vectors = nlohmann::json::array();
      HashingEmbedder stub(8);
      for (const auto& t : texts) vectors.push_back(stub.embed_one(t));
      switch (mode) {
        case Mode::kOk: break;
        case Mode::kHttp500: res.status = 500; return;
        case Mode::kWrongCount: vectors.push_back(vectors.back()); break;
        case Mode::kRagged: vectors.back().push_back(1.0); break;
        case Mode::kNotJson: res.set_content("oops", "text/plain"); return;
      }
      res.set_content(nlohmann::json{{"vectors", vectors}}.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeService() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  size_t requests() const { return requests_; }
  size_t max_batch() const { return max_batch_; }

  std::atomic<Mode> mode{Mode::kOk};

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::atomic<size_t> requests_{0};
  std::atomic<size_t> max_batch_{0};
};

std::vector<std::string> texts(size_t n) {
  std::vector<std::string> out;
  for (size_t i = 0; i < n; ++i) out.push_back("sentence number " + std::to_string(i));
  return out;
}

}  // namespace

TEST(HashingEmbedder, DeterministicAndSeeded) {
  HashingEmbedder a(64, 1), b(64, 1), c(64, 2);
  auto t = texts(5);
  EXPECT_EQ(a.embed(t), b.embed(t));
  EXPECT_NE(a.embed(t), c.embed(t));
  for (const auto& v : a.embed(t)) EXPECT_EQ(v.size(), 64u);
  EXPECT_THROW(HashingEmbedder(0), ConfigError);
}

TEST(HashingEmbedder, CaseAndPunctuationInsensitive) {
  HashingEmbedder e;
  EXPECT_DOUBLE_EQ(cosine(e.embed_one("Ann won."), e.embed_one("ann WON")), 1.0);
}

TEST(Cosine, DimensionMismatchIsEmbedderError) {
  EXPECT_THROW(cosine(Vector{1, 0}, Vector{1, 0, 0}), EmbedderError);
  EXPECT_EQ(cosine(Vector{0, 0}, Vector{1, 0}), 0.0);
}

TEST(HttpEmbedder, BatchesAndPreservesOrder) {
  FakeService svc;
  HttpEmbedder e(svc.url(), 4);
  auto t = texts(10);
  auto got = e.embed(t);
  HashingEmbedder stub(8);
  EXPECT_EQ(got, stub.embed(t));
  EXPECT_EQ(svc.requests(), 3u);
  EXPECT_EQ(svc.max_batch(), 4u);
}

TEST(HttpEmbedder, UrlWithEmbedPath) {
  FakeService svc;
  HttpEmbedder e(svc.url() + "/embed", 64);
  EXPECT_EQ(e.embed(texts(2)).size(), 2u);
}

TEST(HttpEmbedder, ErrorsBecomeEmbedderError) {
  FakeService svc;
  HttpEmbedder e(svc.url(), 64, 5);
  for (auto m : {FakeService::Mode::kHttp500, FakeService::Mode::kWrongCount,
                 FakeService::Mode::kRagged, FakeService::Mode::kNotJson}) {
    svc.mode = m;
    EXPECT_THROW(e.embed(texts(3)), EmbedderError) << static_cast<int>(m);
  }
}

TEST(HttpEmbedder, UnreachableServiceIsEmbedderError) {
  int port;
  {
    httplib::Server s;
    port = s.bind_to_any_port("127.0.0.1");
  }
  HttpEmbedder e("http://127.0.0.1:" + std::to_string(port), 64, 2);
  EXPECT_THROW(e.embed(texts(1)), EmbedderError);
}
