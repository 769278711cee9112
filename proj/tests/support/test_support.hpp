#pragma once

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <sys/wait.h>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

#include "charforge/io.hpp"

namespace cftest {

inline std::filesystem::path data_dir() { return CHARFORGE_TEST_DATA; }

// Fresh directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("charforge-test-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& p) const { return path_ / p; }

 private:
  std::filesystem::path path_;
};

// Small generator helpers for property tests.
class Gen {
 public:
  explicit Gen(uint64_t seed) : rng_(seed) {}

  size_t uniform(size_t lo, size_t hi) {  // inclusive
    return std::uniform_int_distribution<size_t>(lo, hi)(rng_);
  }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

  template <class T>
  const T& pick(const std::vector<T>& v) { return v[uniform(0, v.size() - 1)]; }

  std::string word(size_t min_len = 1, size_t max_len = 8) {
    std::string w;
    size_t n = uniform(min_len, max_len);
    for (size_t i = 0; i < n; ++i) w += static_cast<char>('a' + uniform(0, 25));
    return w;
  }

  std::string capitalized(size_t min_len = 2, size_t max_len = 8) {
    std::string w = word(min_len, max_len);
    w[0] = static_cast<char>(w[0] - 'a' + 'A');
    return w;
  }

  template <class It>
  void shuffle(It b, It e) { std::shuffle(b, e, rng_); }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// Relative path -> contents of every regular file under `root`.
inline std::map<std::string, std::string> snapshot(const std::filesystem::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) {
      out[std::filesystem::relative(e.path(), root).string()] = charforge::read_file(e.path());
    }
  }
  return out;
}

struct CliResult {
  int code = -1;
  std::string output;  // stdout and stderr interleaved
};

// Runs the built CLI with `args` (already shell-quoted where needed).
inline CliResult run_cli(const std::string& args) {
  std::string cmd = std::string("'") + CHARFORGE_CLI + "' " + args + " 2>&1";
  CliResult r;
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.output.append(buf, n);
  int status = ::pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

inline std::string quote(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

}  // namespace cftest
