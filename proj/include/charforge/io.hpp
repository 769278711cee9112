#pragma once

#include <sys/file.h>
#include <fcntl.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "charforge/error.hpp"

namespace charforge {

namespace fs = std::filesystem;

// Field order in emitted records follows insertion order.
using Json = nlohmann::ordered_json;

inline std::string dump_line(const Json& j) {
  return j.dump(-1, ' ', false, Json::error_handler_t::replace);
}

namespace detail {

// Throws DataError when `key` is missing or not a string.
inline std::string require_string(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw DataError(std::string("missing field '") + key + "'");
  if (!it->is_string()) {
    throw DataError(std::string("field '") + key + "' is not a string");
  }
  return it->get<std::string>();
}

}  // namespace detail

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Splits on '\n'; a trailing '\r' is stripped and a final empty line dropped.
inline std::vector<std::string> split_lines(std::string_view data) {
  std::vector<std::string> lines;
  size_t start = 0;
  while (start < data.size()) {
    size_t end = data.find('\n', start);
    if (end == std::string_view::npos) end = data.size();
    std::string_view line = data.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.emplace_back(line);
    start = end + 1;
  }
  return lines;
}

inline std::vector<std::string> read_lines(const fs::path& path) {
  return split_lines(read_file(path));
}

// Writes through a sibling temp file and renames it into place, so readers
// never observe a half-written stage file.
inline void write_file_atomic(const fs::path& path, std::string_view data) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw DataError("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

inline void write_lines_atomic(const fs::path& path,
                               const std::vector<std::string>& lines) {
  std::string data;
  for (const auto& l : lines) {
    data += l;
    data += '\n';
  }
  write_file_atomic(path, data);
}

// Exclusive advisory lock on "<path>.lock" for the lifetime of the object.
// One writer per stage file.
class FileLock {
 public:
  explicit FileLock(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    lock_path_ = path;
    lock_path_ += ".lock";
    fd_ = ::open(lock_path_.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
    if (fd_ < 0) throw DataError("cannot open lock " + lock_path_.string());
    if (::flock(fd_, LOCK_EX) != 0) {
      ::close(fd_);
      throw DataError("cannot lock " + lock_path_.string());
    }
  }
  ~FileLock() {
    if (fd_ >= 0) {
      ::flock(fd_, LOCK_UN);
      ::close(fd_);
      std::error_code ec;
      fs::remove(lock_path_, ec);
    }
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  fs::path lock_path_;
  int fd_ = -1;
};

// One structured line per record-level decision (skipped clause, unresolved
// name, rejected record). Events carry no timestamps so logs are reproducible.
class EventLog {
 public:
  void add(std::string_view event, Json fields = Json::object()) {
    Json line = Json::object();
    line["event"] = event;
    for (auto& [k, v] : context_.items()) line[k] = v;
    for (auto& [k, v] : fields.items()) line[k] = v;
    lines_.push_back(dump_line(line));
  }
  const std::vector<std::string>& lines() const { return lines_; }
  size_t size() const { return lines_.size(); }
  void append(const EventLog& other) {
    lines_.insert(lines_.end(), other.lines_.begin(), other.lines_.end());
  }
  void flush_to(const fs::path& path) const { write_lines_atomic(path, lines_); }

  // Fields copied into every following event (e.g. the current doc_id).
  void set_context(Json fields) { context_ = std::move(fields); }

 private:
  std::vector<std::string> lines_;
  Json context_ = Json::object();
};

}  // namespace charforge
