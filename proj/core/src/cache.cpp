#include "heckespan/cache.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <fstream>
#include <sstream>

namespace heckespan {

namespace fs = std::filesystem;

Cache::Cache(const fs::path& dir) : dir_(dir) {
  fs::create_directories(dir_);
  fs::path lock = dir_ / ".lock";
  lock_fd_ = ::open(lock.c_str(), O_CREAT | O_RDWR, 0644);
  if (lock_fd_ < 0) throw std::runtime_error("cache: cannot open lock file " + lock.string());
  if (::flock(lock_fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(lock_fd_);
    throw std::runtime_error("cache: directory is owned by another process: " + dir_.string());
  }
}

Cache::~Cache() {
  if (lock_fd_ >= 0) {
    ::flock(lock_fd_, LOCK_UN);
    ::close(lock_fd_);
  }
}

uint64_t Cache::fnv1a(const std::string& bytes) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

fs::path Cache::path_for(const std::string& key) const {
  std::string name;
  for (char c : key) name += (isalnum((unsigned char)c) ? c : '_');
  std::ostringstream os;
  os << name << "-" << std::hex << fnv1a(key) << ".json";
  return dir_ / os.str();
}

std::optional<nlohmann::json> Cache::load(const std::string& key) const {
  fs::path p = path_for(key);
  std::ifstream in(p);
  if (!in) return std::nullopt;
  nlohmann::json entry;
  try {
    in >> entry;
  } catch (const nlohmann::json::exception&) {
    throw checksum_error("cache: unreadable entry for key " + key);
  }
  if (!entry.contains("payload") || !entry.contains("checksum") || !entry.contains("version"))
    throw checksum_error("cache: malformed entry for key " + key);
  std::string dumped = entry["payload"].dump();
  std::ostringstream want;
  want << std::hex << fnv1a(dumped);
  if (entry["checksum"].get<std::string>() != want.str())
    throw checksum_error("cache: checksum mismatch for key " + key);
  return entry["payload"];
}

void Cache::store(const std::string& key, const nlohmann::json& payload) {
  nlohmann::json entry;
  entry["key"] = key;
  entry["version"] = kFormatVersion;
  entry["payload"] = payload;
  std::ostringstream sum;
  sum << std::hex << fnv1a(payload.dump());
  entry["checksum"] = sum.str();

  fs::path p = path_for(key);
  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    out << entry.dump(1) << "\n";
    if (!out) throw std::runtime_error("cache: write failed for " + tmp.string());
  }
  fs::rename(tmp, p);
}

}  // namespace heckespan
