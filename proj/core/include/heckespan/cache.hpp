#ifndef HECKESPAN_CACHE_HPP
#define HECKESPAN_CACHE_HPP

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace heckespan {

struct checksum_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Result cache: one JSON file per key, with a format version and a content
// checksum. Writes are atomic (write-temp-rename); a lock file makes the
// directory single-process. Hits are byte-identical to what was stored.
class Cache {
 public:
  explicit Cache(const std::filesystem::path& dir);
  ~Cache();
  Cache(const Cache&) = delete;
  Cache& operator=(const Cache&) = delete;

  // Payload for the key, or nullopt. Throws checksum_error when the stored
  // entry fails its integrity check.
  std::optional<nlohmann::json> load(const std::string& key) const;
  void store(const std::string& key, const nlohmann::json& payload);

  std::filesystem::path path_for(const std::string& key) const;
  static uint64_t fnv1a(const std::string& bytes);
  static constexpr int kFormatVersion = 1;

 private:
  std::filesystem::path dir_;
  int lock_fd_ = -1;
};

}  // namespace heckespan

#endif
