#ifndef PLATDIFF_CONFIG_HPP
#define PLATDIFF_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>

#include "platdiff/errors.hpp"

namespace platdiff::io {

// Key-value configuration with dotted sections (`sampler.iterations=4000`).
// Environment variables with the PLATDIFF_ prefix override file values
// (dots become underscores, uppercased: PLATDIFF_SAMPLER_ITERATIONS).
class Config {
 public:
  Config() = default;
  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  void set(const std::string& key, const std::string& value);
  const std::map<std::string, std::string>& values() const { return values_; }

  // Canonical serialized form (sorted keys) and its FNV-1a hash.
  std::string canonical() const;
  std::string hash() const;

 private:
  void apply_env_overrides();
  std::map<std::string, std::string> values_;
};

// FNV-1a 64-bit hash of a byte string, hex-encoded.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace platdiff::io

#endif  // PLATDIFF_CONFIG_HPP
