#ifndef PLATDIFF_MANIFEST_HPP
#define PLATDIFF_MANIFEST_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace platdiff::io {

// One entry per artifact-producing run. The manifest file in a run directory
// is an append-only JSON array of these entries.
struct RunManifest {
  std::string subcommand;
  std::string config_hash;
  std::map<std::string, std::string> input_hashes;  // path -> FNV-1a hex
  std::uint64_t seed = 0;
  std::string code_version;
  std::string started_at;   // ISO-8601 UTC
  std::string finished_at;
  std::vector<std::string> outputs;
};

std::string fnv1a_file(const std::string& path);

// Current UTC wall-clock as ISO-8601 (the only wall-clock use; excluded from
// determinism comparisons).
std::string utc_now_iso();

// Appends the entry to <dir>/manifest.json, creating the file if needed.
void append_manifest(const std::string& dir, const RunManifest& entry);

std::vector<RunManifest> read_manifests(const std::string& dir);

}  // namespace platdiff::io

#endif  // PLATDIFF_MANIFEST_HPP
