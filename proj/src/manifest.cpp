#include "platdiff/manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "platdiff/config.hpp"
#include "platdiff/errors.hpp"

namespace platdiff::io {

using nlohmann::json;

std::string fnv1a_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("fnv1a_file: cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return fnv1a_hex(buffer.str());
}

std::string utc_now_iso() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

json entry_to_json(const RunManifest& m) {
  json j;
  j["subcommand"] = m.subcommand;
  j["config_hash"] = m.config_hash;
  j["input_hashes"] = m.input_hashes;
  j["seed"] = m.seed;
  j["code_version"] = m.code_version;
  j["started_at"] = m.started_at;
  j["finished_at"] = m.finished_at;
  j["outputs"] = m.outputs;
  return j;
}

RunManifest json_to_entry(const json& j) {
  RunManifest m;
  m.subcommand = j.value("subcommand", "");
  m.config_hash = j.value("config_hash", "");
  if (j.contains("input_hashes"))
    m.input_hashes = j.at("input_hashes").get<std::map<std::string, std::string>>();
  m.seed = j.value("seed", std::uint64_t{0});
  m.code_version = j.value("code_version", "");
  m.started_at = j.value("started_at", "");
  m.finished_at = j.value("finished_at", "");
  if (j.contains("outputs")) m.outputs = j.at("outputs").get<std::vector<std::string>>();
  return m;
}

}  // namespace

void append_manifest(const std::string& dir, const RunManifest& entry) {
  const std::string path = dir + "/manifest.json";
  json arr = json::array();
  {
    std::ifstream in(path);
    if (in) {
      json existing = json::parse(in, nullptr, false);
      if (!existing.is_discarded() && existing.is_array()) arr = std::move(existing);
    }
  }
  arr.push_back(entry_to_json(entry));
  std::ofstream out(path);
  if (!out) throw Error("append_manifest: cannot write " + path);
  out << arr.dump(2) << "\n";
}

std::vector<RunManifest> read_manifests(const std::string& dir) {
  const std::string path = dir + "/manifest.json";
  std::ifstream in(path);
  if (!in) throw Error("read_manifests: cannot open " + path);
  const json arr = json::parse(in);
  std::vector<RunManifest> out;
  for (const auto& j : arr) out.push_back(json_to_entry(j));
  return out;
}

}  // namespace platdiff::io
