#ifndef PLATDIFF_PANEL_IO_HPP
#define PLATDIFF_PANEL_IO_HPP

#include <string>
#include <vector>

#include "platdiff/preprocess.hpp"
#include "platdiff/types.hpp"

namespace platdiff::io {

// Self-describing JSON panel file (schema_version + columns).
void save_panel(const std::string& path, const ObservationPanel& panel);
ObservationPanel load_panel(const std::string& path);

void save_latent_paths(const std::string& path, const LatentPaths& paths);
LatentPaths load_latent_paths(const std::string& path);

// Transform sidecar for inverting model-unit outputs back to raw units.
void save_transforms(const std::string& path,
                     const std::vector<preprocess::TransformRecord>& transforms);
std::vector<preprocess::TransformRecord> load_transforms(const std::string& path);

// ISO-8601 calendar date -> serial day number (proleptic Gregorian).
long parse_iso_date(const std::string& iso);

// Raw CSV ingestion. The platform file needs the header
//   date,users,chrome,ie,amo_contrib,queue_len,addons_cum,release
// with consecutive daily ISO-8601 dates; `release` is a 0/1 flag.
struct PlatformCsv {
  preprocess::RawPlatform raw;
  long start_day = 0;  // serial day of the first row (panel day 1)
};
PlatformCsv read_platform_csv(const std::string& path);

// Complement file header:
//   date,downloads,usage,rating_mean,rating_var,release
// `id` and `category` come from per-file metadata lines `# id=...` and
// `# category=...`. Dates must fall inside the platform window; the launch
// day is derived from the first row.
preprocess::RawComplement read_complement_csv(const std::string& path, long start_day,
                                              int platform_days);

// Hierarchy design rows from the category labels: intercept plus one
// indicator per category except the alphabetically last.
void build_category_dummies(std::vector<preprocess::RawComplement>& complements);

// Minimal CSV table writer (documented header + numeric/string cells).
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

std::string format_double(double v);

}  // namespace platdiff::io

#endif  // PLATDIFF_PANEL_IO_HPP
