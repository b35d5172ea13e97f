#ifndef PLATDIFF_PREPROCESS_HPP
#define PLATDIFF_PREPROCESS_HPP

#include <map>
#include <span>
#include <string>
#include <vector>

#include "platdiff/types.hpp"

namespace platdiff::preprocess {

inline constexpr double kDefaultReleaseDecay = 0.89;

// Sorted release day-indices for one series.
struct ReleaseLog {
  std::string id;
  std::vector<int> days;

  void validate(int t0, int t1) const;
};

// Geometric carry-over of the most recent release: gamma^(t - tau*) for the
// latest release tau* <= t, 0 before the first release.
std::vector<double> smooth_releases(const ReleaseLog& log, double gamma, int t0, int t1);

using CategoryMap = std::map<std::string, std::string>;  // complement id -> category

struct OlWarning {
  int day;
  std::string category;
};

// Within-category usage shares for one day. Zero category usage yields zero
// shares plus a warning record.
std::vector<double> observational_learning(const std::vector<std::string>& ids,
                                           const std::vector<double>& usage,
                                           const CategoryMap& categories, int day,
                                           std::vector<OlWarning>* warnings = nullptr);

enum class TransformKind { None, Demean, Rescale, DemeanRescale };

std::string to_string(TransformKind k);
TransformKind transform_kind_from_string(const std::string& s);

// Fitted constants of a standardization, sufficient to invert it.
struct TransformRecord {
  std::string name;
  TransformKind kind = TransformKind::None;
  double mean = 0.0;
  double scale = 1.0;

  double apply(double raw) const;
  double invert(double transformed) const;
};

// Demean and/or rescale a series; the default scale constant is the maximum
// absolute value after demeaning.
std::pair<std::vector<double>, TransformRecord> standardize(std::span<const double> series,
                                                            TransformKind kind,
                                                            const std::string& name = {},
                                                            double scale_override = 0.0);

// Raw inputs, one row per day starting at day 1 of the platform window.
struct RawPlatform {
  std::vector<double> users;        // platform daily users
  std::vector<double> chrome;       // competitor usage
  std::vector<double> ie;           // competitor usage
  std::vector<double> amo_contrib;  // governance: editor contributions
  std::vector<double> queue_len;    // governance: nomination queue length
  std::vector<double> addons_cum;   // cumulative add-ons created
  ReleaseLog releases;              // platform version releases
};

struct RawComplement {
  std::string id;
  std::string category;
  int launch = 1;  // day of first observation
  std::vector<double> downloads;    // cumulative, aligned to launch..launch+len-1
  std::vector<double> usage;        // daily users (raw)
  std::vector<double> rating_mean;  // rating valence
  std::vector<double> rating_var;   // rating dispersion
  ReleaseLog releases;
  Eigen::VectorXd dummies;  // hierarchy design row (intercept first)
};

struct PreprocessConfig {
  double release_decay = kDefaultReleaseDecay;
  bool lag_ol_usage = true;  // OL uses previous-day usage
};

struct AssembledPanel {
  ObservationPanel panel;
  std::vector<TransformRecord> transforms;
  std::vector<OlWarning> ol_warnings;
};

// End-to-end covariate construction: release smoothing, OL shares,
// per-window standardization, and panel validation.
AssembledPanel assemble_panel(const RawPlatform& platform,
                              const std::vector<RawComplement>& complements,
                              const PreprocessConfig& config = {});

}  // namespace platdiff::preprocess

#endif  // PLATDIFF_PREPROCESS_HPP
