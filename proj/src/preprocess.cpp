#include "platdiff/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace platdiff::preprocess {

void ReleaseLog::validate(int t0, int t1) const {
  for (size_t i = 0; i < days.size(); ++i) {
    if (i > 0 && days[i] <= days[i - 1])
      throw Error("ReleaseLog " + id + ": day indices must be strictly increasing");
    if (days[i] < t0 || days[i] > t1)
      throw WindowViolation("ReleaseLog " + id + ": release day outside series window");
  }
}

std::vector<double> smooth_releases(const ReleaseLog& log, double gamma, int t0, int t1) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw Error("smooth_releases: gamma must lie in (0,1)");
  if (t1 < t0) throw WindowViolation("smooth_releases: empty window");
  log.validate(t0, t1);

  std::vector<double> out(t1 - t0 + 1, 0.0);
  size_t next = 0;
  int last_release = -1;
  for (int t = t0; t <= t1; ++t) {
    while (next < log.days.size() && log.days[next] <= t) last_release = log.days[next++];
    out[t - t0] = (last_release < 0) ? 0.0 : std::pow(gamma, t - last_release);
  }
  return out;
}

std::vector<double> observational_learning(const std::vector<std::string>& ids,
                                           const std::vector<double>& usage,
                                           const CategoryMap& categories, int day,
                                           std::vector<OlWarning>* warnings) {
  if (ids.size() != usage.size())
    throw DimensionMismatch("observational_learning: ids and usage differ in length");
  std::map<std::string, double> totals;
  for (size_t i = 0; i < ids.size(); ++i) {
    if (usage[i] < 0.0) throw Error("observational_learning: usage must be >= 0");
    const auto it = categories.find(ids[i]);
    if (it == categories.end())
      throw MissingColumn("observational_learning: no category for id " + ids[i]);
    totals[it->second] += usage[i];
  }
  std::vector<double> shares(ids.size(), 0.0);
  std::map<std::string, bool> warned;
  for (size_t i = 0; i < ids.size(); ++i) {
    const std::string& cat = categories.at(ids[i]);
    const double denom = totals[cat];
    if (denom > 0.0) {
      shares[i] = usage[i] / denom;
    } else if (warnings && !warned[cat]) {
      warnings->push_back({day, cat});
      warned[cat] = true;
    }
  }
  return shares;
}

std::string to_string(TransformKind k) {
  switch (k) {
    case TransformKind::None: return "none";
    case TransformKind::Demean: return "demean";
    case TransformKind::Rescale: return "rescale";
    case TransformKind::DemeanRescale: return "demean-then-rescale";
  }
  return "none";
}

TransformKind transform_kind_from_string(const std::string& s) {
  if (s == "none") return TransformKind::None;
  if (s == "demean") return TransformKind::Demean;
  if (s == "rescale") return TransformKind::Rescale;
  if (s == "demean-then-rescale") return TransformKind::DemeanRescale;
  throw Error("unknown transform kind: " + s);
}

double TransformRecord::apply(double raw) const { return (raw - mean) / scale; }

double TransformRecord::invert(double transformed) const {
  return transformed * scale + mean;
}

std::pair<std::vector<double>, TransformRecord> standardize(std::span<const double> series,
                                                            TransformKind kind,
                                                            const std::string& name,
                                                            double scale_override) {
  if (series.empty()) throw DegenerateSeries("standardize: empty series");
  TransformRecord rec;
  rec.name = name;
  rec.kind = kind;

  const bool demean = kind == TransformKind::Demean || kind == TransformKind::DemeanRescale;
  const bool rescale =
      kind == TransformKind::Rescale || kind == TransformKind::DemeanRescale;

  if (demean)
    rec.mean = std::accumulate(series.begin(), series.end(), 0.0) /
               static_cast<double>(series.size());
  if (rescale) {
    if (scale_override != 0.0) {
      rec.scale = scale_override;
    } else {
      double maxabs = 0.0;
      for (double v : series) maxabs = std::max(maxabs, std::abs(v - rec.mean));
      if (maxabs == 0.0)
        throw DegenerateSeries("standardize: constant series cannot be rescaled (" +
                               name + ")");
      rec.scale = maxabs;
    }
  }
  std::vector<double> out(series.size());
  for (size_t i = 0; i < series.size(); ++i) out[i] = rec.apply(series[i]);
  return {std::move(out), rec};
}

namespace {

void require_length(size_t got, size_t want, const std::string& what) {
  if (got != want)
    throw MissingColumn("assemble_panel: column '" + what + "' has length " +
                        std::to_string(got) + ", expected " + std::to_string(want));
}

void check_nondecreasing(const std::vector<double>& v, const std::string& what) {
  for (size_t i = 1; i < v.size(); ++i)
    if (v[i] < v[i - 1])
      throw NonMonotoneCumulative("assemble_panel: cumulative series '" + what +
                                  "' decreases at index " + std::to_string(i));
}

std::vector<double> demeaned(std::span<const double> v, const std::string& name,
                             std::vector<TransformRecord>& recs) {
  auto [out, rec] = standardize(v, TransformKind::Demean, name);
  recs.push_back(rec);
  return out;
}

}  // namespace

AssembledPanel assemble_panel(const RawPlatform& platform,
                              const std::vector<RawComplement>& complements,
                              const PreprocessConfig& config) {
  const size_t T = platform.users.size();
  if (T < 2) throw Error("assemble_panel: need at least two platform days");
  require_length(platform.chrome.size(), T, "chrome");
  require_length(platform.ie.size(), T, "ie");
  require_length(platform.amo_contrib.size(), T, "amo_contrib");
  require_length(platform.queue_len.size(), T, "queue_len");
  require_length(platform.addons_cum.size(), T, "addons_cum");
  check_nondecreasing(platform.addons_cum, "addons_cum");

  AssembledPanel out;
  auto& recs = out.transforms;
  ObservationPanel& panel = out.panel;
  panel.T = static_cast<int>(T);

  auto [yp, yp_rec] = standardize(platform.users, TransformKind::Rescale, "platform.users");
  recs.push_back(yp_rec);
  panel.y_platform = yp;

  auto [chrome, c_rec] =
      standardize(platform.chrome, TransformKind::DemeanRescale, "platform.chrome");
  recs.push_back(c_rec);
  auto [ie, ie_rec] = standardize(platform.ie, TransformKind::DemeanRescale, "platform.ie");
  recs.push_back(ie_rec);
  auto [amo, amo_rec] = standardize(platform.amo_contrib, TransformKind::DemeanRescale,
                                    "platform.amo_contrib");
  recs.push_back(amo_rec);
  auto [queue, q_rec] =
      standardize(platform.queue_len, TransformKind::DemeanRescale, "platform.queue_len");
  recs.push_back(q_rec);
  auto [addons, a_rec] =
      standardize(platform.addons_cum, TransformKind::Rescale, "platform.addons_cum");
  recs.push_back(a_rec);

  panel.X.resize(T);
  panel.Z.resize(T);
  panel.A = addons;
  for (size_t k = 0; k < T; ++k) {
    panel.X[k] = Eigen::Vector2d(chrome[k], ie[k]);
    panel.Z[k] = Eigen::Vector2d(amo[k], queue[k]);
  }

  // Platform release signal, smoothed once over the full window.
  const std::vector<double> pv_full =
      smooth_releases(platform.releases, config.release_decay, 1, panel.T);

  // Index usage series by day for the OL denominators.
  CategoryMap categories;
  for (const auto& c : complements) {
    if (c.category.empty())
      throw MissingColumn("assemble_panel: complement " + c.id + " lacks a category");
    categories[c.id] = c.category;
  }

  auto usage_at = [&](const RawComplement& c, int day) -> double {
    const int end = c.launch + static_cast<int>(c.usage.size()) - 1;
    if (day < c.launch || day > end) return 0.0;
    return c.usage[day - c.launch];
  };

  for (const auto& raw : complements) {
    const int len = static_cast<int>(raw.downloads.size());
    if (len < 2) throw Error("assemble_panel: complement " + raw.id + " too short");
    const int end = raw.launch + len - 1;
    if (raw.launch < 1 || end > panel.T)
      throw WindowViolation("assemble_panel: complement " + raw.id +
                            " window outside the platform window");
    require_length(raw.usage.size(), len, raw.id + ".usage");
    require_length(raw.rating_mean.size(), len, raw.id + ".rating_mean");
    require_length(raw.rating_var.size(), len, raw.id + ".rating_var");
    check_nondecreasing(raw.downloads, raw.id + ".downloads");

    ComplementSeries s;
    s.id = raw.id;
    s.category = raw.category;
    s.launch = raw.launch;
    s.end = end;
    s.dummies = raw.dummies;

    auto [y, y_rec] = standardize(raw.downloads, TransformKind::Rescale,
                                  raw.id + ".downloads");
    recs.push_back(y_rec);
    s.y = y;

    // OL shares from (lagged) within-category usage, then demeaned.
    std::vector<double> ol_raw(len, 0.0);
    for (int t = raw.launch; t <= end; ++t) {
      const int usage_day = (config.lag_ol_usage && t > raw.launch) ? t - 1 : t;
      std::vector<std::string> ids;
      std::vector<double> usage;
      for (const auto& other : complements) {
        if (other.category != raw.category) continue;
        ids.push_back(other.id);
        usage.push_back(usage_at(other, usage_day));
      }
      const auto shares =
          observational_learning(ids, usage, categories, t, &out.ol_warnings);
      for (size_t i = 0; i < ids.size(); ++i)
        if (ids[i] == raw.id) ol_raw[t - raw.launch] = shares[i];
    }
    s.ol = demeaned(ol_raw, raw.id + ".ol", recs);

    const std::vector<double> av_raw =
        smooth_releases(raw.releases, config.release_decay, raw.launch, end);
    s.av = demeaned(av_raw, raw.id + ".av", recs);

    const std::vector<double> pv_window(pv_full.begin() + (raw.launch - 1),
                                        pv_full.begin() + end);
    s.pv = demeaned(pv_window, raw.id + ".pv", recs);

    s.rtv = demeaned(raw.rating_var, raw.id + ".rtv", recs);
    s.stavg = demeaned(raw.rating_mean, raw.id + ".stavg", recs);

    panel.complements.push_back(std::move(s));
  }
  return out;
}

}  // namespace platdiff::preprocess
