#include "platdiff/panel_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace platdiff::io {

using nlohmann::json;

namespace {

constexpr int kPanelSchemaVersion = 1;

json vec_to_json(const std::vector<double>& v) {
  json arr = json::array();
  for (double x : v) {
    if (is_missing(x))
      arr.push_back(nullptr);
    else
      arr.push_back(x);
  }
  return arr;
}

std::vector<double> json_to_vec(const json& arr) {
  std::vector<double> out;
  out.reserve(arr.size());
  for (const auto& x : arr) out.push_back(x.is_null() ? kMissing : x.get<double>());
  return out;
}

json eigvecs_to_json(const std::vector<Eigen::VectorXd>& v) {
  json arr = json::array();
  for (const auto& x : v) {
    json row = json::array();
    for (int i = 0; i < x.size(); ++i) row.push_back(x[i]);
    arr.push_back(row);
  }
  return arr;
}

std::vector<Eigen::VectorXd> json_to_eigvecs(const json& arr) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(arr.size());
  for (const auto& row : arr) {
    Eigen::VectorXd x(row.size());
    for (size_t i = 0; i < row.size(); ++i) x[static_cast<int>(i)] = row[i].get<double>();
    out.push_back(std::move(x));
  }
  return out;
}

json load_json(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw Error(std::string(what) + ": cannot open " + path);
  json j;
  in >> j;
  return j;
}

void write_json(const std::string& path, const json& j, const char* what) {
  std::ofstream out(path);
  if (!out) throw Error(std::string(what) + ": cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace

void save_panel(const std::string& path, const ObservationPanel& panel) {
  json j;
  j["schema"] = "platdiff-panel";
  j["schema_version"] = kPanelSchemaVersion;
  j["T"] = panel.T;
  j["y_platform"] = vec_to_json(panel.y_platform);
  j["X"] = eigvecs_to_json(panel.X);
  j["Z"] = eigvecs_to_json(panel.Z);
  j["A"] = vec_to_json(panel.A);
  json comps = json::array();
  for (const auto& s : panel.complements) {
    json c;
    c["id"] = s.id;
    c["category"] = s.category;
    c["launch"] = s.launch;
    c["end"] = s.end;
    c["y"] = vec_to_json(s.y);
    c["pv"] = vec_to_json(s.pv);
    c["av"] = vec_to_json(s.av);
    c["rtv"] = vec_to_json(s.rtv);
    c["stavg"] = vec_to_json(s.stavg);
    c["ol"] = vec_to_json(s.ol);
    json dummies = json::array();
    for (int i = 0; i < s.dummies.size(); ++i) dummies.push_back(s.dummies[i]);
    c["dummies"] = dummies;
    comps.push_back(std::move(c));
  }
  j["complements"] = std::move(comps);
  write_json(path, j, "save_panel");
}

ObservationPanel load_panel(const std::string& path) {
  const json j = load_json(path, "load_panel");
  if (j.value("schema", "") != "platdiff-panel")
    throw Error("load_panel: " + path + " is not a panel file");
  ObservationPanel panel;
  panel.T = j.at("T").get<int>();
  panel.y_platform = json_to_vec(j.at("y_platform"));
  panel.X = json_to_eigvecs(j.at("X"));
  panel.Z = json_to_eigvecs(j.at("Z"));
  panel.A = json_to_vec(j.at("A"));
  for (const auto& c : j.at("complements")) {
    ComplementSeries s;
    s.id = c.at("id").get<std::string>();
    s.category = c.at("category").get<std::string>();
    s.launch = c.at("launch").get<int>();
    s.end = c.at("end").get<int>();
    s.y = json_to_vec(c.at("y"));
    s.pv = json_to_vec(c.at("pv"));
    s.av = json_to_vec(c.at("av"));
    s.rtv = json_to_vec(c.at("rtv"));
    s.stavg = json_to_vec(c.at("stavg"));
    s.ol = json_to_vec(c.at("ol"));
    const auto& dummies = c.at("dummies");
    s.dummies.resize(static_cast<int>(dummies.size()));
    for (size_t i = 0; i < dummies.size(); ++i)
      s.dummies[static_cast<int>(i)] = dummies[i].get<double>();
    panel.complements.push_back(std::move(s));
  }
  return panel;
}

void save_latent_paths(const std::string& path, const LatentPaths& paths) {
  json j;
  j["schema"] = "platdiff-latent";
  j["m"] = vec_to_json(paths.m);
  json n = json::array();
  for (const auto& v : paths.n) n.push_back(vec_to_json(v));
  j["n"] = std::move(n);
  write_json(path, j, "save_latent_paths");
}

LatentPaths load_latent_paths(const std::string& path) {
  const json j = load_json(path, "load_latent_paths");
  LatentPaths paths;
  paths.m = json_to_vec(j.at("m"));
  for (const auto& v : j.at("n")) paths.n.push_back(json_to_vec(v));
  return paths;
}

void save_transforms(const std::string& path,
                     const std::vector<preprocess::TransformRecord>& transforms) {
  json arr = json::array();
  for (const auto& t : transforms) {
    json r;
    r["name"] = t.name;
    r["kind"] = preprocess::to_string(t.kind);
    r["mean"] = t.mean;
    r["scale"] = t.scale;
    arr.push_back(std::move(r));
  }
  json j;
  j["schema"] = "platdiff-transforms";
  j["transforms"] = std::move(arr);
  write_json(path, j, "save_transforms");
}

std::vector<preprocess::TransformRecord> load_transforms(const std::string& path) {
  const json j = load_json(path, "load_transforms");
  std::vector<preprocess::TransformRecord> out;
  for (const auto& r : j.at("transforms")) {
    preprocess::TransformRecord t;
    t.name = r.at("name").get<std::string>();
    t.kind = preprocess::transform_kind_from_string(r.at("kind").get<std::string>());
    t.mean = r.at("mean").get<double>();
    t.scale = r.at("scale").get<double>();
    out.push_back(std::move(t));
  }
  return out;
}

long parse_iso_date(const std::string& iso) {
  int y = 0, m = 0, d = 0;
  char dash1 = 0, dash2 = 0;
  std::istringstream in(iso);
  in >> y >> dash1 >> m >> dash2 >> d;
  if (!in || dash1 != '-' || dash2 != '-' || m < 1 || m > 12 || d < 1 || d > 31)
    throw Error("parse_iso_date: invalid date '" + iso + "'");
  // Days-from-civil (proleptic Gregorian).
  y -= m <= 2;
  const long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2u) / 5u + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long>(doe) - 719468;
}

namespace {

struct CsvFile {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::map<std::string, std::string> meta;  // from '# key=value' lines
};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

CsvFile read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("read_csv: cannot open " + path);
  CsvFile out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos) {
        std::string key = line.substr(1, eq - 1);
        key.erase(std::remove(key.begin(), key.end(), ' '), key.end());
        out.meta[key] = line.substr(eq + 1);
      }
      continue;
    }
    if (out.header.empty())
      out.header = split_csv_line(line);
    else
      out.rows.push_back(split_csv_line(line));
  }
  if (out.header.empty()) throw Error("read_csv: " + path + " has no header");
  return out;
}

int column_index(const CsvFile& csv, const std::string& name, const std::string& path) {
  const auto it = std::find(csv.header.begin(), csv.header.end(), name);
  if (it == csv.header.end())
    throw MissingColumn("read_csv: " + path + " lacks column '" + name + "'");
  return static_cast<int>(it - csv.header.begin());
}

double parse_cell(const std::string& cell) {
  if (cell.empty() || cell == "NA" || cell == "nan") return kMissing;
  return std::stod(cell);
}

}  // namespace

PlatformCsv read_platform_csv(const std::string& path) {
  const CsvFile csv = read_csv(path);
  const int c_date = column_index(csv, "date", path);
  const int c_users = column_index(csv, "users", path);
  const int c_chrome = column_index(csv, "chrome", path);
  const int c_ie = column_index(csv, "ie", path);
  const int c_amo = column_index(csv, "amo_contrib", path);
  const int c_queue = column_index(csv, "queue_len", path);
  const int c_addons = column_index(csv, "addons_cum", path);
  const int c_release = column_index(csv, "release", path);
  if (csv.rows.empty()) throw Error("read_platform_csv: " + path + " has no data rows");

  PlatformCsv out;
  out.start_day = parse_iso_date(csv.rows.front()[c_date]);
  out.raw.releases.id = "platform";
  long prev = out.start_day - 1;
  int day = 0;
  for (const auto& row : csv.rows) {
    const long serial = parse_iso_date(row[c_date]);
    if (serial != prev + 1)
      throw Error("read_platform_csv: dates must be consecutive days (" + row[c_date] +
                  ")");
    prev = serial;
    ++day;
    out.raw.users.push_back(parse_cell(row[c_users]));
    out.raw.chrome.push_back(parse_cell(row[c_chrome]));
    out.raw.ie.push_back(parse_cell(row[c_ie]));
    out.raw.amo_contrib.push_back(parse_cell(row[c_amo]));
    out.raw.queue_len.push_back(parse_cell(row[c_queue]));
    out.raw.addons_cum.push_back(parse_cell(row[c_addons]));
    if (parse_cell(row[c_release]) > 0.5) out.raw.releases.days.push_back(day);
  }
  return out;
}

preprocess::RawComplement read_complement_csv(const std::string& path, long start_day,
                                              int platform_days) {
  const CsvFile csv = read_csv(path);
  const auto id_it = csv.meta.find("id");
  const auto cat_it = csv.meta.find("category");
  if (id_it == csv.meta.end() || cat_it == csv.meta.end())
    throw MissingColumn("read_complement_csv: " + path +
                        " needs '# id=...' and '# category=...' metadata lines");
  const int c_date = column_index(csv, "date", path);
  const int c_dl = column_index(csv, "downloads", path);
  const int c_usage = column_index(csv, "usage", path);
  const int c_mean = column_index(csv, "rating_mean", path);
  const int c_var = column_index(csv, "rating_var", path);
  const int c_release = column_index(csv, "release", path);
  if (csv.rows.empty()) throw Error("read_complement_csv: " + path + " has no data rows");

  preprocess::RawComplement out;
  out.id = id_it->second;
  out.category = cat_it->second;
  out.releases.id = out.id;
  out.launch = static_cast<int>(parse_iso_date(csv.rows.front()[c_date]) - start_day) + 1;
  long prev = start_day + out.launch - 2;
  for (const auto& row : csv.rows) {
    const long serial = parse_iso_date(row[c_date]);
    if (serial != prev + 1)
      throw Error("read_complement_csv: dates must be consecutive days (" + row[c_date] +
                  ")");
    prev = serial;
    const int day = static_cast<int>(serial - start_day) + 1;
    if (day < 1 || day > platform_days)
      throw WindowViolation("read_complement_csv: " + path +
                            " has dates outside the platform window");
    out.downloads.push_back(parse_cell(row[c_dl]));
    out.usage.push_back(parse_cell(row[c_usage]));
    out.rating_mean.push_back(parse_cell(row[c_mean]));
    out.rating_var.push_back(parse_cell(row[c_var]));
    if (parse_cell(row[c_release]) > 0.5) out.releases.days.push_back(day);
  }
  return out;
}

void build_category_dummies(std::vector<preprocess::RawComplement>& complements) {
  std::set<std::string> cats;
  for (const auto& c : complements) cats.insert(c.category);
  std::vector<std::string> ordered(cats.begin(), cats.end());
  // Intercept plus indicators for all but the last category.
  const int K = 1 + std::max(static_cast<int>(ordered.size()) - 1, 0);
  for (auto& c : complements) {
    c.dummies = Eigen::VectorXd::Zero(K);
    c.dummies[0] = 1.0;
    for (size_t i = 0; i + 1 < ordered.size(); ++i)
      if (c.category == ordered[i]) c.dummies[static_cast<int>(i) + 1] = 1.0;
  }
}

std::string format_double(double v) {
  if (is_missing(v)) return "";
  std::ostringstream out;
  out.precision(12);
  out << v;
  return out.str();
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("write_csv: cannot write " + path);
  for (size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 < header.size() ? "," : "\n");
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw DimensionMismatch("write_csv: row width differs from header in " + path);
    for (size_t i = 0; i < row.size(); ++i)
      out << row[i] << (i + 1 < row.size() ? "," : "\n");
  }
}

}  // namespace platdiff::io
