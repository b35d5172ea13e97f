#include "platdiff/archive_io.hpp"

#include <fstream>

#include <json.hpp>

namespace platdiff::io {

using nlohmann::json;

namespace {

json vec_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd json_to_eigvec(const json& arr) {
  Eigen::VectorXd v(arr.size());
  for (size_t i = 0; i < arr.size(); ++i) v[static_cast<int>(i)] = arr[i].get<double>();
  return v;
}

json stdvec_to_json(const std::vector<double>& v) {
  json arr = json::array();
  for (double x : v) arr.push_back(x);
  return arr;
}

std::vector<double> json_to_stdvec(const json& arr) {
  std::vector<double> v;
  v.reserve(arr.size());
  for (const auto& x : arr) v.push_back(x.get<double>());
  return v;
}

json platform_to_json(const PlatformParams& p) {
  json j;
  j["p0"] = p.p0;
  j["beta"] = vec_to_json(p.beta);
  j["rho"] = vec_to_json(p.rho);
  j["q"] = p.q;
  j["M0"] = p.M0;
  j["kappa"] = p.kappa;
  j["V"] = p.obs_var;
  j["W"] = p.state_var;
  return j;
}

PlatformParams json_to_platform(const json& j) {
  PlatformParams p;
  p.p0 = j.at("p0").get<double>();
  p.beta = json_to_eigvec(j.at("beta"));
  p.rho = json_to_eigvec(j.at("rho"));
  p.q = j.at("q").get<double>();
  p.M0 = j.at("M0").get<double>();
  p.kappa = j.at("kappa").get<double>();
  p.obs_var = j.at("V").get<double>();
  p.state_var = j.at("W").get<double>();
  return p;
}

json complement_to_json(const ComplementParams& c) {
  json j;
  j["theta"] = vec_to_json(theta_vector(c));
  j["V"] = c.obs_var;
  j["W"] = c.state_var;
  if (c.p_int != 0.0 || c.q_int_rtv_ol != 0.0 || c.q_int_rtv_stavg != 0.0) {
    j["interactions"] = json::array({c.p_int, c.q_int_rtv_ol, c.q_int_rtv_stavg});
  }
  return j;
}

ComplementParams json_to_complement(const json& j) {
  ComplementParams c;
  apply_theta(c, json_to_eigvec(j.at("theta")));
  c.obs_var = j.at("V").get<double>();
  c.state_var = j.at("W").get<double>();
  if (j.contains("interactions")) {
    const auto& arr = j.at("interactions");
    c.p_int = arr[0].get<double>();
    c.q_int_rtv_ol = arr[1].get<double>();
    c.q_int_rtv_stavg = arr[2].get<double>();
  }
  return c;
}

}  // namespace

void save_archive(const std::string& path, const sampler::DrawArchive& archive) {
  std::ofstream out(path);
  if (!out) throw Error("save_archive: cannot write " + path);
  json meta;
  meta["schema"] = "platdiff-archive";
  meta["schema_version"] = 1;
  meta["seed"] = archive.seed;
  meta["config_hash"] = archive.config_hash;
  meta["variant"] = archive.variant_name;
  meta["iterations"] = archive.iterations;
  meta["burnin"] = archive.burnin;
  meta["thin"] = archive.thin;
  meta["ffbs_floored"] = archive.ffbs_floored;
  meta["acceptance"] = archive.acceptance;
  out << meta.dump() << "\n";

  for (const sampler::Draw& d : archive.draws) {
    json j;
    j["iter"] = d.iter;
    j["platform"] = platform_to_json(d.platform);
    json comps = json::array();
    for (const auto& c : d.complements) comps.push_back(complement_to_json(c));
    j["complements"] = std::move(comps);
    if (d.eta.size() > 0) {
      json eta = json::array();
      for (int r = 0; r < d.eta.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < d.eta.cols(); ++c) row.push_back(d.eta(r, c));
        eta.push_back(std::move(row));
      }
      j["eta"] = std::move(eta);
      j["sigma_eps"] = vec_to_json(d.sigma_eps);
    }
    j["loglik"] = d.loglik;
    if (d.paths) {
      json paths;
      paths["m"] = stdvec_to_json(d.paths->m);
      json n = json::array();
      for (const auto& v : d.paths->n) n.push_back(stdvec_to_json(v));
      paths["n"] = std::move(n);
      j["paths"] = std::move(paths);
    }
    out << j.dump() << "\n";
  }
}

sampler::DrawArchive load_archive(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingArchive("load_archive: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw MissingArchive("load_archive: empty file " + path);
  json meta = json::parse(line, nullptr, false);
  if (meta.is_discarded() || meta.value("schema", "") != "platdiff-archive")
    throw MissingArchive("load_archive: " + path + " is not a draw archive");

  sampler::DrawArchive archive;
  archive.seed = meta.at("seed").get<std::uint64_t>();
  archive.config_hash = meta.value("config_hash", "");
  archive.variant_name = meta.value("variant", "proposed");
  archive.iterations = meta.value("iterations", 0);
  archive.burnin = meta.value("burnin", 0);
  archive.thin = meta.value("thin", 1);
  archive.ffbs_floored = meta.value("ffbs_floored", 0L);
  if (meta.contains("acceptance"))
    archive.acceptance = meta.at("acceptance").get<std::map<std::string, double>>();

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    sampler::Draw d;
    d.iter = j.at("iter").get<int>();
    d.platform = json_to_platform(j.at("platform"));
    for (const auto& c : j.at("complements")) d.complements.push_back(json_to_complement(c));
    if (j.contains("eta")) {
      const auto& eta = j.at("eta");
      const int rows = static_cast<int>(eta.size());
      const int cols = rows > 0 ? static_cast<int>(eta[0].size()) : 0;
      d.eta.resize(rows, cols);
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) d.eta(r, c) = eta[r][c].get<double>();
      d.sigma_eps = json_to_eigvec(j.at("sigma_eps"));
    }
    d.loglik = j.at("loglik").get<double>();
    if (j.contains("paths")) {
      LatentPaths paths;
      paths.m = json_to_stdvec(j.at("paths").at("m"));
      for (const auto& v : j.at("paths").at("n")) paths.n.push_back(json_to_stdvec(v));
      d.paths = std::move(paths);
    }
    archive.draws.push_back(std::move(d));
  }
  return archive;
}

}  // namespace platdiff::io
