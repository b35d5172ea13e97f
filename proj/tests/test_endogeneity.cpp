#include <cmath>
#include <random>

#include "doctest.h"
#include "platdiff/endogeneity.hpp"

using namespace platdiff;
using namespace platdiff::endogeneity;

namespace {

struct SynthResult {
  LIVSlice slice;
  std::vector<double> mu;  // latent level, index 0 = mu_0
};

// Data drawn from the latent-instrumental-variable generative model: the
// suspect covariate is a noisy proxy of an AR(1) level that also drives the
// diffusion drift, and the two noises share the injected correlation.
SynthResult make_slice(int T, double corr, const LIVConfig& cfg, std::uint64_t seed,
                       double g1 = 0.15, double g2 = 0.7, double psi = 0.04,
                       double sd_w = 0.1, double sd_g = 0.2, double obs_sd = 0.02) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> stdn(0.0, 1.0);
  SynthResult out;
  out.mu.resize(T + 1);
  out.mu[0] = g1 / (1.0 - g2);
  out.slice.y.resize(T);
  out.slice.z1.resize(T);

  double m = 0.02 * cfg.M0;
  for (int t = 1; t <= T; ++t) {
    out.mu[t] = g1 + g2 * out.mu[t - 1] + std::sqrt(psi) * stdn(rng);
    const double zw = stdn(rng);
    const double zg = stdn(rng);
    const double w = sd_w * zw;
    const double g = sd_g * (corr * zw + std::sqrt(1.0 - corr * corr) * zg);
    const double p = cfg.p0 + cfg.p1 * out.mu[t];
    m = m + (p + cfg.q * m / cfg.M0) * (cfg.M0 - m) + w;
    m = std::max(m, 0.0);
    out.slice.z1[t - 1] = out.mu[t] + g;
    out.slice.y[t - 1] = m + obs_sd * stdn(rng);
  }
  return out;
}

LIVConfig base_config() {
  LIVConfig cfg;
  cfg.p0 = 0.001;
  cfg.p1 = 0.004;
  cfg.q = 0.0;
  cfg.M0 = 200.0;
  cfg.kappa = 0.0;
  cfg.iterations = 600;
  cfg.burnin = 200;
  cfg.thin = 2;
  cfg.seed = 5;
  return cfg;
}

}  // namespace

TEST_CASE("config validation") {
  LIVConfig cfg = base_config();
  CHECK_NOTHROW(cfg.validate());
  cfg.model = 3;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.model = 1;
  cfg.M0 = 0.0;
  CHECK_THROWS_AS(cfg.validate(), NonPositivePotential);
  cfg.M0 = 1.0;
  cfg.psi_ig_shape = 1.0;
  CHECK_THROWS_AS(cfg.validate(), PriorMisconfiguration);
  cfg.psi_ig_shape = 3.0;
  cfg.burnin = 600;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("zero-correlation data yields an interval covering zero") {
  LIVConfig cfg = base_config();
  const auto synth = make_slice(1000, 0.0, cfg, 11);
  const auto r = liv_fit(synth.slice, cfg);

  CHECK(r.corr.mean >= -1.0);
  CHECK(r.corr.mean <= 1.0);
  CHECK(r.corr.q025 <= r.corr.mean);
  CHECK(r.corr.mean <= r.corr.q975);
  CHECK(r.corr.q025 < 0.0);
  CHECK(r.corr.q975 > 0.0);
  CHECK(!r.corr.significant);
  CHECK(r.corr.sd > 0.0);
  CHECK(!r.uninformative);

  // The posterior latent path tracks the true level.
  REQUIRE(r.latent_mean.size() == synth.mu.size());
  double num = 0.0, da = 0.0, db = 0.0, ma = 0.0, mb = 0.0;
  const size_t n = synth.mu.size();
  for (size_t t = 0; t < n; ++t) {
    ma += r.latent_mean[t];
    mb += synth.mu[t];
  }
  ma /= n;
  mb /= n;
  for (size_t t = 0; t < n; ++t) {
    num += (r.latent_mean[t] - ma) * (synth.mu[t] - mb);
    da += (r.latent_mean[t] - ma) * (r.latent_mean[t] - ma);
    db += (synth.mu[t] - mb) * (synth.mu[t] - mb);
  }
  CHECK(num / std::sqrt(da * db) > 0.5);
}

TEST_CASE("strong injected correlation is detected") {
  LIVConfig cfg = base_config();
  cfg.seed = 21;
  const auto synth = make_slice(1000, 0.8, cfg, 13);
  const auto r = liv_fit(synth.slice, cfg);
  CHECK(r.corr.mean > 0.4);
  CHECK(r.corr.significant);
  CHECK(r.sigma21.mean > 0.0);
}

TEST_CASE("the fit is deterministic in the seed") {
  LIVConfig cfg = base_config();
  cfg.iterations = 200;
  cfg.burnin = 100;
  const auto synth = make_slice(150, 0.0, cfg, 17);
  const auto a = liv_fit(synth.slice, cfg);
  const auto b = liv_fit(synth.slice, cfg);
  CHECK(a.corr.mean == b.corr.mean);
  CHECK(a.corr.q025 == b.corr.q025);
  CHECK(a.sigma21.mean == b.sigma21.mean);
  cfg.seed += 1;
  const auto c = liv_fit(synth.slice, cfg);
  CHECK(a.corr.mean != c.corr.mean);
}

TEST_CASE("an all-zero proxy is flagged uninformative") {
  LIVConfig cfg = base_config();
  cfg.iterations = 100;
  cfg.burnin = 40;
  auto synth = make_slice(100, 0.0, cfg, 19);
  std::fill(synth.slice.z1.begin(), synth.slice.z1.end(), 0.0);
  const auto r = liv_fit(synth.slice, cfg);
  CHECK(r.uninformative);
}

TEST_CASE("instrument-augmented model accepts the second covariate") {
  LIVConfig cfg = base_config();
  cfg.model = 2;
  cfg.iterations = 300;
  cfg.burnin = 100;
  auto synth = make_slice(200, 0.0, cfg, 23);
  synth.slice.z2.resize(200);
  std::mt19937_64 rng(29);
  std::normal_distribution<double> stdn(0.0, 1.0);
  double z = 0.0;
  for (double& v : synth.slice.z2) {
    z = 0.8 * z + 0.1 * stdn(rng);
    v = z;
  }
  const auto r = liv_fit(synth.slice, cfg);
  CHECK(std::abs(r.corr.mean) <= 1.0);
  CHECK(std::isfinite(r.sigma21.mean));

  // Model 2 requires the instrument series.
  synth.slice.z2.clear();
  CHECK_THROWS_AS(liv_fit(synth.slice, cfg), DimensionMismatch);
}

TEST_CASE("input validation for the AMO slice") {
  LIVConfig cfg = base_config();
  LIVSlice s;
  s.y = {1.0, 2.0};
  s.z1 = {1.0, 2.0};
  CHECK_THROWS_AS(liv_fit(s, cfg), Error);  // too short
  s.y = {1.0, 2.0, 3.0, 4.0};
  s.z1 = {1.0, 2.0};
  CHECK_THROWS_AS(liv_fit(s, cfg), DimensionMismatch);
}

namespace {

LIVReleaseSlice make_release_slice(int len, std::uint64_t seed, bool zero_pv = false) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> stdn(0.0, 1.0);
  LIVReleaseSlice s;
  s.id = "rel";
  s.m.assign(len, 50.0);
  s.params.alpha = 0.5;
  s.params.delta = 0.01;
  s.params.p0 = 0.001;
  s.params.p1 = 0.012;
  s.params.p2 = 0.010;
  s.params.q0 = 0.002;
  s.params.obs_var = 0.01;
  s.params.state_var = 0.01;

  // Persistent AR(0.9) latent levels and a 20:1 latent-to-proxy-noise variance
  // ratio keep the signal/noise variance split well identified, so the
  // posterior correlation is calibrated rather than skewed.
  double mu_pv = 0.5, mu_av = 0.5, n = 0.5;
  s.y.resize(len);
  s.pv.resize(len);
  s.av.resize(len);
  for (int k = 0; k < len; ++k) {
    mu_pv = 0.05 + 0.9 * mu_pv + 0.1 * stdn(rng);
    mu_av = 0.05 + 0.9 * mu_av + 0.1 * stdn(rng);
    const double pot = s.params.alpha * s.m[k];
    const double p = s.params.p0 + s.params.p1 * mu_pv + s.params.p2 * mu_av;
    const double drift =
        (p + s.params.q0 * (1.0 - s.params.delta) * n / pot) * (pot - n) -
        s.params.delta * n;
    n = std::max(n + drift + 0.05 * stdn(rng), 0.0);
    s.y[k] = n + 0.05 * stdn(rng);
    s.pv[k] = zero_pv ? 0.0 : mu_pv + 0.05 * stdn(rng);
    s.av[k] = mu_av + 0.05 * stdn(rng);
  }
  return s;
}

}  // namespace

TEST_CASE("independent release proxies produce intervals covering zero") {
  LIVConfig cfg = base_config();
  cfg.iterations = 400;
  cfg.burnin = 150;
  cfg.seed = 701;
  const auto s = make_release_slice(400, 301);
  const auto r = liv_fit_releases(s, cfg);
  CHECK(!r.uninformative);
  CHECK(r.corr_pv.q025 <= 0.0);
  CHECK(r.corr_pv.q975 >= 0.0);
  CHECK(r.corr_av.q025 <= 0.0);
  CHECK(r.corr_av.q975 >= 0.0);
  CHECK(std::abs(r.corr_pv.mean) <= 1.0);
  CHECK(std::abs(r.corr_av.mean) <= 1.0);
}

TEST_CASE("a silent release proxy flips the uninformative flag") {
  LIVConfig cfg = base_config();
  cfg.iterations = 100;
  cfg.burnin = 40;
  const auto s = make_release_slice(120, 37, /*zero_pv=*/true);
  const auto r = liv_fit_releases(s, cfg);
  CHECK(r.uninformative);
}

TEST_CASE("release slice validation") {
  LIVConfig cfg = base_config();
  LIVReleaseSlice s = make_release_slice(50, 41);
  s.pv.pop_back();
  CHECK_THROWS_AS(liv_fit_releases(s, cfg), DimensionMismatch);
  s = make_release_slice(50, 41);
  s.m.pop_back();
  CHECK_THROWS_AS(liv_fit_releases(s, cfg), DimensionMismatch);
}
