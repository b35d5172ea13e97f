#include <cmath>
#include <numeric>

#include "doctest.h"
#include "platdiff/preprocess.hpp"

using namespace platdiff;
using namespace platdiff::preprocess;

TEST_CASE("release smoothing: geometric decay from the most recent release") {
  ReleaseLog log{"p", {3}};
  const auto s = smooth_releases(log, 0.89, 1, 6);
  CHECK(s[0] == doctest::Approx(0.0));       // day 1, before any release
  CHECK(s[1] == doctest::Approx(0.0));
  CHECK(s[2] == doctest::Approx(1.0));       // release day
  CHECK(s[3] == doctest::Approx(0.89));
  CHECK(s[4] == doctest::Approx(0.7921).epsilon(1e-15));  // lag 2, exactly 0.89^2
  CHECK(s[4] == std::pow(0.89, 2));
}

TEST_CASE("release smoothing: most recent release wins") {
  ReleaseLog log{"p", {5, 10}};
  const auto s = smooth_releases(log, 0.5, 1, 12);
  CHECK(s[11] == doctest::Approx(0.25));  // day 12 uses the day-10 release
  CHECK(s[8] == doctest::Approx(std::pow(0.5, 4)));  // day 9 still uses day 5
  CHECK(s[9] == doctest::Approx(1.0));
}

TEST_CASE("release smoothing input validation") {
  ReleaseLog log{"p", {5}};
  CHECK_THROWS_AS(smooth_releases(log, 1.0, 1, 10), Error);
  CHECK_THROWS_AS(smooth_releases(log, 0.5, 3, 2), WindowViolation);
  ReleaseLog out_of_window{"p", {20}};
  CHECK_THROWS_AS(smooth_releases(out_of_window, 0.5, 1, 10), WindowViolation);
  ReleaseLog unsorted{"p", {5, 5}};
  CHECK_THROWS_AS(smooth_releases(unsorted, 0.5, 1, 10), Error);
}

TEST_CASE("observational learning: within-category usage shares") {
  CategoryMap cats{{"a", "tools"}, {"b", "tools"}, {"c", "fun"}};
  const auto shares = observational_learning({"a", "b"}, {3.0, 1.0}, cats, 7);
  CHECK(shares[0] == doctest::Approx(0.75));
  CHECK(shares[1] == doctest::Approx(0.25));
  CHECK(shares[0] + shares[1] == doctest::Approx(1.0));

  // Zero category usage -> zero shares plus one warning per category/day.
  std::vector<OlWarning> warnings;
  const auto zero = observational_learning({"a", "b"}, {0.0, 0.0}, cats, 9, &warnings);
  CHECK(zero[0] == 0.0);
  CHECK(zero[1] == 0.0);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].day == 9);
  CHECK(warnings[0].category == "tools");

  CHECK_THROWS_AS(observational_learning({"zz"}, {1.0}, cats, 1), MissingColumn);
  CHECK_THROWS_AS(observational_learning({"a"}, {1.0, 2.0}, cats, 1), DimensionMismatch);
}

TEST_CASE("observational learning shares sum to one per category with mixed usage") {
  CategoryMap cats{{"a", "t"}, {"b", "t"}, {"c", "t"}, {"d", "u"}};
  const auto shares =
      observational_learning({"a", "b", "c", "d"}, {2.0, 5.0, 3.0, 7.0}, cats, 1);
  CHECK(shares[0] + shares[1] + shares[2] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(shares[3] == doctest::Approx(1.0));
}

TEST_CASE("standardize: demean then rescale by max absolute value") {
  const std::vector<double> v{2.0, 4.0, 6.0};
  auto [out, rec] = standardize(v, TransformKind::DemeanRescale, "v");
  CHECK(out[0] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(out[1] == doctest::Approx(0.0));
  CHECK(out[2] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rec.mean == doctest::Approx(4.0));
  CHECK(rec.scale == doctest::Approx(2.0));
}

TEST_CASE("standardize round-trips through the transform record") {
  const std::vector<double> v{1.5, -2.25, 17.0, 0.003, 9.1};
  for (auto kind : {TransformKind::None, TransformKind::Demean, TransformKind::Rescale,
                    TransformKind::DemeanRescale}) {
    auto [out, rec] = standardize(v, kind, "v");
    for (size_t i = 0; i < v.size(); ++i)
      CHECK(std::abs(rec.invert(out[i]) - v[i]) < 1e-12);
  }
}

TEST_CASE("standardize rejects degenerate inputs") {
  CHECK_THROWS_AS(standardize(std::vector<double>{}, TransformKind::Demean),
                  DegenerateSeries);
  const std::vector<double> constant{3.0, 3.0, 3.0};
  CHECK_THROWS_AS(standardize(constant, TransformKind::DemeanRescale), DegenerateSeries);
  // An explicit scale override makes the constant series legal.
  auto [out, rec] = standardize(constant, TransformKind::DemeanRescale, "c", 2.0);
  CHECK(out[0] == doctest::Approx(0.0));
  CHECK(rec.scale == doctest::Approx(2.0));
}

TEST_CASE("transform kind names round-trip") {
  for (auto kind : {TransformKind::None, TransformKind::Demean, TransformKind::Rescale,
                    TransformKind::DemeanRescale})
    CHECK(transform_kind_from_string(to_string(kind)) == kind);
  CHECK_THROWS_AS(transform_kind_from_string("bogus"), Error);
}

namespace {

RawPlatform tiny_platform(int T) {
  RawPlatform p;
  for (int t = 1; t <= T; ++t) {
    p.users.push_back(100.0 + 3.0 * t);
    p.chrome.push_back(50.0 + t);
    p.ie.push_back(80.0 - t);
    p.amo_contrib.push_back(10.0 + (t % 3));
    p.queue_len.push_back(5.0 + (t % 4));
    p.addons_cum.push_back(20.0 + 2.0 * t);
  }
  p.releases = {"platform", {2, 6}};
  return p;
}

RawComplement tiny_complement(const std::string& id, const std::string& cat, int launch,
                              int len) {
  RawComplement c;
  c.id = id;
  c.category = cat;
  c.launch = launch;
  for (int k = 0; k < len; ++k) {
    c.downloads.push_back(10.0 * (k + 1));
    c.usage.push_back(4.0 + k);
    c.rating_mean.push_back(3.5 + 0.1 * (k % 3));
    c.rating_var.push_back(0.4 + 0.05 * (k % 2));
  }
  c.releases = {id, {launch + 1}};
  c.dummies = Eigen::VectorXd::Ones(1);
  return c;
}

}  // namespace

TEST_CASE("assemble_panel builds a validated panel with transform records") {
  const auto raw_p = tiny_platform(10);
  std::vector<RawComplement> cs{tiny_complement("a", "tools", 2, 6),
                                tiny_complement("b", "tools", 4, 5)};
  const auto assembled = assemble_panel(raw_p, cs);
  const ObservationPanel& panel = assembled.panel;

  CHECK(panel.T == 10);
  CHECK(panel.y_platform.size() == 10);
  CHECK(panel.x_dim() == 2);
  CHECK(panel.z_dim() == 2);
  REQUIRE(panel.complements.size() == 2);
  CHECK(panel.complements[0].launch == 2);
  CHECK(panel.complements[0].end == 7);
  CHECK(panel.complements[1].launch == 4);
  CHECK(panel.complements[1].end == 8);

  // Demeaned covariates average to ~0 over their windows.
  const auto& s = panel.complements[0];
  const double mean_pv = std::accumulate(s.pv.begin(), s.pv.end(), 0.0) / s.pv.size();
  CHECK(std::abs(mean_pv) < 1e-12);

  // Each standardized series has a recoverable transform record.
  bool found = false;
  for (const auto& rec : assembled.transforms)
    if (rec.name == "platform.users") {
      found = true;
      CHECK(std::abs(rec.invert(panel.y_platform[0]) - raw_p.users[0]) < 1e-9);
    }
  CHECK(found);
}

TEST_CASE("assemble_panel rejects malformed inputs") {
  auto raw_p = tiny_platform(10);
  std::vector<RawComplement> cs{tiny_complement("a", "tools", 2, 6)};

  SUBCASE("complement window outside the platform window") {
    cs[0].launch = 7;  // 7 + 6 - 1 = 12 > 10
    CHECK_THROWS_AS(assemble_panel(raw_p, cs), WindowViolation);
  }
  SUBCASE("non-monotone cumulative downloads") {
    cs[0].downloads[3] = 0.0;
    CHECK_THROWS_AS(assemble_panel(raw_p, cs), NonMonotoneCumulative);
  }
  SUBCASE("non-monotone cumulative add-on count") {
    raw_p.addons_cum[5] = 0.0;
    CHECK_THROWS_AS(assemble_panel(raw_p, cs), NonMonotoneCumulative);
  }
  SUBCASE("ragged platform columns") {
    raw_p.chrome.pop_back();
    CHECK_THROWS_AS(assemble_panel(raw_p, cs), MissingColumn);
  }
  SUBCASE("missing category") {
    cs[0].category.clear();
    CHECK_THROWS_AS(assemble_panel(raw_p, cs), MissingColumn);
  }
}
