#include <doctest.h>

#include <cmath>

#include "support.hpp"

using namespace ordcif;

namespace {

MultiGroupDataset band_data() {
  return MultiGroupDataset({gen_competing(120, 1.0, 1.0, 0.5, 101, "a"), gen_competing(140, 1.2, 0.8, 0.5, 102, "b")});
}

BandOptions base_options() {
  BandOptions o;
  o.replicates = 400;
  o.seed = 3;
  return o;
}

}  // namespace

TEST_CASE("transforms invert and differentiate") {
  for (const char* name : {"identity", "log", "cloglog", "logit"}) {
    const TransformSpec phi = parse_transform(name);
    CHECK(phi.name() == name);
    for (double p : {0.05, 0.3, 0.7}) {
      CHECK(phi.inverse(phi.phi(p)) == doctest::Approx(p).epsilon(1e-12));
      const double h = 1e-6;
      const double numeric = (phi.phi(p + h) - phi.phi(p - h)) / (2 * h);
      CHECK(phi.derivative(p) == doctest::Approx(numeric).epsilon(1e-5));
    }
  }
  CHECK_FALSE(parse_transform("log").in_domain(0.0));
  CHECK_FALSE(parse_transform("logit").in_domain(1.0));
  CHECK_THROWS_AS(parse_transform("sqrt"), ConfigError);
  CHECK_THROWS_AS(parse_weight("flat"), ConfigError);
  CHECK_THROWS_AS(parse_center("middle"), ConfigError);
}

TEST_CASE("identity band is the estimate plus or minus q over root n") {
  const auto data = band_data();
  const BandResult b = compute_band(data, 0, base_options());
  const double half = b.q_alpha / std::sqrt(120.0);
  const auto f = cif_censored(data.group(0), Cause::Primary);
  for (Eigen::Index m = 0; m < b.points.size(); ++m) {
    const double t = b.points[m];
    CHECK(b.estimate(t) == f(t));
    CHECK(b.lower(t) == doctest::Approx(std::max(0.0, f(t) - half)).epsilon(1e-14));
    CHECK(b.upper(t) == doctest::Approx(std::min(1.0, f(t) + half)).epsilon(1e-14));
  }
  CHECK(b.q_alpha > 0.0);
  CHECK(b.t1 == b.points[0]);
  CHECK(b.t2 == data.common_horizon());
}

TEST_CASE("log band lower limit stays positive") {
  const auto data = band_data();
  BandOptions o = base_options();
  o.transform = parse_transform("log");
  const BandResult b = compute_band(data, 1, o);
  const auto f = cif_censored(data.group(1), Cause::Primary);
  for (Eigen::Index m = 0; m < b.points.size(); ++m) {
    const double t = b.points[m];
    CHECK(b.lower(t) > 0.0);
    CHECK(b.lower(t) == doctest::Approx(f(t) * std::exp(-b.q_alpha / std::sqrt(140.0))).epsilon(1e-12));
  }
}

TEST_CASE("width on the transformed scale does not depend on the center") {
  const auto data = band_data();
  BandOptions o = base_options();
  o.transform = parse_transform("logit");
  o.weight = BandWeight::InverseSd;
  o.interval = std::make_pair(0.3, 1.0);
  const BandResult u = compute_band(data, 1, o);
  o.center = BandCenter::Restricted;
  const BandResult r = compute_band(data, 1, o);
  CHECK(u.q_alpha == r.q_alpha);
  const TransformSpec phi = parse_transform("logit");
  for (Eigen::Index m = 0; m < u.points.size(); ++m) {
    const double t = u.points[m];
    const double expected = 2 * u.q_alpha / (std::sqrt(140.0) * u.weights[m]);
    const bool u_clipped = u.lower(t) <= 0.0 || u.upper(t) >= 1.0;
    const bool r_clipped = r.lower(t) <= 0.0 || r.upper(t) >= 1.0;
    if (!u_clipped) CHECK(phi.phi(u.upper(t)) - phi.phi(u.lower(t)) == doctest::Approx(expected).epsilon(1e-9));
    if (!r_clipped) CHECK(phi.phi(r.upper(t)) - phi.phi(r.lower(t)) == doctest::Approx(expected).epsilon(1e-9));
    CHECK(r.lower(t) <= r.estimate(t));
    CHECK(r.estimate(t) <= r.upper(t));
  }
}

TEST_CASE("bands are ordered and clipped") {
  const auto data = band_data();
  for (const char* tr : {"identity", "cloglog"}) {
    BandOptions o = base_options();
    o.transform = parse_transform(tr);
    o.center = BandCenter::Restricted;
    const BandResult b = compute_band(data, 0, o);
    CHECK(b.center == BandCenter::Restricted);
    for (Eigen::Index m = 0; m < b.points.size(); ++m) {
      const double t = b.points[m];
      CHECK(0.0 <= b.lower(t));
      CHECK(b.lower(t) <= b.estimate(t));
      CHECK(b.estimate(t) <= b.upper(t));
      CHECK(b.upper(t) <= 1.0);
    }
  }
}

TEST_CASE("critical value grows with the interval") {
  const auto data = band_data();
  BandOptions o = base_options();
  o.interval = std::make_pair(0.4, 0.8);
  const double inner = compute_band(data, 0, o).q_alpha;
  o.interval = std::make_pair(0.2, 1.2);
  const double outer = compute_band(data, 0, o).q_alpha;
  CHECK(inner <= outer);
}

TEST_CASE("band errors") {
  const auto data = band_data();
  BandOptions o = base_options();
  o.interval = std::make_pair(0.1, data.group(0).max_time() + 1);
  CHECK_THROWS_AS(compute_band(data, 0, o), RangeError);
  o.interval = std::make_pair(1e-6, 1.0);
  o.transform = parse_transform("log");
  CHECK_THROWS_AS(compute_band(data, 0, o), DomainError);
  o = base_options();
  o.replicates = 50;
  CHECK_THROWS_AS(compute_band(data, 0, o), ConfigError);
  o = base_options();
  o.alpha = 1.5;
  CHECK_THROWS_AS(compute_band(data, 0, o), ConfigError);
}

TEST_CASE("bands do not depend on the worker count") {
  const auto data = band_data();
  BandOptions o = base_options();
  o.workers = 1;
  const BandResult a = compute_band(data, 1, o);
  o.workers = 5;
  const BandResult b = compute_band(data, 1, o);
  CHECK(a.q_alpha == b.q_alpha);
  CHECK((a.upper.values().array() == b.upper.values().array()).all());
}
