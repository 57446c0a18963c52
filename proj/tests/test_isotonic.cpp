#include <doctest.h>

#include <random>

#include "support.hpp"

using namespace ordcif;

TEST_CASE("worked isotonic examples, both algorithms") {
  struct Case {
    Eigen::VectorXd x, w, expected;
  };
  const std::vector<Case> cases{
      {test::vec({0.1, 0.2, 0.3}), test::vec({5, 1, 2}), test::vec({0.1, 0.2, 0.3})},
      {test::vec({0.6, 0.2}), test::vec({1, 3}), test::vec({0.3, 0.3})},
      {test::vec({0.1, 0.2, 0.15, 0.3}), test::vec({1, 1, 1, 1}), test::vec({0.1, 0.175, 0.175, 0.3})},
      {test::vec({0.4}), test::vec({2}), test::vec({0.4})},
  };
  for (const auto& c : cases) {
    const Eigen::VectorXd pava = isoreg_weighted(c.x, c.w);
    const Eigen::VectorXd maxmin = isoreg_maxmin(c.x, c.w);
    CHECK((pava - c.expected).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((maxmin - c.expected).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("invalid problems are refused") {
  CHECK_THROWS_AS(isoreg_weighted(test::vec({1, 2}), test::vec({1})), PreconditionError);
  CHECK_THROWS_AS(isoreg_weighted(test::vec({1, 2}), test::vec({1, 0})), PreconditionError);
  CHECK_THROWS_AS(isoreg_maxmin(test::vec({1, 2}), test::vec({1, -1})), PreconditionError);
}

TEST_CASE("isotonic properties on random problems") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> kd(1, 8);
  std::uniform_real_distribution<double> xd(-1.0, 1.0), wd(0.1, 10.0);
  for (int rep = 0; rep < 1000; ++rep) {
    const int k = kd(rng);
    Eigen::VectorXd x(k), w(k), theta(k);
    for (int i = 0; i < k; ++i) {
      x[i] = xd(rng);
      w[i] = wd(rng);
      theta[i] = xd(rng);
    }
    std::sort(theta.data(), theta.data() + k);
    const Eigen::VectorXd y = isoreg_weighted(x, w);
    // Oracle agreement.
    REQUIRE((y - isoreg_maxmin(x, w)).cwiseAbs().maxCoeff() <= 1e-12);
    // Monotone output.
    for (int i = 1; i < k; ++i) REQUIRE(y[i - 1] <= y[i]);
    // Idempotence.
    REQUIRE((isoreg_weighted(y, w) - y).cwiseAbs().maxCoeff() == 0.0);
    // Weighted total preserved.
    REQUIRE(w.dot(y) == doctest::Approx(w.dot(x)).epsilon(1e-12));
    // Sup-norm distance to any isotonic vector does not grow.
    REQUIRE((y - theta).cwiseAbs().maxCoeff() <= (x - theta).cwiseAbs().maxCoeff() + 1e-15);
  }
}

TEST_CASE("long double instantiation") {
  Eigen::Matrix<long double, Eigen::Dynamic, 1> x(3), w(3);
  x << 0.3L, 0.1L, 0.2L;
  w << 1.0L, 1.0L, 1.0L;
  const auto y = isoreg_weighted(x, w);
  CHECK(static_cast<double>(y[0]) == doctest::Approx(0.2));
  CHECK(static_cast<double>(y[2]) == doctest::Approx(0.2));
}

TEST_CASE("restricting already ordered estimates is a no-op") {
  const MultiGroupDataset data({test::group("a", {{1, 1}, {3, 2}, {4, 0}, {5, 1}}),
                                test::group("b", {{1, 1}, {2, 1}, {3, 1}, {4, 2}})});
  std::vector<CifEstimate> est{estimate_cif(data.group(0), Cause::Primary),
                               estimate_cif(data.group(1), Cause::Primary)};
  const auto r = restrict_cifs(est, data.sizes(), pooled_event_grid(data));
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK((r.estimates[i].f_hat.knots().array() == est[i].f_hat.knots().array()).all());
    CHECK((r.estimates[i].f_hat.values().array() == est[i].f_hat.values().array()).all());
  }
}

TEST_CASE("a violating pair with equal sizes is averaged") {
  const MultiGroupDataset data({test::group("a", {{1, 1}, {2, 1}, {3, 2}, {4, 2}}),
                                test::group("b", {{1, 2}, {2, 2}, {3, 1}, {4, 1}})});
  std::vector<CifEstimate> est{empirical_cif(data.group(0), Cause::Primary),
                               empirical_cif(data.group(1), Cause::Primary)};
  const auto r = restrict_cifs(est, data.sizes(), pooled_event_grid(data));
  for (double t : {1.0, 2.0, 2.5}) {
    const double avg = 0.5 * (est[0](t) + est[1](t));
    CHECK(r.estimates[0](t) == doctest::Approx(avg));
    CHECK(r.estimates[1](t) == doctest::Approx(avg));
  }
  CHECK(r.estimates[0](4.0) == doctest::Approx(0.5));
}

TEST_CASE("restricted estimates are ordered across groups and monotone in time") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    std::vector<GroupSample> groups;
    for (int i = 0; i < 3; ++i)
      groups.push_back(gen_competing(30 + 10 * i, 1.0, 1.0, 0.5, sub_seed(seed, 1, i), "g" + std::to_string(i)));
    const MultiGroupDataset data(groups);
    std::vector<CifEstimate> est;
    for (const auto& g : data.groups()) est.push_back(cif_censored(g, Cause::Primary));
    const Eigen::VectorXd grid = pooled_event_grid(data);
    const auto r = restrict_cifs(est, data.sizes(), grid);
    for (Eigen::Index m = 0; m < grid.size(); ++m) {
      for (std::size_t i = 1; i < 3; ++i) REQUIRE(r.estimates[i - 1](grid[m]) <= r.estimates[i](grid[m]));
      for (std::size_t i = 0; i < 3; ++i) {
        const double v = r.estimates[i](grid[m]);
        REQUIRE(v >= 0.0);
        REQUIRE(v <= 1.0);
        if (m > 0) REQUIRE(r.estimates[i](grid[m - 1]) <= v);
      }
    }
  }
}

TEST_CASE("knots off the grid are refused") {
  const auto g = test::group("a", {{1, 1}, {2, 1}});
  std::vector<CifEstimate> est{empirical_cif(g, Cause::Primary), empirical_cif(g, Cause::Primary)};
  CHECK_THROWS_AS(restrict_cifs(est, test::vec({2, 2}), test::vec({1.0, 3.0})), PreconditionError);
}
