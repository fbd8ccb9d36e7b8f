#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <limits>
#include <string>

#include "dobgibbs/core.hpp"

using namespace dobgibbs;

TEST_CASE("ground metrics") {
  GroundMetric disc{MetricKind::kDiscrete};
  GroundMetric abs{MetricKind::kAbsoluteDifference};
  CHECK(disc(3.0, 3.0) == 0.0);
  CHECK(disc(3.0, 2.0) == 1.0);
  CHECK(abs(3.0, 2.0) == 1.0);
  CHECK(abs(-1.0, 1.0) == 2.0);
  CHECK(abs(1.0, -1.0) == 2.0);
}

TEST_CASE("l1 configuration distance") {
  GroundMetric disc{MetricKind::kDiscrete};
  auto x = Configuration::symbols({0, 1, 1});
  auto y = Configuration::symbols({1, 1, 0});
  CHECK(l1_distance(x, y, disc) == 2.0);
  CHECK(l1_distance(x, x, disc) == 0.0);

  GroundMetric abs{MetricKind::kAbsoluteDifference};
  auto u = Configuration::reals({0.5, -1.0});
  auto v = Configuration::reals({1.0, 1.5});
  CHECK(l1_distance(u, v, abs) == doctest::Approx(3.0));
}

TEST_CASE("mixed-radix config indexing, site 1 most significant") {
  auto x = Configuration::symbols({1, 0, 0});
  CHECK(config_index(x, 2) == 4);
  CHECK(config_index(Configuration::symbols({0, 0, 1}), 2) == 1);
  CHECK(config_index(Configuration::symbols({1, 2, 0}), 3) == 15);

  for (uint64_t idx = 0; idx < 27; ++idx) {
    const Configuration c = config_from_index(idx, 3, 3);
    CHECK(config_index(c, 3) == idx);
  }
}

TEST_CASE("state space size is capped with a config error") {
  CHECK(state_space_size(3, 2, 4096) == 8);
  CHECK(state_space_size(12, 2, 4096) == 4096);
  CHECK_THROWS_AS((void)state_space_size(13, 2, 4096), ConfigError);
  CHECK_THROWS_AS((void)state_space_size(40, 3, 1ull << 40), ConfigError);
}

TEST_CASE("declared lipschitz profiles are validated") {
  const LipschitzProfile p = lipschitz_profile_declared({0.5, 1.0, 0.0});
  CHECK(p.lip_norm == 1.0);
  CHECK(p.sum_deltas == doctest::Approx(1.5));
  CHECK_THROWS_AS((void)lipschitz_profile_declared({0.5, -1.0}), ConfigError);
  CHECK_THROWS_AS(
      (void)lipschitz_profile_declared({std::numeric_limits<double>::infinity()}),
      ConfigError);
}

TEST_CASE("brute-force lipschitz profile on symbol functions") {
  // f(x) = x_1 + 2 x_2 on {0,1}^2; discrete metric: deltas = (1, 2)
  auto f = [](const Configuration& x) { return x.values[0] + 2.0 * x.values[1]; };
  GroundMetric disc{MetricKind::kDiscrete};
  LipschitzProfile p =
      lipschitz_profile_bruteforce(f, 2, 2, {0.0, 1.0}, disc, 4096);
  CHECK(p.deltas[0] == doctest::Approx(1.0));
  CHECK(p.deltas[1] == doctest::Approx(2.0));

  // same f, spin embedding {-1, +1} with |.| metric: site flips move the
  // atoms by 2, so the slopes halve
  GroundMetric abs{MetricKind::kAbsoluteDifference};
  LipschitzProfile q =
      lipschitz_profile_bruteforce(f, 2, 2, {-1.0, 1.0}, abs, 4096);
  CHECK(q.deltas[0] == doctest::Approx(0.5));
  CHECK(q.deltas[1] == doctest::Approx(1.0));
  CHECK(q.lip_norm == doctest::Approx(1.0));

  // indicator of the top corner: every site flip can change f by 1
  auto ind = [](const Configuration& x) {
    return (x.values[0] == 1.0 && x.values[1] == 1.0 && x.values[2] == 1.0) ? 1.0 : 0.0;
  };
  LipschitzProfile r =
      lipschitz_profile_bruteforce(ind, 3, 2, {0.0, 1.0}, disc, 4096);
  for (double d : r.deltas) CHECK(d == doctest::Approx(1.0));
}

TEST_CASE("error types carry their keys") {
  try {
    throw ConfigError("bad value", "beta");
  } catch (const ConfigError& e) {
    CHECK(e.key == "beta");
    CHECK(std::string(e.what()) == "bad value");
  }
  CHECK_THROWS_AS(throw AssumptionError("r >= 1"), AssumptionError);
}
