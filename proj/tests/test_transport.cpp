#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "dobgibbs/transport.hpp"

using namespace dobgibbs;

namespace {

constexpr double kRoot2OverPi = 0.7978845608028654;  // E|Z|, Z ~ N(0,1)

std::vector<double> random_pmf(std::mt19937& gen, int n) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> p(static_cast<size_t>(n));
  double sum = 0.0;
  for (double& v : p) sum += v = u(gen);
  for (double& v : p) v /= sum;
  return p;
}

}  // namespace

TEST_CASE("discrete-metric W1 is half total variation") {
  CHECK(w1_discrete_metric({0.5, 0.5}, {0.5, 0.5}) == 0.0);
  CHECK(w1_discrete_metric({1.0, 0.0}, {0.0, 1.0}) == doctest::Approx(1.0));
  CHECK(w1_discrete_metric({0.7, 0.3}, {0.4, 0.6}) == doctest::Approx(0.3));
  CHECK(w1_discrete_metric({0.2, 0.5, 0.3}, {0.4, 0.1, 0.5}) ==
        doctest::Approx(0.5 * (0.2 + 0.4 + 0.2)));
  CHECK_THROWS_AS((void)w1_discrete_metric({1.0}, {0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("line W1 closed forms") {
  // two-atom laws on {0,1}: integral of |F difference| over [0,1)
  Distribution1D p = Distribution1D::finite({0.7, 0.3}, {0.0, 1.0});
  Distribution1D q = Distribution1D::finite({0.4, 0.6}, {0.0, 1.0});
  CHECK(w1_real_line(p, q) == doctest::Approx(0.3).epsilon(1e-12));

  // equal-sd gaussians: |mean difference|
  Distribution1D g1 = Distribution1D::gaussian(0.5, 1.3);
  Distribution1D g2 = Distribution1D::gaussian(-1.0, 1.3);
  CHECK(w1_real_line(g1, g2) == doctest::Approx(1.5).epsilon(1e-12));

  // standard gaussian vs its mean: E|Z| = sqrt(2/pi)
  Distribution1D point = Distribution1D::finite({1.0}, {0.0});
  Distribution1D z = Distribution1D::gaussian(0.0, 1.0);
  CHECK(w1_real_line(z, point) == doctest::Approx(kRoot2OverPi).epsilon(1e-8));

  // same-mean gaussians, different sd: comonotone coupling gives
  // |sd difference| * E|Z|
  Distribution1D wide = Distribution1D::gaussian(0.0, 2.0);
  CHECK(w1_real_line(z, wide) == doctest::Approx(kRoot2OverPi).epsilon(1e-8));

  // symmetry and identity
  CHECK(w1_real_line(wide, z) == doctest::Approx(w1_real_line(z, wide)).epsilon(1e-12));
  CHECK(w1_real_line(z, z) == doctest::Approx(0.0));
}

TEST_CASE("w1_distance dispatches on the metric") {
  GroundMetric disc{MetricKind::kDiscrete};
  GroundMetric abs{MetricKind::kAbsoluteDifference};
  Distribution1D p = Distribution1D::finite({0.7, 0.3}, {0.0, 2.0});
  Distribution1D q = Distribution1D::finite({0.4, 0.6}, {0.0, 2.0});
  CHECK(w1_distance(p, q, disc) == doctest::Approx(0.3));
  CHECK(w1_distance(p, q, abs) == doctest::Approx(0.6));  // atoms 2 apart

  Distribution1D g = Distribution1D::gaussian(0.0, 1.0);
  CHECK_THROWS_AS((void)w1_distance(g, g, disc), AssumptionError);
  Distribution1D r = Distribution1D::finite({0.5, 0.5}, {0.0, 1.0});
  CHECK_THROWS_AS((void)w1_distance(p, r, disc), std::invalid_argument);
}

TEST_CASE("exact OT agrees with the CDF formula on the line") {
  std::mt19937 gen(12345);
  std::uniform_real_distribution<double> atom(-3.0, 3.0);
  std::uniform_int_distribution<int> sz(2, 9);
  for (int trial = 0; trial < 50; ++trial) {
    const int na = sz(gen), nb = sz(gen);
    std::vector<double> xa(static_cast<size_t>(na)), xb(static_cast<size_t>(nb));
    for (double& v : xa) v = atom(gen);
    for (double& v : xb) v = atom(gen);
    std::sort(xa.begin(), xa.end());
    std::sort(xb.begin(), xb.end());
    // nudge duplicates apart so the laws are valid (strictly increasing atoms)
    for (size_t i = 1; i < xa.size(); ++i) xa[i] = std::max(xa[i], xa[i - 1] + 1e-6);
    for (size_t i = 1; i < xb.size(); ++i) xb[i] = std::max(xb[i], xb[i - 1] + 1e-6);
    const std::vector<double> pa = random_pmf(gen, na);
    const std::vector<double> pb = random_pmf(gen, nb);

    TransportPlan plan = exact_ot_finite(
        [&](int i, int j) { return std::fabs(xa[static_cast<size_t>(i)] - xb[static_cast<size_t>(j)]); },
        na, nb, pa, pb);
    const double ref = w1_real_line(Distribution1D::finite(pa, xa),
                                    Distribution1D::finite(pb, xb));
    CHECK(plan.cost == doctest::Approx(ref).epsilon(1e-9));
    CHECK(plan.dual_gap <= 1e-9 * (1.0 + 6.0));
    CHECK(plan.max_dual_violation <= 1e-9);
    CHECK(plan.max_marginal_residual <= 1e-12);

    // complementary check: transported mass adds up and stays nonnegative
    double mass = 0.0;
    for (const auto& cell : plan.support) {
      CHECK(cell.mass > 0.0);
      mass += cell.mass;
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("exact OT with 0/1 cost reproduces the discrete-metric W1") {
  std::mt19937 gen(777);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + trial % 6;
    const std::vector<double> p = random_pmf(gen, n);
    const std::vector<double> q = random_pmf(gen, n);
    TransportPlan plan =
        exact_ot_finite([](int i, int j) { return i == j ? 0.0 : 1.0; }, n, n, p, q);
    CHECK(plan.cost == doctest::Approx(w1_discrete_metric(p, q)).epsilon(1e-12));
  }
}

TEST_CASE("full dual feasibility over massive pairs") {
  std::mt19937 gen(4242);
  const int n = 7;
  const std::vector<double> p = random_pmf(gen, n);
  const std::vector<double> q = random_pmf(gen, n);
  Eigen::MatrixXd cost(n, n);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cost(i, j) = u(gen);
  TransportPlan plan = exact_ot_finite(cost, p, q);
  REQUIRE(plan.dual_u.size() == static_cast<size_t>(n));
  REQUIRE(plan.dual_v.size() == static_cast<size_t>(n));
  double primal = 0.0;
  for (const auto& cell : plan.support)
    primal += cell.mass * cost(cell.src, cell.dst);
  CHECK(primal == doctest::Approx(plan.cost).epsilon(1e-12));
  double dual = 0.0;
  for (int i = 0; i < n; ++i) dual += plan.dual_u[static_cast<size_t>(i)] * p[static_cast<size_t>(i)];
  for (int j = 0; j < n; ++j) dual += plan.dual_v[static_cast<size_t>(j)] * q[static_cast<size_t>(j)];
  CHECK(std::fabs(plan.cost - dual) <= 1e-9 * (1.0 + 5.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      CHECK(plan.dual_u[static_cast<size_t>(i)] + plan.dual_v[static_cast<size_t>(j)] <=
            cost(i, j) + 1e-9);
}

TEST_CASE("kantorovich dual witness closes the gap on metric costs") {
  std::mt19937 gen(99);
  const int n = 6;
  std::vector<double> pos(static_cast<size_t>(n));
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (double& v : pos) v = u(gen);
  const auto cost = [&](int i, int j) {
    return std::fabs(pos[static_cast<size_t>(i)] - pos[static_cast<size_t>(j)]);
  };
  const std::vector<double> p = random_pmf(gen, n);
  const std::vector<double> q = random_pmf(gen, n);
  TransportPlan plan = exact_ot_finite(cost, n, n, p, q);
  const double gap = kantorovich_dual_check(plan, p, q, cost, n);
  CHECK(gap >= -1e-12);
  CHECK(gap <= 1e-9);
}

TEST_CASE("exact OT input validation") {
  const std::vector<double> p = {0.5, 0.5};
  const std::vector<double> q = {0.25, 0.75};
  const auto zero = [](int, int) { return 0.0; };
  CHECK_THROWS_AS((void)exact_ot_finite(zero, 2, 2, p, {0.3, 0.3}), std::invalid_argument);
  CHECK_THROWS_AS((void)exact_ot_finite(zero, 3, 2, p, q), std::invalid_argument);
  CHECK_THROWS_AS((void)exact_ot_finite([](int, int) { return -1.0; }, 2, 2, p, q),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)exact_ot_finite(zero, 2, 2, {-0.5, 1.5}, q), std::invalid_argument);
}

TEST_CASE("maximal coupling: equal laws never split") {
  Distribution1D law = Distribution1D::finite({0.3, 0.45, 0.25}, {0.0, 1.0, 2.0});
  GroundMetric disc{MetricKind::kDiscrete};
  SubStream s(mix64(2024));
  for (int k = 0; k < 2000; ++k) {
    const auto [x, y] = optimal_coupling_sample(law, law, disc, s);
    CHECK(x == y);
  }
}

TEST_CASE("maximal coupling: mismatch frequency matches the TV distance") {
  Distribution1D a = Distribution1D::finite({0.7, 0.2, 0.1}, {0.0, 1.0, 2.0});
  Distribution1D b = Distribution1D::finite({0.4, 0.35, 0.25}, {0.0, 1.0, 2.0});
  GroundMetric disc{MetricKind::kDiscrete};
  const double tv = w1_discrete_metric(a.probs, b.probs);

  const int n = 200000;
  SubStream s(mix64(555));
  int mismatch = 0;
  std::vector<int> count_a(3, 0), count_b(3, 0);
  for (int k = 0; k < n; ++k) {
    const auto [x, y] = optimal_coupling_sample(a, b, disc, s);
    mismatch += x != y ? 1 : 0;
    ++count_a[static_cast<size_t>(static_cast<int>(x))];
    ++count_b[static_cast<size_t>(static_cast<int>(y))];
  }
  const double phat = static_cast<double>(mismatch) / n;
  const double se = std::sqrt(tv * (1.0 - tv) / n);
  CHECK(std::fabs(phat - tv) <= 4.0 * se);

  // both marginals are preserved
  for (int sidx = 0; sidx < 3; ++sidx) {
    const double pa = static_cast<double>(count_a[static_cast<size_t>(sidx)]) / n;
    const double pb = static_cast<double>(count_b[static_cast<size_t>(sidx)]) / n;
    const double sea = std::sqrt(a.probs[static_cast<size_t>(sidx)] *
                                 (1 - a.probs[static_cast<size_t>(sidx)]) / n);
    const double seb = std::sqrt(b.probs[static_cast<size_t>(sidx)] *
                                 (1 - b.probs[static_cast<size_t>(sidx)]) / n);
    CHECK(std::fabs(pa - a.probs[static_cast<size_t>(sidx)]) <= 4.0 * sea);
    CHECK(std::fabs(pb - b.probs[static_cast<size_t>(sidx)]) <= 4.0 * seb);
  }
}

TEST_CASE("comonotone coupling on the line") {
  GroundMetric abs{MetricKind::kAbsoluteDifference};
  // equal-sd gaussians: the shared uniform makes the gap deterministic
  Distribution1D g1 = Distribution1D::gaussian(0.0, 0.8);
  Distribution1D g2 = Distribution1D::gaussian(1.25, 0.8);
  SubStream s(mix64(31));
  for (int k = 0; k < 100; ++k) {
    const auto [x, y] = optimal_coupling_sample(g1, g2, abs, s);
    CHECK(y - x == doctest::Approx(1.25).epsilon(1e-12));
  }

  // finite laws: E|X - Y| under the comonotone coupling equals W1
  Distribution1D p = Distribution1D::finite({0.6, 0.4}, {0.0, 1.0});
  Distribution1D q = Distribution1D::finite({0.2, 0.8}, {0.0, 1.0});
  const double w1 = w1_real_line(p, q);
  const int n = 100000;
  SubStream t(mix64(32));
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    const auto [x, y] = optimal_coupling_sample(p, q, abs, t);
    acc += std::fabs(x - y);
  }
  const double est = acc / n;
  CHECK(std::fabs(est - w1) <= 4.0 * std::sqrt(w1 * (1 - w1) / n));

  GroundMetric disc{MetricKind::kDiscrete};
  Distribution1D g = Distribution1D::gaussian(0.0, 1.0);
  SubStream u(mix64(33));
  CHECK_THROWS_AS((void)optimal_coupling_sample(g, g, disc, u), AssumptionError);
}
