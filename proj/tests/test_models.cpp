#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "dobgibbs/models.hpp"

using namespace dobgibbs;

namespace {

ConditionalModel ising_pair(double beta) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2, 2);
  j(0, 1) = j(1, 0) = 1.0;
  return ConditionalModel::ising(j, Eigen::VectorXd::Zero(2), beta);
}

ConditionalModel ising_path3(double beta) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(3, 3);
  j(0, 1) = j(1, 0) = 1.0;
  j(1, 2) = j(2, 1) = 1.0;
  return ConditionalModel::ising(j, Eigen::VectorXd::Zero(3), beta);
}

}  // namespace

TEST_CASE("Distribution1D validation and quantiles") {
  CHECK_THROWS_AS((void)Distribution1D::finite({0.5, 0.6}, {0.0, 1.0}),
                  ConfigError);
  CHECK_THROWS_AS((void)Distribution1D::finite({0.5, -0.1, 0.6}, {0.0, 1.0, 2.0}),
                  ConfigError);
  CHECK_THROWS_AS((void)Distribution1D::finite({0.5, 0.5}, {0.0}),
                  ConfigError);
  CHECK_THROWS_AS((void)Distribution1D::gaussian(0.0, 0.0), ConfigError);
  CHECK_THROWS_AS((void)Distribution1D::gaussian(0.0, -1.0), ConfigError);

  // right-continuous inverse CDF over atoms in symbol order
  Distribution1D p = Distribution1D::finite({0.2, 0.5, 0.3}, {-1.0, 0.0, 2.0});
  CHECK(p.quantile_index(0.1) == 0);
  CHECK(p.quantile_index(0.1999999) == 0);
  CHECK(p.quantile_index(0.2000001) == 1);
  CHECK(p.quantile_index(0.69) == 1);
  CHECK(p.quantile_index(0.71) == 2);
  CHECK(p.quantile_index(0.9999999) == 2);
  CHECK(p.quantile(0.1) == -1.0);
  CHECK(p.quantile(0.71) == 2.0);
  CHECK(p.mean_value() == doctest::Approx(0.2 * -1.0 + 0.3 * 2.0));

  Distribution1D g = Distribution1D::gaussian(1.5, 2.0);
  CHECK(g.quantile(0.5) == doctest::Approx(1.5));
  // Phi^{-1}(0.975) = 1.959963984540054
  CHECK(g.quantile(0.975) == doctest::Approx(1.5 + 2.0 * 1.959963984540054));
  CHECK(g.mean_value() == 1.5);
}

TEST_CASE("ising conditional is sigmoid of the local field") {
  const double beta = 0.3;
  ConditionalModel m = ising_pair(beta);
  CHECK(m.n_sites == 2);
  CHECK(m.finite_sites());
  CHECK(m.local_alphabet() == 2);
  CHECK(m.atom_values() == std::vector<double>{-1.0, 1.0});

  // neighbor at +1 (symbol 1): local field L = 1, P(s=+1) = sigma(2 beta L)
  Configuration x = Configuration::symbols({0, 1});
  Distribution1D c = conditional_distribution(m, 0, x);
  REQUIRE(c.kind == DistKind::kFinitePmf);
  const double p_plus = 1.0 / (1.0 + std::exp(-2.0 * beta));
  // sigma(0.6) = 0.6456563062257954
  CHECK(p_plus == doctest::Approx(0.6456563062257954).epsilon(1e-12));
  CHECK(c.probs[1] == doctest::Approx(p_plus).epsilon(1e-12));
  CHECK(c.probs[0] == doctest::Approx(1.0 - p_plus).epsilon(1e-12));

  // flipping the neighbor mirrors the pmf
  Configuration y = Configuration::symbols({0, 0});
  Distribution1D c2 = conditional_distribution(m, 0, y);
  CHECK(c2.probs[1] == doctest::Approx(1.0 - p_plus).epsilon(1e-12));

  // the conditional never reads the site's own coordinate
  Configuration z = Configuration::symbols({1, 1});
  Distribution1D c3 = conditional_distribution(m, 0, z);
  CHECK(c3.probs[1] == doctest::Approx(c.probs[1]).epsilon(1e-15));
}

TEST_CASE("exact gibbs measure of the 2-site ising pair") {
  const double beta = 0.3;
  ConditionalModel m = ising_pair(beta);
  std::vector<double> mu = exact_gibbs_measure(m);
  REQUIRE(mu.size() == 4);
  // Z = 2 e^{beta} + 2 e^{-beta} = 4 cosh(beta); aligned pairs get e^{beta}/Z.
  const double z = 4.0 * std::cosh(beta);
  const double aligned = std::exp(beta) / z;
  const double mixed = std::exp(-beta) / z;
  CHECK(mu[0] == doctest::Approx(aligned).epsilon(1e-12));  // (-,-) = index 0
  CHECK(mu[3] == doctest::Approx(aligned).epsilon(1e-12));  // (+,+) = index 3
  CHECK(mu[1] == doctest::Approx(mixed).epsilon(1e-12));
  CHECK(mu[2] == doctest::Approx(mixed).epsilon(1e-12));
  CHECK(aligned == doctest::Approx(0.32282815311289775).epsilon(1e-14));
  double total = 0.0;
  for (double v : mu) total += v;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("potential-encoded ising matches the graph ising") {
  const double beta = 0.45;
  ConditionalModel g = ising_path3(beta);
  // V(x) = -beta * sum_{i<j} J_ij s_i s_j with spins s = 2x - 1
  const int n = 3;
  std::vector<double> energy(8);
  for (uint64_t idx = 0; idx < 8; ++idx) {
    Configuration x = config_from_index(idx, n, 2);
    auto spin = [&](int i) { return 2.0 * x.values[static_cast<size_t>(i)] - 1.0; };
    energy[idx] = -beta * (spin(0) * spin(1) + spin(1) * spin(2));
  }
  ConditionalModel p = ConditionalModel::finite_potential(n, 2, energy, {0.5, 0.5});

  std::vector<double> mug = exact_gibbs_measure(g);
  std::vector<double> mup = exact_gibbs_measure(p);
  REQUIRE(mug.size() == mup.size());
  for (size_t k = 0; k < mug.size(); ++k)
    CHECK(mug[k] == doctest::Approx(mup[k]).epsilon(1e-12));

  for (int i = 0; i < n; ++i) {
    Configuration x = Configuration::symbols({1, 0, 1});
    Distribution1D cg = conditional_distribution(g, i, x);
    Distribution1D cp = conditional_distribution(p, i, x);
    REQUIRE(cg.probs.size() == cp.probs.size());
    for (size_t s = 0; s < cg.probs.size(); ++s)
      CHECK(cg.probs[s] == doctest::Approx(cp.probs[s]).epsilon(1e-12));
  }
}

TEST_CASE("free model conditionals ignore the conditioning state") {
  Distribution1D law = Distribution1D::finite({0.25, 0.75}, {0.0, 1.0});
  ConditionalModel m = ConditionalModel::free_sites(4, law);
  Configuration a = Configuration::symbols({0, 0, 0, 0});
  Configuration b = Configuration::symbols({1, 1, 1, 1});
  for (int i = 0; i < 4; ++i) {
    Distribution1D ca = conditional_distribution(m, i, a);
    Distribution1D cb = conditional_distribution(m, i, b);
    CHECK(ca.probs == law.probs);
    CHECK(cb.probs == law.probs);
    CHECK(ca.atoms == law.atoms);
  }
  // stationary law is the product measure
  std::vector<double> mu = exact_gibbs_measure(m);
  Configuration top = Configuration::symbols({1, 1, 1, 1});
  CHECK(mu[config_index(top, 2)] == doctest::Approx(0.75 * 0.75 * 0.75 * 0.75));
  Configuration bottom = Configuration::symbols({0, 0, 0, 0});
  CHECK(mu[config_index(bottom, 2)] == doctest::Approx(0.25 * 0.25 * 0.25 * 0.25));
}

TEST_CASE("gaussian conditional mean and exact_gibbs_measure guard") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
  a(0, 1) = 0.3;
  a(1, 0) = 0.3;
  Eigen::VectorXd b(2);
  b << 1.0, -1.0;
  Eigen::VectorXd sd(2);
  sd << 1.0, 2.0;
  ConditionalModel m = ConditionalModel::gaussian_linear(a, b, sd);
  CHECK_FALSE(m.finite_sites());
  Configuration x = Configuration::reals({0.0, 2.0});
  Distribution1D c = conditional_distribution(m, 0, x);
  REQUIRE(c.kind == DistKind::kGaussian);
  CHECK(c.mean == doctest::Approx(1.0 + 0.3 * 2.0));
  CHECK(c.sd == 1.0);
  CHECK_THROWS_AS((void)exact_gibbs_measure(m), AssumptionError);
}

TEST_CASE("neighborhoods: structural for graphs, table scan for potentials") {
  ConditionalModel g = ising_path3(0.4);
  CHECK(neighborhood(g, 0) == std::vector<int>{1});
  CHECK(neighborhood(g, 1) == std::vector<int>{0, 2});
  CHECK(neighborhood(g, 2) == std::vector<int>{1});

  // potential table with site 2 inert: V depends on sites 0 and 1 only
  std::vector<double> energy(8, 0.0);
  for (uint64_t idx = 0; idx < 8; ++idx) {
    Configuration x = config_from_index(idx, 3, 2);
    energy[idx] = 0.7 * x.values[0] * x.values[1];
  }
  ConditionalModel p = ConditionalModel::finite_potential(3, 2, energy, {0.5, 0.5});
  CHECK(neighborhood(p, 0) == std::vector<int>{1});
  CHECK(neighborhood(p, 1) == std::vector<int>{0});
  CHECK(neighborhood(p, 2).empty());

  auto all = interaction_neighborhoods(g);
  REQUIRE(all.size() == 3);
  CHECK(all[1] == std::vector<int>{0, 2});

  Distribution1D law = Distribution1D::finite({0.5, 0.5}, {0.0, 1.0});
  ConditionalModel f = ConditionalModel::free_sites(3, law);
  for (int i = 0; i < 3; ++i) CHECK(neighborhood(f, i).empty());
}

TEST_CASE("make_configuration named starts and value lists") {
  ConditionalModel m = ising_path3(0.3);
  Configuration zero = make_configuration(m, "all_zero");
  CHECK(zero == Configuration::symbols({0, 0, 0}));
  Configuration plus = make_configuration(m, "all_plus");
  CHECK(plus == Configuration::symbols({1, 1, 1}));
  Configuration lst = make_configuration(m, "1 0 1");
  CHECK(lst == Configuration::symbols({1, 0, 1}));
  CHECK_THROWS_AS((void)make_configuration(m, "1 0"), ConfigError);
  CHECK_THROWS_AS((void)make_configuration(m, "0 3 0"), ConfigError);
  CHECK_THROWS_AS((void)make_configuration(m, "frobnicate"), ConfigError);

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
  ConditionalModel gm = ConditionalModel::gaussian_linear(
      a, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2));
  Configuration gz = make_configuration(gm, "all_zero");
  CHECK(gz == Configuration::reals({0.0, 0.0}));
  Configuration gp = make_configuration(gm, "all_plus");
  CHECK(gp == Configuration::reals({1.0, 1.0}));
  Configuration gl = make_configuration(gm, "-0.5 2.25");
  CHECK(gl == Configuration::reals({-0.5, 2.25}));
}

TEST_CASE("conditional_sample is the inverse CDF of the conditional") {
  const double beta = 0.3;
  ConditionalModel m = ising_pair(beta);
  Configuration x = Configuration::symbols({0, 1});
  Distribution1D c = conditional_distribution(m, 0, x);

  const uint64_t master = 42;
  SubStream s1 = substream(master, Lane::kChain, 0, 1, 0);
  SubStream s2 = substream(master, Lane::kChain, 0, 1, 0);
  const double u = s2.next_uniform();
  const double drawn = conditional_sample(m, 0, x, s1);
  CHECK(drawn == static_cast<double>(c.quantile_index(u)));
  CHECK(s1.consumed() == 1);
}

TEST_CASE("factory validation") {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2, 2);
  j(0, 1) = 1.0;  // asymmetric
  CHECK_THROWS_AS((void)ConditionalModel::ising(j, Eigen::VectorXd::Zero(2), 0.3),
                  ConfigError);
  Eigen::MatrixXd jd = Eigen::MatrixXd::Identity(2, 2);  // nonzero diagonal
  CHECK_THROWS_AS((void)ConditionalModel::ising(jd, Eigen::VectorXd::Zero(2), 0.3),
                  ConfigError);
  Eigen::MatrixXd jo = Eigen::MatrixXd::Zero(2, 2);
  jo(0, 1) = jo(1, 0) = 1.0;
  CHECK_THROWS_AS((void)ConditionalModel::ising(jo, Eigen::VectorXd::Zero(3), 0.3),
                  ConfigError);

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
  a(0, 0) = 0.1;  // self-loop
  CHECK_THROWS_AS((void)ConditionalModel::gaussian_linear(
                      a, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2)),
                  ConfigError);
  Eigen::VectorXd bad_sd(2);
  bad_sd << 1.0, 0.0;
  CHECK_THROWS_AS((void)ConditionalModel::gaussian_linear(
                      Eigen::MatrixXd::Zero(2, 2), Eigen::VectorXd::Zero(2), bad_sd),
                  ConfigError);

  CHECK_THROWS_AS((void)ConditionalModel::finite_potential(2, 2, {0.0, 0.0}, {1.0, 1.0}),
                  ConfigError);  // table length != A^N
  CHECK_THROWS_AS((void)ConditionalModel::finite_potential(
                      2, 2, {0.0, 0.0, 0.0, 0.0}, {1.0, 0.0}),
                  ConfigError);  // zero reference weight
  CHECK_THROWS_AS((void)ConditionalModel::free_sites(0, Distribution1D::gaussian(0, 1)),
                  ConfigError);
}
