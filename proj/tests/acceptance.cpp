// Acceptance gate: one criterion per line, [PASS]/[FAIL], nonzero exit on
// any failure.  Each criterion is self-contained, fixes its own seeds, and
// enforces its own wall-clock budget.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dobgibbs/cli.hpp"
#include "dobgibbs/concentration.hpp"
#include "dobgibbs/dobrushin.hpp"
#include "dobgibbs/kernel_exact.hpp"
#include "dobgibbs/models.hpp"
#include "dobgibbs/observables.hpp"
#include "dobgibbs/sampler.hpp"
#include "dobgibbs/transport.hpp"

namespace fs = std::filesystem;
using namespace dobgibbs;
using Clock = std::chrono::steady_clock;

#define ACHECK(cond, ...)            \
  do {                               \
    if (!(cond)) {                   \
      std::ostringstream os_;        \
      os_ << __VA_ARGS__;            \
      notes.push_back(os_.str());    \
    }                                \
  } while (0)

namespace {

using Notes = std::vector<std::string>;

const GroundMetric kDiscrete{MetricKind::kDiscrete};
const GroundMetric kAbsDiff{MetricKind::kAbsoluteDifference};

Eigen::MatrixXd ising_pair_coupling() {
  Eigen::MatrixXd J(2, 2);
  J << 0, 1, 1, 0;
  return J;
}

Eigen::MatrixXd ising_path3_coupling() {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(3, 3);
  J(0, 1) = J(1, 0) = J(1, 2) = J(2, 1) = 1.0;
  return J;
}

// Random nonnegative zero-diagonal matrix rescaled so the chosen norm equals
// `target`.
Eigen::MatrixXd random_coefficients(std::mt19937_64& gen, int n, double target,
                                    bool column_norm) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::MatrixXd C(n, n);
  double norm = 0.0;
  do {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) C(i, j) = i == j ? 0.0 : unif(gen);
    norm = column_norm ? C.colwise().sum().maxCoeff() : C.rowwise().sum().maxCoeff();
  } while (norm <= 0.0);
  C *= target / norm;
  return C;
}

// --- 1. sweep-product inf-norm contraction (property, 1000 random systems)
void crit_inf_norm(Notes& notes) {
  std::mt19937_64 gen(20260814);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + trial % 11;
    const double target = 0.01 + 0.98 * unif(gen);
    const Eigen::MatrixXd C = random_coefficients(gen, n, target, false);
    const double r = dobrushin_norms(C).r;
    const SweepProduct sp = q_product(C);
    ACHECK(sp.inf_norm <= r + 1e-12, "trial " << trial << ": ||Q||_inf = "
               << sp.inf_norm << " > r = " << r);
    if (!notes.empty()) return;
  }
}

// --- 2. sweep-product one-norm bound + closed-form oracle
void crit_one_norm(Notes& notes) {
  std::mt19937_64 gen(20260815);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + trial % 11;
    const double target = 0.01 + 0.98 * unif(gen);
    const Eigen::MatrixXd C = random_coefficients(gen, n, target, true);
    const double r1 = dobrushin_norms(C).r1;
    const SweepProduct sp = q_product(C);
    ACHECK(sp.one_norm <= r1 / (1.0 - r1) + 1e-12,
           "trial " << trial << ": ||Q||_1 = " << sp.one_norm
                    << " > r1/(1-r1) = " << r1 / (1.0 - r1));
    if (n <= 8) {
      const double dev = (q_closed_form(C) - sp.Q).cwiseAbs().maxCoeff();
      ACHECK(dev <= 1e-12, "trial " << trial
                 << ": closed form deviates from product by " << dev);
    }
    if (!notes.empty()) return;
  }
}

// --- 3. two-site pair: coefficients, sweep product, and the r + r^2
//        one-sweep contraction of the coupled chain
void crit_pair_contraction(Notes& notes) {
  for (const double r : {0.1, 0.3, 0.45}) {
    const ConditionalModel m = ConditionalModel::ising(
        ising_pair_coupling(), Eigen::VectorXd::Zero(2), std::atanh(r));
    const CoefficientMatrix cm = coefficient_matrix(m, kDiscrete);
    ACHECK(std::fabs(cm.C(0, 1) - r) <= 1e-12 && std::fabs(cm.C(1, 0) - r) <= 1e-12 &&
               cm.C(0, 0) == 0.0 && cm.C(1, 1) == 0.0,
           "r=" << r << ": C != [[0,r],[r,0]], got [[" << cm.C(0, 0) << ","
                << cm.C(0, 1) << "],[" << cm.C(1, 0) << "," << cm.C(1, 1) << "]]");
    const SweepProduct sp = q_product(cm.C);
    ACHECK(sp.Q(0, 0) == 0.0 && sp.Q(1, 0) == 0.0 &&
               std::fabs(sp.Q(0, 1) - r) <= 1e-12 &&
               std::fabs(sp.Q(1, 1) - r * r) <= 1e-12,
           "r=" << r << ": Q != [[0,r],[0,r^2]]");

    // chains differing only at site 2: one coupled sweep contracts the
    // expected L1 distance to (r + r^2) * |x_2 - y_2|
    const Configuration x = make_configuration(m, "0 0");
    const Configuration y = make_configuration(m, "0 1");
    const uint64_t replicas = 100000;
    double sum = 0.0;
    for (uint64_t rep = 0; rep < replicas; ++rep) {
      const auto [xs, ys] = coupled_sweep(m, x, y, kDiscrete, 7, rep, 1);
      sum += config_distance(m, kDiscrete, xs, ys);
    }
    const double mean = sum / static_cast<double>(replicas);
    const double target = r + r * r;
    ACHECK(std::fabs(mean / target - 1.0) <= 0.02,
           "r=" << r << ": one-sweep E d = " << mean << " vs " << target
                << " (rel " << std::fabs(mean / target - 1.0) << ")");
  }
}

// --- 4. exact W1 decay under the N r^k envelope, with a log-slope fit
void crit_exact_decay(Notes& notes) {
  for (const double r_nom : {0.4, 0.8}) {
    const ConditionalModel m = ConditionalModel::ising(
        ising_path3_coupling(), Eigen::VectorXd::Zero(3), std::atanh(r_nom / 2.0));
    const std::vector<double> mu = exact_gibbs_measure(m);
    const Configuration x0 = make_configuration(m, "all_plus");
    const auto gaps = exact_w1_to_stationary(m, mu, x0, 15, kDiscrete, r_nom, 4096);
    for (const StationaryGap& g : gaps)
      ACHECK(g.w1_exact <= g.bound_nrk * (1.0 + 1e-12) + 1e-15,
             "r=" << r_nom << " k=" << g.k << ": W1 = " << g.w1_exact
                  << " > N r^k bound " << g.bound_nrk);

    const double floor = std::max(1e-13, 1e-12 * gaps[0].w1_exact);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int np = 0;
    for (const StationaryGap& g : gaps)
      if (g.w1_exact > floor) {
        const double kk = static_cast<double>(g.k), ly = std::log(g.w1_exact);
        sx += kk; sy += ly; sxx += kk * kk; sxy += kk * ly;
        ++np;
      }
    ACHECK(np >= 2, "r=" << r_nom << ": only " << np << " points above floor");
    if (np >= 2) {
      const double slope = (np * sxy - sx * sy) / (np * sxx - sx * sx);
      ACHECK(slope <= std::log(r_nom) + 1e-9,
             "r=" << r_nom << ": fitted slope " << slope << " > log r = "
                  << std::log(r_nom));
    }
  }
}

// --- 5. coupled update preserves both marginals (20 random triples)
void crit_marginal_validity(Notes& notes) {
  std::mt19937_64 gen(777);
  auto unif = [&](double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(gen);
  };
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(gen); };
  for (int trial = 0; trial < 20; ++trial) {
    ConditionalModel m;
    GroundMetric d = kDiscrete;
    switch (trial % 4) {
      case 0: {
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(3, 3);
        for (int i = 0; i + 1 < 3; ++i) J(i, i + 1) = J(i + 1, i) = unif(0.5, 1.5);
        Eigen::VectorXd h(3);
        for (int i = 0; i < 3; ++i) h(i) = unif(-0.3, 0.3);
        m = ConditionalModel::ising(J, h, unif(0.1, 0.6));
        break;
      }
      case 1: {
        const double p = unif(0.2, 0.8);
        m = ConditionalModel::free_sites(4,
                                         Distribution1D::finite({p, 1 - p}, {-1, 1}));
        break;
      }
      case 2: {
        std::vector<double> energy(9);
        for (double& e : energy) e = unif(0.0, 1.5);
        m = ConditionalModel::finite_potential(2, 3, energy, {});
        break;
      }
      case 3: {
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(3, 3);
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            if (i != j) A(i, j) = unif(-0.25, 0.25);
        Eigen::VectorXd b(3), s(3);
        for (int i = 0; i < 3; ++i) { b(i) = unif(-0.5, 0.5); s(i) = unif(0.5, 1.5); }
        m = ConditionalModel::gaussian_linear(A, b, s);
        d = kAbsDiff;
        break;
      }
    }
    const int site = pick(m.n_sites);
    Configuration x, y;
    if (m.finite_sites()) {
      std::vector<int> sxv(static_cast<size_t>(m.n_sites)),
          syv(static_cast<size_t>(m.n_sites));
      for (int i = 0; i < m.n_sites; ++i) {
        sxv[static_cast<size_t>(i)] = pick(m.local_alphabet());
        syv[static_cast<size_t>(i)] = pick(m.local_alphabet());
      }
      x = Configuration::symbols(std::move(sxv));
      y = Configuration::symbols(std::move(syv));
    } else {
      std::vector<double> vx(static_cast<size_t>(m.n_sites)),
          vy(static_cast<size_t>(m.n_sites));
      for (int i = 0; i < m.n_sites; ++i) {
        vx[static_cast<size_t>(i)] = unif(-1, 1);
        vy[static_cast<size_t>(i)] = unif(-1, 1);
      }
      x = Configuration::reals(std::move(vx));
      y = Configuration::reals(std::move(vy));
    }
    const MarginalCheck mc =
        marginal_validity_check(m, x, y, site, 100000, d, 100 + trial);
    ACHECK(mc.p_value >= 1e-4, "triple " << trial << " (" << mc.test
               << "): p = " << mc.p_value);
  }
}

// --- 6. empirical tails under the closed-form concentration bound, with a
//        shrunk-bound negative control
void crit_tail_bound(Notes& notes) {
  const ConditionalModel m = ConditionalModel::ising(
      ising_path3_coupling(), Eigen::VectorXd::Zero(3), std::atanh(0.15));
  const Observable f = make_observable("site_average", m, kDiscrete);
  std::vector<double> t_grid;
  for (int j = 1; j <= 10; ++j) t_grid.push_back(0.015 * j);
  const TailReport tr =
      empirical_tail(m, f, make_configuration(m, "all_zero"), 200, t_grid, 10000,
                     CenteringPart::kPartA, 0.25, kDiscrete, 42, 4);
  ACHECK(std::fabs(tr.params.r1 - 0.3) <= 1e-12,
         "r1 = " << tr.params.r1 << ", expected 0.3");
  ACHECK(std::fabs(tr.params.alpha - 1.0 / 3.0) <= 1e-12,
         "alpha = " << tr.params.alpha << ", expected 1/3");
  ACHECK(tr.centering_exact, "centering fell back to an estimate");
  ConcentrationBoundParams shrunk = tr.params;
  shrunk.c1 /= 10.0;
  bool violated = false;
  for (const TailPoint& p : tr.points) {
    ACHECK(p.ci_lo <= p.bound_a + 1e-15, "t=" << p.t << ": CI lower "
               << p.ci_lo << " > bound " << p.bound_a);
    if (p.ci_lo > tail_bound(shrunk, p.t)) violated = true;
  }
  ACHECK(violated, "negative control: C1/10 bound never violated "
                   "(test has no power)");
}

// --- 7. Cesaro-mean bias within M/n on the exact kernel
void crit_cesaro_bias(Notes& notes) {
  const ConditionalModel m = ConditionalModel::ising(
      ising_path3_coupling(), Eigen::VectorXd::Zero(3), std::atanh(0.15));
  const Observable f = make_observable("site_average", m, kDiscrete);
  const Configuration x0 = make_configuration(m, "all_plus");
  for (const uint64_t n : {10ull, 100ull, 1000ull}) {
    const CesaroBias cb = cesaro_bias_check(m, f, x0, n, kDiscrete);
    ACHECK(cb.m_over_n > 0.0, "n=" << n << ": M/n = " << cb.m_over_n);
    ACHECK(cb.bias <= cb.m_over_n + 1e-10,
           "n=" << n << ": |bias| = " << cb.bias << " > M/n = " << cb.m_over_n);
  }
}

// --- 8. independent sites: tail bound at speed n*N
void crit_free_speed(Notes& notes) {
  const ConditionalModel m = ConditionalModel::free_sites(
      50, Distribution1D::finite({0.5, 0.5}, {-1.0, 1.0}));
  const Observable f = make_observable("mean_spin", m, kDiscrete);
  std::vector<double> t_grid;
  for (int j = 1; j <= 10; ++j) t_grid.push_back(0.005 * j);
  const TailReport tr =
      empirical_tail(m, f, make_configuration(m, "all_zero"), 100, t_grid, 10000,
                     CenteringPart::kPartA, 0.25, kDiscrete, 43, 4);
  ACHECK(tr.params.r1 == 0.0, "free model reported r1 = " << tr.params.r1);
  for (const TailPoint& p : tr.points) {
    // exponent must be exactly t^2 * n * N / 2 = 2500 t^2
    const double expected = std::exp(-2500.0 * p.t * p.t);
    ACHECK(std::fabs(p.bound_a - expected) <= 1e-9 * expected,
           "t=" << p.t << ": bound " << p.bound_a << " != exp(-2500 t^2) = "
                << expected);
    ACHECK(p.ci_lo <= p.bound_a + 1e-15,
           "t=" << p.t << ": CI lower " << p.ci_lo << " > bound " << p.bound_a);
  }
}

// --- 9. transportation inequality: empirical log-MGF under lambda^2 C |F|^2/2
void crit_mgf(Notes& notes) {
  std::vector<double> lam;
  for (int j = 1; j <= 9; ++j) lam.push_back(0.1 * j);

  // independent binary sites: C_T1 = N/4, |F|_Lip = 2 -> bound 5 lambda^2
  const ConditionalModel m1 = ConditionalModel::free_sites(
      10, Distribution1D::finite({0.5, 0.5}, {-1.0, 1.0}));
  const Observable f1 = make_observable("sum_spins", m1, kDiscrete);
  const MgfReport r1 =
      t1_mgf_check(m1, f1, make_configuration(m1, "all_zero"), lam, 2.5, 100000, 44, 4);
  ACHECK(r1.mean_exact, "free model: mean fell back to an estimate");
  for (const MgfPoint& p : r1.points) {
    ACHECK(std::fabs(p.bound - 5.0 * p.lambda * p.lambda) <= 1e-12,
           "free lambda=" << p.lambda << ": bound " << p.bound << " != 5 lambda^2");
    ACHECK(p.stable && p.margin >= -3.0 * p.stderr_,
           "free lambda=" << p.lambda << ": log MGF " << p.log_mgf << " > bound "
                          << p.bound << " + 3 sigma (margin " << p.margin << ")");
  }

  // two coupled gaussian sites: C_T1 = N sigma^2/(1-r1)^2 = 2/0.49, |F|_Lip = 1
  Eigen::MatrixXd A(2, 2);
  A << 0, 0.3, 0.3, 0;
  const ConditionalModel m2 = ConditionalModel::gaussian_linear(
      A, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2));
  const Observable f2 = make_observable("sum_values", m2, kAbsDiff);
  const double c_t1 = 2.0 / 0.49;
  const MgfReport r2 = t1_mgf_check(m2, f2, make_configuration(m2, "all_zero"), lam,
                                    c_t1, 100000, 45, 4);
  for (const MgfPoint& p : r2.points) {
    ACHECK(std::fabs(p.bound - c_t1 / 2.0 * p.lambda * p.lambda) <= 1e-12,
           "gaussian lambda=" << p.lambda << ": bound " << p.bound
                              << " != lambda^2 C/2");
    ACHECK(p.stable && p.margin >= -3.0 * p.stderr_,
           "gaussian lambda=" << p.lambda << ": log MGF " << p.log_mgf
                              << " > bound " << p.bound << " + 3 sigma");
  }
}

// --- 10. byte-identical outputs for identical config + seed, all subcommands
std::string slurp_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> dir_bytes(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file())
      out[fs::relative(e.path(), root).string()] = slurp_bytes(e.path());
  return out;
}

void crit_determinism(Notes& notes) {
  const fs::path root =
      fs::temp_directory_path() / "dobgibbs_acceptance_determinism";
  std::error_code ec;
  fs::remove_all(root, ec);
  fs::create_directories(root);
  const fs::path cfg = root / "run.cfg";
  {
    std::ofstream o(cfg);
    o << "kind ising\nn_sites 2\nbeta 0.3\nedges 1 2 1\n"
      << "x0 all_zero\ny0 all_plus\nk_max 5\nn 50\nreplicas 1000\ndraws 10000\n"
      << "t_grid 0.02 0.05 0.1\n";
  }
  for (const char* sub :
       {"coeffs", "exact", "couple", "simulate", "concentrate", "report"}) {
    const fs::path oa = root / (std::string(sub) + "_a");
    const fs::path ob = root / (std::string(sub) + "_b");
    const int ra = run_cli({sub, "--config", cfg.string(), "--seed", "17", "--out",
                            oa.string()});
    const int rb = run_cli({sub, "--config", cfg.string(), "--seed", "17", "--out",
                            ob.string()});
    ACHECK(ra == 0 && rb == 0, sub << ": exit codes " << ra << ", " << rb);
    if (ra != 0 || rb != 0) continue;
    const auto fa = dir_bytes(oa), fb = dir_bytes(ob);
    ACHECK(!fa.empty(), sub << ": no output files written");
    ACHECK(fa.size() == fb.size(), sub << ": file sets differ (" << fa.size()
               << " vs " << fb.size() << ")");
    for (const auto& [rel, bytes] : fa) {
      const auto it = fb.find(rel);
      if (it == fb.end()) {
        ACHECK(false, sub << ": " << rel << " missing from rerun");
      } else {
        ACHECK(bytes == it->second, sub << ": " << rel << " differs between runs");
      }
    }
  }
  fs::remove_all(root, ec);
}

struct Criterion {
  int id;
  const char* label;
  double limit_s;
  void (*run)(Notes&);
};

const Criterion kCriteria[] = {
    {1, "sweep product: ||Q||_inf <= r on 1000 random systems", 5.0, crit_inf_norm},
    {2, "sweep product: ||Q||_1 <= r1/(1-r1); closed form == product", 30.0,
     crit_one_norm},
    {3, "two-site pair: C, Q, and the (r + r^2) coupled one-sweep contraction",
     20.0, crit_pair_contraction},
    {4, "exact W1 decay under N r^k; fitted log-slope <= log r", 10.0,
     crit_exact_decay},
    {5, "coupled update marginal validity on 20 random triples", 60.0,
     crit_marginal_validity},
    {6, "empirical tails under the concentration bound + negative control", 120.0,
     crit_tail_bound},
    {7, "Cesaro-mean bias within M/n on the exact kernel", 5.0, crit_cesaro_bias},
    {8, "independent-site tail bound at speed n*N", 60.0, crit_free_speed},
    {9, "empirical log-MGF under the transportation bound", 60.0, crit_mgf},
    {10, "byte-identical outputs across reruns of every subcommand", 120.0,
     crit_determinism},
};

}  // namespace

int main() {
  int failures = 0;
  for (const Criterion& c : kCriteria) {
    Notes notes;
    const auto t0 = Clock::now();
    try {
      c.run(notes);
    } catch (const std::exception& e) {
      notes.push_back(std::string("exception: ") + e.what());
    }
    const double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
    if (elapsed >= c.limit_s) {
      std::ostringstream os;
      os << "runtime " << elapsed << "s exceeds the " << c.limit_s << "s budget";
      notes.push_back(os.str());
    }
    if (notes.empty()) {
      std::printf("[PASS] %2d/10 %s  (%.2fs < %.0fs)\n", c.id, c.label, elapsed,
                  c.limit_s);
    } else {
      ++failures;
      std::printf("[FAIL] %2d/10 %s  (%.2fs): %s", c.id, c.label, elapsed,
                  notes.front().c_str());
      if (notes.size() > 1)
        std::printf("  [+%zu more]", notes.size() - 1);
      std::printf("\n");
    }
  }
  std::printf("acceptance: %d/10 passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
