#include "dobgibbs/dobrushin.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include "dobgibbs/rng.hpp"
#include "dobgibbs/transport.hpp"

namespace dobgibbs {

namespace {

void validate_square(const Eigen::MatrixXd& C, const char* who) {
  const int n = static_cast<int>(C.rows());
  if (n < 1 || C.cols() != n)
    throw std::invalid_argument(std::string(who) + ": matrix must be square");
  for (int i = 0; i < n; ++i) {
    if (C(i, i) != 0.0)
      throw std::invalid_argument(std::string(who) + ": diagonal must be zero");
    for (int j = 0; j < n; ++j)
      if (!(std::isfinite(C(i, j)) && C(i, j) >= 0.0))
        throw std::invalid_argument(std::string(who) + ": entries must be finite and >= 0");
  }
}

// Max W1 displacement of mu_i when site j sweeps its alphabet, over every
// assignment of the remaining neighbor sites.
double finite_pair_coefficient(const ConditionalModel& m, const GroundMetric& d, int i,
                               int j, const std::vector<int>& nbr, uint64_t cap) {
  const int A = m.local_alphabet();
  std::vector<int> vary;
  for (int s : nbr)
    if (s != j) vary.push_back(s);
  uint64_t count = 1;
  for (size_t v = 0; v < vary.size(); ++v) {
    count *= static_cast<uint64_t>(A);
    if (count > cap)
      throw ConfigError("interaction neighborhood exceeds enumeration cap", "cap");
  }
  Configuration x = Configuration::symbols(std::vector<int>(m.n_sites, 0));
  double worst = 0.0;
  for (uint64_t ctx = 0; ctx < count; ++ctx) {
    uint64_t rest = ctx;
    for (int s : vary) {
      x.values[static_cast<size_t>(s)] = static_cast<double>(rest % static_cast<uint64_t>(A));
      rest /= static_cast<uint64_t>(A);
    }
    std::vector<Distribution1D> laws;
    laws.reserve(static_cast<size_t>(A));
    for (int a = 0; a < A; ++a) {
      x.values[static_cast<size_t>(j)] = a;
      laws.push_back(conditional_distribution(m, i, x));
    }
    for (int a = 0; a < A; ++a)
      for (int b = a + 1; b < A; ++b) {
        const double denom = site_distance(m, d, a, b);
        if (denom <= 0.0) continue;
        worst = std::max(worst, w1_distance(laws[static_cast<size_t>(a)],
                                            laws[static_cast<size_t>(b)], d) /
                                    denom);
      }
  }
  return worst;
}

// Deterministic spot check that sites outside the detected neighborhoods
// cannot move the conditional laws.
void check_restriction(const ConditionalModel& m, const GroundMetric& d,
                       const std::vector<std::vector<int>>& nbrs) {
  if (!m.finite_sites()) return;
  const int A = m.local_alphabet();
  SubStream gen(derive_key(0x5eedful, 7, 0, 0, 0));
  for (int i = 0; i < m.n_sites; ++i) {
    std::vector<char> in_nbr(static_cast<size_t>(m.n_sites), 0);
    for (int s : nbrs[static_cast<size_t>(i)]) in_nbr[static_cast<size_t>(s)] = 1;
    for (int j = 0; j < m.n_sites; ++j) {
      if (j == i || in_nbr[static_cast<size_t>(j)]) continue;
      for (int rep = 0; rep < 4; ++rep) {
        std::vector<int> s(static_cast<size_t>(m.n_sites));
        for (int t = 0; t < m.n_sites; ++t)
          s[static_cast<size_t>(t)] = static_cast<int>(gen.next_u64() % static_cast<uint64_t>(A));
        Configuration x = Configuration::symbols(s);
        const Distribution1D base = conditional_distribution(m, i, x);
        const int bump = 1 + static_cast<int>(gen.next_u64() % static_cast<uint64_t>(A - 1));
        x.values[static_cast<size_t>(j)] =
            static_cast<double>((x.symbol(j) + bump) % A);
        if (w1_distance(base, conditional_distribution(m, i, x), d) > 1e-12)
          throw std::logic_error(
              "coefficient_matrix: neighborhood restriction check failed");
      }
    }
  }
}

}  // namespace

CoefficientMatrix coefficient_matrix(const ConditionalModel& m, const GroundMetric& d,
                                     uint64_t cap) {
  const int n = m.n_sites;
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
  if (m.kind == ModelKind::kGaussianLinear) {
    if (d.kind == MetricKind::kDiscrete)
      throw AssumptionError("discrete metric is not available on a continuous state space");
    // W1(N(m1,s), N(m2,s)) = |m1 - m2|, so the displacement per unit change
    // at j is exactly |A_ij|.
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (j != i) C(i, j) = std::fabs(m.mean_coeff(i, j));
  } else if (m.kind == ModelKind::kFree) {
    // independent sites: nothing moves the conditionals
  } else {
    const auto nbrs = interaction_neighborhoods(m, cap);
    for (int i = 0; i < n; ++i)
      for (int j : nbrs[static_cast<size_t>(i)])
        C(i, j) = finite_pair_coefficient(m, d, i, j, nbrs[static_cast<size_t>(i)], cap);
    check_restriction(m, d, nbrs);
  }
  CoefficientMatrix out;
  out.C = std::move(C);
  const DobrushinNorms norms = dobrushin_norms(out.C);
  out.r = norms.r;
  out.r1 = norms.r1;
  return out;
}

DobrushinNorms dobrushin_norms(const Eigen::MatrixXd& C) {
  validate_square(C, "dobrushin_norms");
  DobrushinNorms n;
  n.r = C.rowwise().sum().maxCoeff();
  n.r1 = C.colwise().sum().maxCoeff();
  n.h1 = n.r < 1.0;
  n.h2 = n.r1 < 1.0;
  n.h2_half = n.r1 < 0.5;
  return n;
}

Eigen::MatrixXd update_matrix(const Eigen::MatrixXd& C, int i) {
  validate_square(C, "update_matrix");
  if (i < 0 || i >= C.rows()) throw std::invalid_argument("update_matrix: site out of range");
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(C.rows(), C.cols());
  B.row(i) = C.row(i);
  return B;
}

SweepProduct q_product(const Eigen::MatrixXd& C) {
  validate_square(C, "q_product");
  const int n = static_cast<int>(C.rows());
  Eigen::MatrixXd Q = update_matrix(C, 0);
  for (int i = 1; i < n; ++i) Q = update_matrix(C, i) * Q;
  SweepProduct out;
  out.inf_norm = Q.cwiseAbs().rowwise().sum().maxCoeff();
  out.one_norm = Q.cwiseAbs().colwise().sum().maxCoeff();
  out.Q = std::move(Q);
  return out;
}

Eigen::MatrixXd q_closed_form(const Eigen::MatrixXd& C) {
  validate_square(C, "q_closed_form");
  const int n = static_cast<int>(C.rows());
  if (n > 12) throw ConfigError("q_closed_form is limited to 12 sites", "n_sites");
  // W(k,h): total weight of decreasing update chains from site k down to h.
  Eigen::MatrixXd W = Eigen::MatrixXd::Constant(n, n, -1.0);
  std::function<double(int, int)> chain = [&](int k, int h) -> double {
    if (W(k, h) >= 0.0) return W(k, h);
    double w = C(k, h);
    for (int mid = h + 1; mid < k; ++mid) w += C(k, mid) * chain(mid, h);
    W(k, h) = w;
    return w;
  };
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k)
    for (int j = 1; j < n; ++j) {
      double q = 0.0;
      for (int h = 0; h < j; ++h) {
        const double coef = (h == k) ? 1.0 : (h < k ? chain(k, h) : 0.0);
        q += coef * C(h, j);
      }
      Q(k, j) = q;
    }
  return Q;
}

ContractionCertificate contraction_certificate(const Eigen::MatrixXd& C) {
  ContractionCertificate cert;
  cert.n = static_cast<int>(C.rows());
  cert.norms = dobrushin_norms(C);
  const SweepProduct sp = q_product(C);
  cert.inf_norm = sp.inf_norm;
  cert.one_norm = sp.one_norm;
  cert.bound_inf = cert.norms.r;
  cert.margin_inf = cert.bound_inf - cert.inf_norm;
  cert.inf_ok = !cert.norms.h1 || cert.inf_norm <= cert.norms.r + 1e-12;
  if (cert.norms.h2) {
    cert.bound_one = cert.norms.r1 / (1.0 - cert.norms.r1);
    cert.margin_one = cert.bound_one - cert.one_norm;
    cert.one_ok = cert.one_norm <= cert.bound_one + 1e-12;
  } else {
    cert.bound_one = std::numeric_limits<double>::infinity();
    cert.margin_one = std::numeric_limits<double>::infinity();
    cert.one_ok = true;
  }
  return cert;
}

double ricci_lower_bound(double r1) {
  if (!(r1 >= 0.0) || r1 >= 1.0)
    throw AssumptionError("ricci_lower_bound requires 0 <= r1 < 1");
  return (1.0 - 2.0 * r1) / (1.0 - r1);
}

}  // namespace dobgibbs
