#include "dobgibbs/kernel_exact.hpp"

#include <cmath>

#include "dobgibbs/transport.hpp"
#include "dobgibbs/util.hpp"

namespace dobgibbs {

namespace {

// Pushes mass at site i: for every configuration with positive mass, spread
// it over the A conditional values.  dense is reused between calls.
void push_site(const ConditionalModel& m, int i, std::vector<double>& v,
               std::vector<double>& scratch) {
  const int A = m.local_alphabet();
  const uint64_t size = v.size();
  std::fill(scratch.begin(), scratch.end(), 0.0);
  // stride of site i in the mixed-radix indexing
  uint64_t stride = 1;
  for (int s = m.n_sites - 1; s > i; --s) stride *= static_cast<uint64_t>(A);
  for (uint64_t idx = 0; idx < size; ++idx) {
    if (v[idx] == 0.0) continue;
    const Configuration x = config_from_index(idx, m.n_sites, A);
    const Distribution1D law = conditional_distribution(m, i, x);
    const uint64_t base = idx - static_cast<uint64_t>(x.symbol(i)) * stride;
    for (int a = 0; a < A; ++a)
      scratch[base + static_cast<uint64_t>(a) * stride] +=
          v[idx] * law.probs[static_cast<size_t>(a)];
  }
  v.swap(scratch);
}

}  // namespace

std::vector<double> sweep_distribution(const ConditionalModel& m,
                                       const std::vector<double>& nu, uint64_t cap) {
  const uint64_t size = state_space_size(m.n_sites, m.local_alphabet(), cap);
  if (nu.size() != size)
    throw std::invalid_argument("sweep_distribution: distribution size mismatch");
  std::vector<double> v = nu;
  std::vector<double> scratch(size, 0.0);
  for (int i = 0; i < m.n_sites; ++i) push_site(m, i, v, scratch);
  return v;
}

TransitionMatrix build_transition_matrix(const ConditionalModel& m, uint64_t cap,
                                         int threads) {
  if (!m.finite_sites())
    throw AssumptionError("transition matrix requires a finite state space");
  const int A = m.local_alphabet();
  const uint64_t size = state_space_size(m.n_sites, A, cap);
  TransitionMatrix tm;
  tm.n_sites = m.n_sites;
  tm.alphabet = A;
  tm.P = Eigen::MatrixXd::Zero(static_cast<long>(size), static_cast<long>(size));
  parallel_blocks(size, 64, resolve_threads(threads),
                  [&](uint64_t, uint64_t begin, uint64_t end) {
                    std::vector<double> row(size), scratch(size);
                    for (uint64_t x = begin; x < end; ++x) {
                      std::fill(row.begin(), row.end(), 0.0);
                      row[x] = 1.0;
                      for (int i = 0; i < m.n_sites; ++i) push_site(m, i, row, scratch);
                      for (uint64_t y = 0; y < size; ++y)
                        tm.P(static_cast<long>(x), static_cast<long>(y)) = row[y];
                    }
                  });
  return tm;
}

double invariance_check(const TransitionMatrix& tm, const std::vector<double>& mu) {
  const long size = tm.P.rows();
  if (static_cast<long>(mu.size()) != size)
    throw std::invalid_argument("invariance_check: dimension mismatch");
  Eigen::Map<const Eigen::VectorXd> v(mu.data(), size);
  return ((v.transpose() * tm.P).transpose() - v).cwiseAbs().sum();
}

std::vector<StationaryGap> exact_w1_to_stationary(const ConditionalModel& m,
                                                  const std::vector<double>& mu,
                                                  const Configuration& x0, uint64_t k_max,
                                                  const GroundMetric& d, double r,
                                                  uint64_t cap) {
  const int A = m.local_alphabet();
  const uint64_t size = state_space_size(m.n_sites, A, cap);
  if (mu.size() != size)
    throw std::invalid_argument("exact_w1_to_stationary: stationary law size mismatch");

  // L1 cost between enumerated configurations, evaluated on demand.
  std::vector<Configuration> cfgs;
  cfgs.reserve(size);
  for (uint64_t idx = 0; idx < size; ++idx)
    cfgs.push_back(config_from_index(idx, m.n_sites, A));
  auto cost = [&](int a, int b) {
    return config_distance(m, d, cfgs[static_cast<size_t>(a)], cfgs[static_cast<size_t>(b)]);
  };

  // Envelope constant max_i E_mu d(x0^i, y^i).
  double dmax = 0.0;
  for (int i = 0; i < m.n_sites; ++i) {
    double e = 0.0;
    for (uint64_t idx = 0; idx < size; ++idx)
      e += mu[idx] * site_distance(m, d, x0.values[static_cast<size_t>(i)],
                                   cfgs[idx].values[static_cast<size_t>(i)]);
    dmax = std::max(dmax, e);
  }

  std::vector<double> nu(size, 0.0);
  nu[config_index(x0, A)] = 1.0;
  std::vector<StationaryGap> out;
  out.reserve(k_max + 1);
  double rk = 1.0;
  for (uint64_t k = 0; k <= k_max; ++k) {
    StationaryGap g;
    g.k = k;
    g.w1_exact =
        exact_ot_finite(cost, static_cast<int>(size), static_cast<int>(size), nu, mu).cost;
    double tv = 0.0;
    for (uint64_t idx = 0; idx < size; ++idx) tv += std::fabs(nu[idx] - mu[idx]);
    g.tv_half = 0.5 * tv;
    g.bound_nrk = m.n_sites * rk * dmax;
    out.push_back(g);
    if (k < k_max) nu = sweep_distribution(m, nu, cap);
    rk *= r;
  }
  return out;
}

double total_variation_to_stationary(const TransitionMatrix& tm,
                                     const std::vector<double>& mu, uint64_t x0_index,
                                     uint64_t k) {
  const long size = tm.P.rows();
  if (static_cast<long>(mu.size()) != size || x0_index >= static_cast<uint64_t>(size))
    throw std::invalid_argument("total_variation_to_stationary: dimension mismatch");
  Eigen::RowVectorXd nu = Eigen::RowVectorXd::Zero(size);
  nu(static_cast<long>(x0_index)) = 1.0;
  for (uint64_t s = 0; s < k; ++s) nu = nu * tm.P;
  double tv = 0.0;
  for (long idx = 0; idx < size; ++idx) tv += std::fabs(nu(idx) - mu[static_cast<size_t>(idx)]);
  return 0.5 * tv;
}

double expect_under(const ConditionalModel& m, const std::vector<double>& dist,
                    const std::function<double(const Configuration&)>& f) {
  const int A = m.local_alphabet();
  double e = 0.0;
  for (uint64_t idx = 0; idx < dist.size(); ++idx)
    if (dist[idx] != 0.0) e += dist[idx] * f(config_from_index(idx, m.n_sites, A));
  return e;
}

}  // namespace dobgibbs
