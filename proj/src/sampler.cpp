#include "dobgibbs/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dobgibbs/dobrushin.hpp"
#include "dobgibbs/stats.hpp"
#include "dobgibbs/transport.hpp"
#include "dobgibbs/util.hpp"

namespace dobgibbs {

Configuration gibbs_sweep(const ConditionalModel& m, Configuration x, uint64_t master,
                          uint64_t replica, uint64_t sweep) {
  if (x.size() != m.n_sites) throw std::invalid_argument("gibbs_sweep: wrong state length");
  for (int i = 0; i < m.n_sites; ++i) {
    SubStream stream = substream(master, Lane::kChain, replica, sweep, static_cast<uint64_t>(i));
    x.values[static_cast<size_t>(i)] = conditional_sample(m, i, x, stream);
  }
  return x;
}

std::vector<Configuration> run_chain(const ConditionalModel& m, const Configuration& x0,
                                     uint64_t k_max, uint64_t master, uint64_t replica) {
  std::vector<Configuration> out;
  out.reserve(k_max + 1);
  out.push_back(x0);
  for (uint64_t k = 1; k <= k_max; ++k)
    out.push_back(gibbs_sweep(m, out.back(), master, replica, k));
  return out;
}

std::pair<Configuration, Configuration> coupled_sweep(const ConditionalModel& m,
                                                      const Configuration& x,
                                                      const Configuration& y,
                                                      const GroundMetric& d, uint64_t master,
                                                      uint64_t replica, uint64_t sweep) {
  if (x.size() != m.n_sites || y.size() != m.n_sites)
    throw std::invalid_argument("coupled_sweep: wrong state length");
  Configuration a = x, b = y;
  for (int i = 0; i < m.n_sites; ++i) {
    const Distribution1D law_a = conditional_distribution(m, i, a);
    const Distribution1D law_b = conditional_distribution(m, i, b);
    SubStream stream = substream(master, Lane::kChain, replica, sweep, static_cast<uint64_t>(i));
    const auto [va, vb] = optimal_coupling_sample(law_a, law_b, d, stream);
    a.values[static_cast<size_t>(i)] = va;
    b.values[static_cast<size_t>(i)] = vb;
  }
  return {std::move(a), std::move(b)};
}

CoupledTrajectory run_coupled_chain(const ConditionalModel& m, const Configuration& x0,
                                    const Configuration& y0, uint64_t k_max,
                                    const GroundMetric& d, uint64_t master,
                                    uint64_t replica) {
  CoupledTrajectory tr;
  tr.site_distance = Eigen::MatrixXd::Zero(static_cast<long>(k_max) + 1, m.n_sites);
  Configuration x = x0, y = y0;
  auto record = [&](uint64_t k) {
    bool equal = true;
    for (int i = 0; i < m.n_sites; ++i) {
      const double di = site_distance(m, d, x.values[static_cast<size_t>(i)],
                                      y.values[static_cast<size_t>(i)]);
      tr.site_distance(static_cast<long>(k), i) = di;
      equal = equal && x.values[static_cast<size_t>(i)] == y.values[static_cast<size_t>(i)];
    }
    return equal;
  };
  if (record(0)) tr.coalesced_sweep = 0;
  for (uint64_t k = 1; k <= k_max && tr.coalesced_sweep < 0; ++k) {
    std::tie(x, y) = coupled_sweep(m, x, y, d, master, replica, k);
    if (record(k)) tr.coalesced_sweep = static_cast<long>(k);
  }
  // Coupled updates preserve equality, so remaining rows stay at zero.
  return tr;
}

namespace {

Configuration draw_from_table(const ConditionalModel& m, const std::vector<double>& mu,
                              SubStream& stream) {
  const double u = stream.next_uniform();
  double cum = 0.0;
  uint64_t idx = 0;
  for (size_t t = 0; t < mu.size(); ++t) {
    cum += mu[t];
    if (u <= cum) {
      idx = t;
      break;
    }
    idx = t;
  }
  return config_from_index(idx, m.n_sites, m.local_alphabet());
}

}  // namespace

DecayReport estimate_w1_decay(const ConditionalModel& m, const Configuration& x0,
                              const Configuration& y0, StartMode start, uint64_t k_max,
                              uint64_t replicas, const GroundMetric& d, uint64_t master,
                              int threads) {
  if (replicas == 0) throw std::invalid_argument("estimate_w1_decay: zero replicas");
  const int n = m.n_sites;
  const long rows = static_cast<long>(k_max) + 1;

  std::vector<double> mu;
  if (start == StartMode::kStationary) mu = exact_gibbs_measure(m);

  const uint64_t block = 64;
  const uint64_t n_blocks = (replicas + block - 1) / block;
  std::vector<Eigen::MatrixXd> site_part(n_blocks, Eigen::MatrixXd::Zero(rows, n));
  std::vector<std::vector<double>> l1_part(n_blocks, std::vector<double>(rows, 0.0));
  std::vector<std::vector<double>> l1sq_part(n_blocks, std::vector<double>(rows, 0.0));
  std::vector<std::vector<uint64_t>> coal_part(n_blocks, std::vector<uint64_t>(rows, 0));

  parallel_blocks(replicas, block, resolve_threads(threads),
                  [&](uint64_t bi, uint64_t begin, uint64_t end) {
                    for (uint64_t rep = begin; rep < end; ++rep) {
                      Configuration y = y0;
                      if (start == StartMode::kStationary) {
                        SubStream init = substream(master, Lane::kInit, rep, 0, 0);
                        y = draw_from_table(m, mu, init);
                      }
                      const CoupledTrajectory tr =
                          run_coupled_chain(m, x0, y, k_max, d, master, rep);
                      site_part[bi] += tr.site_distance;
                      for (long k = 0; k < rows; ++k) {
                        const double l1 = tr.site_distance.row(k).sum();
                        l1_part[bi][static_cast<size_t>(k)] += l1;
                        l1sq_part[bi][static_cast<size_t>(k)] += l1 * l1;
                        if (tr.coalesced_sweep >= 0 && k >= tr.coalesced_sweep)
                          ++coal_part[bi][static_cast<size_t>(k)];
                      }
                    }
                  });

  DecayReport rep;
  rep.replicas = replicas;
  rep.mean_site = Eigen::MatrixXd::Zero(rows, n);
  rep.mean_l1.assign(static_cast<size_t>(rows), 0.0);
  rep.stderr_l1.assign(static_cast<size_t>(rows), 0.0);
  rep.coalesced_fraction.assign(static_cast<size_t>(rows), 0.0);
  std::vector<double> l1sq(static_cast<size_t>(rows), 0.0);
  for (uint64_t bi = 0; bi < n_blocks; ++bi) {
    rep.mean_site += site_part[bi];
    for (long k = 0; k < rows; ++k) {
      rep.mean_l1[static_cast<size_t>(k)] += l1_part[bi][static_cast<size_t>(k)];
      l1sq[static_cast<size_t>(k)] += l1sq_part[bi][static_cast<size_t>(k)];
      rep.coalesced_fraction[static_cast<size_t>(k)] +=
          static_cast<double>(coal_part[bi][static_cast<size_t>(k)]);
    }
  }
  const double R = static_cast<double>(replicas);
  rep.mean_site /= R;
  for (long k = 0; k < rows; ++k) {
    const double mean = rep.mean_l1[static_cast<size_t>(k)] / R;
    rep.mean_l1[static_cast<size_t>(k)] = mean;
    if (replicas > 1) {
      const double var =
          std::max(0.0, (l1sq[static_cast<size_t>(k)] - R * mean * mean) / (R - 1.0));
      rep.stderr_l1[static_cast<size_t>(k)] = std::sqrt(var / R);
    }
    rep.coalesced_fraction[static_cast<size_t>(k)] /= R;
  }

  // Envelopes from the interdependence matrix.
  const CoefficientMatrix cm = coefficient_matrix(m, d);
  rep.r = cm.r;
  Eigen::VectorXd d0(n);
  if (start == StartMode::kStationary) {
    // E_mu d(x0^i, y^i) from the stationary marginals.
    const int A = m.local_alphabet();
    d0.setZero();
    for (uint64_t idx = 0; idx < mu.size(); ++idx) {
      const Configuration cfg = config_from_index(idx, n, A);
      for (int i = 0; i < n; ++i)
        d0(i) += mu[idx] * site_distance(m, d, x0.values[static_cast<size_t>(i)],
                                         cfg.values[static_cast<size_t>(i)]);
    }
  } else {
    for (int i = 0; i < n; ++i)
      d0(i) = site_distance(m, d, x0.values[static_cast<size_t>(i)],
                            y0.values[static_cast<size_t>(i)]);
  }
  const Eigen::MatrixXd Q = q_product(cm.C).Q;
  Eigen::VectorXd env = d0;
  const double dmax = d0.maxCoeff();
  rep.bound_thm23.assign(static_cast<size_t>(rows), 0.0);
  rep.bound_qk.assign(static_cast<size_t>(rows), 0.0);
  double rk = 1.0;
  for (long k = 0; k < rows; ++k) {
    rep.bound_thm23[static_cast<size_t>(k)] = n * rk * dmax;
    rep.bound_qk[static_cast<size_t>(k)] = env.sum();
    rk *= cm.r;
    env = Q * env;
  }
  return rep;
}

MarginalCheck marginal_validity_check(const ConditionalModel& m, const Configuration& x,
                                      const Configuration& y, int site, uint64_t draws,
                                      const GroundMetric& d, uint64_t master) {
  if (draws < 100) throw std::invalid_argument("marginal_validity_check: too few draws");
  const Distribution1D law_x = conditional_distribution(m, site, x);
  const Distribution1D law_y = conditional_distribution(m, site, y);
  MarginalCheck out;
  out.draws = draws;
  if (law_x.kind == DistKind::kFinitePmf) {
    std::vector<uint64_t> counts(law_x.probs.size(), 0);
    for (uint64_t rep = 0; rep < draws; ++rep) {
      SubStream stream =
          substream(master, Lane::kMarginal, rep, 0, static_cast<uint64_t>(site));
      const auto [va, vb] = optimal_coupling_sample(law_x, law_y, d, stream);
      (void)vb;
      ++counts[static_cast<size_t>(static_cast<int>(va))];
    }
    // Pearson chi^2; cells with tiny expectation are pooled.
    double stat = 0.0;
    int used = 0;
    double pool_exp = 0.0;
    uint64_t pool_cnt = 0;
    for (size_t s = 0; s < counts.size(); ++s) {
      const double expd = law_x.probs[s] * static_cast<double>(draws);
      if (expd < 5.0) {
        pool_exp += expd;
        pool_cnt += counts[s];
        continue;
      }
      const double diff = static_cast<double>(counts[s]) - expd;
      stat += diff * diff / expd;
      ++used;
    }
    if (pool_exp > 0.0) {
      if (pool_exp >= 1e-9) {
        const double diff = static_cast<double>(pool_cnt) - pool_exp;
        stat += diff * diff / pool_exp;
        ++used;
      } else if (pool_cnt > 0) {
        // mass where there should be (essentially) none
        out.test = "chi2";
        out.stat = std::numeric_limits<double>::infinity();
        out.p_value = 0.0;
        return out;
      }
    }
    out.test = "chi2";
    out.stat = stat;
    out.p_value = used > 1 ? chi2_sf(stat, used - 1) : 1.0;
    return out;
  }
  std::vector<double> sample(draws);
  for (uint64_t rep = 0; rep < draws; ++rep) {
    SubStream stream = substream(master, Lane::kMarginal, rep, 0, static_cast<uint64_t>(site));
    sample[rep] = optimal_coupling_sample(law_x, law_y, d, stream).first;
  }
  std::sort(sample.begin(), sample.end());
  double dstat = 0.0;
  const double nn = static_cast<double>(draws);
  for (uint64_t i = 0; i < draws; ++i) {
    const double f = normal_cdf((sample[i] - law_x.mean) / law_x.sd);
    dstat = std::max(dstat, std::max(f - static_cast<double>(i) / nn,
                                     static_cast<double>(i + 1) / nn - f));
  }
  out.test = "ks";
  out.stat = dstat;
  out.p_value = ks_sf(dstat, draws);
  return out;
}

}  // namespace dobgibbs
