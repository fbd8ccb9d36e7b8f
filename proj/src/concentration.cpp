#include "dobgibbs/concentration.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "dobgibbs/dobrushin.hpp"
#include "dobgibbs/kernel_exact.hpp"
#include "dobgibbs/sampler.hpp"
#include "dobgibbs/stats.hpp"
#include "dobgibbs/util.hpp"

namespace dobgibbs {

double tail_bound(const ConcentrationBoundParams& p, double t) {
  if (!(p.c1 > 0.0) || !(p.alpha > 0.0) || p.n < 1 || p.n_sites < 1)
    throw std::invalid_argument("tail_bound: invalid parameters");
  if (!(p.r1 >= 0.0) || p.r1 >= 0.5)
    throw AssumptionError("tail_bound requires r1 < 1/2");
  if (t <= 0.0) return 1.0;
  const double g = 1.0 - 2.0 * p.r1;
  const double expo = t * t * g * g * static_cast<double>(p.n) /
                      (2.0 * p.c1 * p.alpha * p.alpha * static_cast<double>(p.n_sites));
  return std::exp(-expo);
}

double default_c1(const ConditionalModel& m, const GroundMetric& d) {
  if (d.kind == MetricKind::kDiscrete) return 0.25;
  if (m.kind == ModelKind::kGaussianLinear) {
    double s = 0.0;
    for (int i = 0; i < m.n_sites; ++i) s = std::max(s, m.sigma(i));
    return s * s;
  }
  if (m.kind == ModelKind::kFree && m.site_law.kind == DistKind::kGaussian)
    return m.site_law.sd * m.site_law.sd;
  const std::vector<double> atoms = m.atom_values();
  const double span = atoms.back() - atoms.front();
  return span * span / 4.0;
}

namespace {

// Joint gaussian consistent with the conditional system, when one exists:
// precision L_ii = 1/s_i^2, L_ij = -A_ij/s_i^2 must come out symmetric and
// positive definite.
struct GaussianJoint {
  bool ok = false;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

GaussianJoint gaussian_joint(const ConditionalModel& m) {
  GaussianJoint j;
  if (m.kind != ModelKind::kGaussianLinear) return j;
  const int n = m.n_sites;
  Eigen::MatrixXd L(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      L(i, k) = (i == k ? 1.0 : -m.mean_coeff(i, k)) / (m.sigma(i) * m.sigma(i));
  if ((L - L.transpose()).cwiseAbs().maxCoeff() > 1e-9 * L.cwiseAbs().maxCoeff()) return j;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (L + L.transpose()));
  if (es.eigenvalues().minCoeff() <= 0.0) return j;
  j.ok = true;
  j.cov = es.operatorInverseSqrt() * es.operatorInverseSqrt();
  j.mean = (Eigen::MatrixXd::Identity(n, n) - m.mean_coeff).partialPivLu().solve(m.field);
  return j;
}

double site_displacement_free(const ConditionalModel& m, const GroundMetric& d, double xi) {
  const Distribution1D& law = m.site_law;
  if (law.kind == DistKind::kGaussian) {
    if (d.kind == MetricKind::kDiscrete)
      throw AssumptionError("discrete metric is not available on a continuous state space");
    return gaussian_mean_abs_dev(law.mean, law.sd, xi);
  }
  double e = 0.0;
  for (size_t s = 0; s < law.probs.size(); ++s)
    e += law.probs[s] * site_distance(m, d, xi, static_cast<double>(s));
  return e;
}

}  // namespace

BiasConstant bias_constant(const ConditionalModel& m, const LipschitzProfile& profile,
                           double r, const Configuration& x, const GroundMetric& d,
                           uint64_t master, uint64_t cap) {
  if (!(r >= 0.0) || r >= 1.0) throw AssumptionError("bias_constant requires r < 1");
  if (static_cast<int>(profile.deltas.size()) != m.n_sites)
    throw std::invalid_argument("bias_constant: profile length mismatch");
  BiasConstant out;
  if (r == 0.0) return out;  // M = 0, exact

  double dmax = 0.0;
  bool exact = true;
  double dmax_stderr = 0.0;
  if (m.kind == ModelKind::kFree) {
    for (int i = 0; i < m.n_sites; ++i)
      dmax = std::max(dmax,
                      site_displacement_free(m, d, x.values[static_cast<size_t>(i)]));
  } else if (m.finite_sites()) {
    const std::vector<double> mu = exact_gibbs_measure(m, cap);
    const int A = m.local_alphabet();
    for (int i = 0; i < m.n_sites; ++i) {
      double e = 0.0;
      for (uint64_t idx = 0; idx < mu.size(); ++idx)
        e += mu[idx] * site_distance(m, d, x.values[static_cast<size_t>(i)],
                                     config_from_index(idx, m.n_sites, A)
                                         .values[static_cast<size_t>(i)]);
      dmax = std::max(dmax, e);
    }
  } else if (const GaussianJoint j = gaussian_joint(m); j.ok) {
    for (int i = 0; i < m.n_sites; ++i)
      dmax = std::max(dmax, gaussian_mean_abs_dev(j.mean(i), std::sqrt(j.cov(i, i)),
                                                  x.values[static_cast<size_t>(i)]));
  } else {
    // Equilibrated-run estimate with batch-means error.
    exact = false;
    const uint64_t burnin = 2000, samples = 20000, batches = 20;
    Configuration z = x;
    for (uint64_t k = 1; k <= burnin; ++k) z = gibbs_sweep(m, z, master, 0, k);
    std::vector<double> site_sum(static_cast<size_t>(m.n_sites), 0.0);
    Eigen::MatrixXd batch_mean(static_cast<long>(batches), m.n_sites);
    batch_mean.setZero();
    const uint64_t per_batch = samples / batches;
    for (uint64_t s = 0; s < samples; ++s) {
      z = gibbs_sweep(m, z, master, 0, burnin + 1 + s);
      for (int i = 0; i < m.n_sites; ++i) {
        const double di = site_distance(m, d, x.values[static_cast<size_t>(i)],
                                        z.values[static_cast<size_t>(i)]);
        site_sum[static_cast<size_t>(i)] += di;
        batch_mean(static_cast<long>(s / per_batch), i) += di / static_cast<double>(per_batch);
      }
    }
    int argmax = 0;
    for (int i = 0; i < m.n_sites; ++i) {
      site_sum[static_cast<size_t>(i)] /= static_cast<double>(samples);
      if (site_sum[static_cast<size_t>(i)] > site_sum[static_cast<size_t>(argmax)]) argmax = i;
    }
    dmax = site_sum[static_cast<size_t>(argmax)];
    const auto col = batch_mean.col(argmax);
    const double bm = col.mean();
    dmax_stderr = std::sqrt((col.array() - bm).square().sum() /
                            (static_cast<double>(batches) - 1.0) /
                            static_cast<double>(batches));
  }

  const double factor = r / (1.0 - r) * profile.sum_deltas;
  out.value = factor * dmax;
  out.exact = exact;
  out.stderr_ = factor * dmax_stderr;
  return out;
}

namespace {

struct CenterValue {
  double value = 0.0;
  bool exact = true;
  double stderr_ = 0.0;
};

// Sweep-mean recursion for linear observables on the linear gaussian model:
// expectations propagate exactly through sequential linear updates.
double gaussian_linear_sweep_mean(const ConditionalModel& m, const Observable& f,
                                  const Configuration& x0, uint64_t n, bool cesaro) {
  Eigen::VectorXd mean(m.n_sites);
  for (int i = 0; i < m.n_sites; ++i) mean(i) = x0.values[static_cast<size_t>(i)];
  double acc = 0.0;
  double last = 0.0;
  for (uint64_t k = 1; k <= n; ++k) {
    for (int i = 0; i < m.n_sites; ++i) {
      double mi = m.field(i);
      for (int j = 0; j < m.n_sites; ++j)
        if (j != i) mi += m.mean_coeff(i, j) * mean(j);
      mean(i) = mi;
    }
    double v = 0.0;
    for (int i = 0; i < m.n_sites; ++i)
      v += f.linear_coeffs[static_cast<size_t>(i)] * mean(i);
    acc += v;
    last = v;
  }
  return cesaro ? acc / static_cast<double>(n) : last;
}

CenterValue part_a_centering(const ConditionalModel& m, const Observable& f,
                             const Configuration& x0, uint64_t n, uint64_t replicas,
                             uint64_t master, uint64_t cap, int threads) {
  CenterValue c;
  if (m.kind == ModelKind::kFree) {
    if (f.product_mean) {
      c.value = f.product_mean(m.site_law, m.n_sites);  // P^k f(x0) = mu(f), k >= 1
      return c;
    }
  } else if (m.finite_sites()) {
    std::vector<double> nu(state_space_size(m.n_sites, m.local_alphabet(), cap), 0.0);
    nu[config_index(x0, m.local_alphabet())] = 1.0;
    double acc = 0.0;
    for (uint64_t k = 1; k <= n; ++k) {
      nu = sweep_distribution(m, nu, cap);
      acc += expect_under(m, nu, f.f);
    }
    c.value = acc / static_cast<double>(n);
    return c;
  } else if (m.kind == ModelKind::kGaussianLinear && !f.linear_coeffs.empty()) {
    c.value = gaussian_linear_sweep_mean(m, f, x0, n, /*cesaro=*/true);
    return c;
  }
  // Auxiliary Monte Carlo estimate on a separate stream lane.
  c.exact = false;
  const uint64_t aux = std::max<uint64_t>(replicas, 10000);
  const uint64_t aux_master = mix64(master + static_cast<uint64_t>(Lane::kAux));
  std::vector<double> sums, sqs;
  const uint64_t block = 64;
  const uint64_t n_blocks = (aux + block - 1) / block;
  sums.assign(n_blocks, 0.0);
  sqs.assign(n_blocks, 0.0);
  parallel_blocks(aux, block, threads, [&](uint64_t bi, uint64_t begin, uint64_t end) {
    for (uint64_t rep = begin; rep < end; ++rep) {
      Configuration z = x0;
      double acc = 0.0;
      for (uint64_t k = 1; k <= n; ++k) {
        z = gibbs_sweep(m, z, aux_master, rep, k);
        acc += f.f(z);
      }
      acc /= static_cast<double>(n);
      sums[bi] += acc;
      sqs[bi] += acc * acc;
    }
  });
  double s = 0.0, s2 = 0.0;
  for (uint64_t bi = 0; bi < n_blocks; ++bi) {
    s += sums[bi];
    s2 += sqs[bi];
  }
  const double R = static_cast<double>(aux);
  c.value = s / R;
  c.stderr_ = std::sqrt(std::max(0.0, (s2 - R * c.value * c.value) / (R - 1.0)) / R);
  return c;
}

CenterValue stationary_mean(const ConditionalModel& m, const Observable& f,
                            uint64_t master, uint64_t cap) {
  CenterValue c;
  if (m.kind == ModelKind::kFree && f.product_mean) {
    c.value = f.product_mean(m.site_law, m.n_sites);
    return c;
  }
  if (m.finite_sites()) {
    c.value = expect_under(m, exact_gibbs_measure(m, cap), f.f);
    return c;
  }
  if (m.kind == ModelKind::kGaussianLinear && !f.linear_coeffs.empty()) {
    if (const GaussianJoint j = gaussian_joint(m); j.ok) {
      for (int i = 0; i < m.n_sites; ++i)
        c.value += f.linear_coeffs[static_cast<size_t>(i)] * j.mean(i);
      return c;
    }
  }
  // Long equilibrated run.
  c.exact = false;
  const uint64_t burnin = 2000, samples = 40000, batches = 20;
  const uint64_t aux_master = mix64(master + static_cast<uint64_t>(Lane::kAux) + 17);
  Configuration z = make_configuration(m, "all_zero");
  for (uint64_t k = 1; k <= burnin; ++k) z = gibbs_sweep(m, z, aux_master, 0, k);
  std::vector<double> batch(batches, 0.0);
  const uint64_t per_batch = samples / batches;
  double acc = 0.0;
  for (uint64_t s = 0; s < samples; ++s) {
    z = gibbs_sweep(m, z, aux_master, 0, burnin + 1 + s);
    const double v = f.f(z);
    acc += v;
    batch[s / per_batch] += v / static_cast<double>(per_batch);
  }
  c.value = acc / static_cast<double>(samples);
  double bm = 0.0;
  for (double b : batch) bm += b / static_cast<double>(batches);
  double var = 0.0;
  for (double b : batch) var += (b - bm) * (b - bm);
  c.stderr_ = std::sqrt(var / (static_cast<double>(batches) - 1.0) /
                        static_cast<double>(batches));
  return c;
}

}  // namespace

TailReport empirical_tail(const ConditionalModel& m, const Observable& f,
                          const Configuration& x0, uint64_t n,
                          const std::vector<double>& t_grid, uint64_t replicas,
                          CenteringPart part, double c1, const GroundMetric& d,
                          uint64_t master, int threads, uint64_t cap) {
  if (replicas < 1000)
    throw std::invalid_argument("empirical_tail: need at least 1000 replicas");
  if (n < 1 || t_grid.empty())
    throw std::invalid_argument("empirical_tail: need n >= 1 and a t grid");
  const int nthreads = resolve_threads(threads);

  const CoefficientMatrix cm = coefficient_matrix(m, d, cap);
  TailReport rep;
  rep.part = part;
  rep.replicas = replicas;
  rep.params.n = n;
  rep.params.n_sites = m.n_sites;
  rep.params.r1 = cm.r1;
  rep.params.c1 = c1;
  rep.params.alpha = f.profile.lip_norm;
  rep.params.r = cm.r;

  const BiasConstant M = bias_constant(m, f.profile, cm.r, x0, d, master, cap);
  rep.params.m_bias = M.value;
  if (part == CenteringPart::kPartA) {
    const CenterValue c = part_a_centering(m, f, x0, n, replicas, master, cap, nthreads);
    rep.centering = c.value;
    rep.centering_exact = c.exact;
    rep.centering_stderr = c.stderr_;
  } else {
    const CenterValue c = stationary_mean(m, f, master, cap);
    rep.centering = c.value + M.value / static_cast<double>(n);
    rep.centering_exact = c.exact && M.exact;
    rep.centering_stderr = std::hypot(c.stderr_, M.stderr_ / static_cast<double>(n));
  }

  const uint64_t block = 64;
  const uint64_t n_blocks = (replicas + block - 1) / block;
  std::vector<std::vector<uint64_t>> counts(n_blocks,
                                            std::vector<uint64_t>(t_grid.size(), 0));
  const double center = rep.centering;
  parallel_blocks(replicas, block, nthreads, [&](uint64_t bi, uint64_t begin, uint64_t end) {
    for (uint64_t r = begin; r < end; ++r) {
      Configuration z = x0;
      double acc = 0.0;
      for (uint64_t k = 1; k <= n; ++k) {
        z = gibbs_sweep(m, z, master, r, k);
        acc += f.f(z);
      }
      const double dev = acc / static_cast<double>(n) - center;
      for (size_t ti = 0; ti < t_grid.size(); ++ti)
        if (dev >= t_grid[ti]) ++counts[bi][ti];
    }
  });

  for (size_t ti = 0; ti < t_grid.size(); ++ti) {
    TailPoint pt;
    pt.t = t_grid[ti];
    for (uint64_t bi = 0; bi < n_blocks; ++bi) pt.tail_count += counts[bi][ti];
    pt.tail_hat = static_cast<double>(pt.tail_count) / static_cast<double>(replicas);
    const auto [lo, hi] = wilson_interval(pt.tail_count, replicas);
    pt.ci_lo = lo;
    pt.ci_hi = hi;
    pt.bound_a = tail_bound(rep.params, pt.t);
    pt.bound_b = pt.bound_a;  // parts (a) and (b) share the same right-hand side
    rep.points.push_back(pt);
  }
  return rep;
}

CesaroBias cesaro_bias_check(const ConditionalModel& m, const Observable& f,
                             const Configuration& x0, uint64_t n, const GroundMetric& d,
                             uint64_t cap) {
  if (!m.finite_sites())
    throw AssumptionError("cesaro_bias_check needs an enumerable model");
  if (n < 1) throw std::invalid_argument("cesaro_bias_check: n >= 1");
  CesaroBias out;
  std::vector<double> nu(state_space_size(m.n_sites, m.local_alphabet(), cap), 0.0);
  nu[config_index(x0, m.local_alphabet())] = 1.0;
  double acc = 0.0;
  for (uint64_t k = 1; k <= n; ++k) {
    nu = sweep_distribution(m, nu, cap);
    acc += expect_under(m, nu, f.f);
  }
  out.cesaro_mean = acc / static_cast<double>(n);
  out.mu_f = expect_under(m, exact_gibbs_measure(m, cap), f.f);
  out.bias = std::fabs(out.cesaro_mean - out.mu_f);
  const CoefficientMatrix cm = coefficient_matrix(m, d, cap);
  const BiasConstant M = bias_constant(m, f.profile, cm.r, x0, d, 1, cap);
  out.m_over_n = M.value / static_cast<double>(n);
  return out;
}

MgfReport t1_mgf_check(const ConditionalModel& m, const Observable& F,
                       const Configuration& x0, const std::vector<double>& lambda_grid,
                       double c_t1, uint64_t draws, uint64_t master, int threads,
                       uint64_t cap) {
  if (draws < 10000) throw std::invalid_argument("t1_mgf_check: need at least 1e4 draws");
  if (!(c_t1 > 0.0)) throw std::invalid_argument("t1_mgf_check: C must be > 0");
  MgfReport rep;
  rep.c_t1 = c_t1;
  rep.lip = F.profile.lip_norm;
  rep.draws = draws;

  // One-sweep sample of F under P(x0, .).
  std::vector<double> fv(draws);
  parallel_blocks(draws, 256, resolve_threads(threads),
                  [&](uint64_t, uint64_t begin, uint64_t end) {
                    for (uint64_t r = begin; r < end; ++r)
                      fv[r] = F.f(gibbs_sweep(m, x0, master, r, 1));
                  });

  if (m.kind == ModelKind::kFree && F.product_mean) {
    rep.mean_f = F.product_mean(m.site_law, m.n_sites);
  } else if (m.finite_sites()) {
    std::vector<double> nu(state_space_size(m.n_sites, m.local_alphabet(), cap), 0.0);
    nu[config_index(x0, m.local_alphabet())] = 1.0;
    rep.mean_f = expect_under(m, sweep_distribution(m, nu, cap), F.f);
  } else if (m.kind == ModelKind::kGaussianLinear && !F.linear_coeffs.empty()) {
    rep.mean_f = gaussian_linear_sweep_mean(m, F, x0, 1, /*cesaro=*/false);
  } else {
    rep.mean_exact = false;
    double s = 0.0;
    for (double v : fv) s += v;
    rep.mean_f = s / static_cast<double>(draws);
  }

  for (double lambda : lambda_grid) {
    MgfPoint pt;
    pt.lambda = lambda;
    double sum = 0.0, sumsq = 0.0, maxterm = 0.0, maxexp = 0.0;
    for (double v : fv) {
      const double e = lambda * (v - rep.mean_f);
      maxexp = std::max(maxexp, e);
      const double term = std::exp(e);
      sum += term;
      sumsq += term * term;
      maxterm = std::max(maxterm, term);
    }
    const double R = static_cast<double>(draws);
    const double mean = sum / R;
    pt.log_mgf = std::log(mean);
    pt.bound = 0.5 * lambda * lambda * c_t1 * rep.lip * rep.lip;
    pt.margin = pt.bound - pt.log_mgf;
    const double var = std::max(0.0, (sumsq - R * mean * mean) / (R - 1.0));
    pt.stderr_ = std::sqrt(var / R) / mean;
    pt.stable = maxexp <= 30.0 && maxterm <= 0.02 * sum;
    rep.points.push_back(pt);
  }
  return rep;
}

}  // namespace dobgibbs
