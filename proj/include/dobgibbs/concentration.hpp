#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "dobgibbs/core.hpp"
#include "dobgibbs/models.hpp"
#include "dobgibbs/observables.hpp"

namespace dobgibbs {

struct ConcentrationBoundParams {
  uint64_t n = 1;    // sweeps averaged over
  int n_sites = 1;   // N
  double r1 = 0.0;   // max column sum of C
  double c1 = 0.25;  // T1 constant of the conditionals (squared-distance units)
  double alpha = 1.0;  // ||f||_Lip under the L1 configuration metric
  double r = 0.0;      // max row sum (part (b) bias only)
  double m_bias = 0.0; // bias constant M (part (b) centering only)
};

// Gaussian tail bound for the sweep-averaged empirical mean:
//   exp{ -t^2 (1-2 r1)^2 n / (2 C1 alpha^2 N) }.
// AssumptionError when r1 >= 1/2 (outside the proven regime).
double tail_bound(const ConcentrationBoundParams& p, double t);

// Canonical T1 constant of the conditional laws: 1/4 for the discrete metric
// (Pinsker/Hoeffding), max_i sigma_i^2 for gaussian conditionals, and
// (support span)^2/4 for bounded finite atoms under |x - y|.
double default_c1(const ConditionalModel& m, const GroundMetric& d);

// Bias constant M = r/(1-r) * max_i E_mu d(x^i, y^i) * sum_i deltas_i(f).
// Exact when the stationary law is computable (finite enumeration, i.i.d.
// free sites, or a consistent gaussian system); otherwise estimated from an
// equilibrated run with a batch-means standard error.
struct BiasConstant {
  double value = 0.0;
  bool exact = true;
  double stderr_ = 0.0;
};

BiasConstant bias_constant(const ConditionalModel& m, const LipschitzProfile& profile,
                           double r, const Configuration& x, const GroundMetric& d,
                           uint64_t master = 1, uint64_t cap = 4096);

enum class CenteringPart { kPartA, kPartB };

struct TailPoint {
  double t = 0.0;
  uint64_t tail_count = 0;
  double tail_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double bound_a = 0.0;
  double bound_b = 0.0;
};

struct TailReport {
  std::vector<TailPoint> points;
  ConcentrationBoundParams params;
  CenteringPart part = CenteringPart::kPartA;
  double centering = 0.0;  // value subtracted from the running mean
  bool centering_exact = true;
  double centering_stderr = 0.0;
  uint64_t replicas = 0;
};

// Tail frequencies of (1/n) sum_k f(Z_k) against the closed-form bound.
// Part (a) centers at (1/n) sum_k P^k f(x0); part (b) at mu(f) + M/n.  Both
// centerings are computed exactly on finite/free/linear-gaussian structure
// and fall back to a flagged auxiliary Monte Carlo estimate otherwise.
TailReport empirical_tail(const ConditionalModel& m, const Observable& f,
                          const Configuration& x0, uint64_t n,
                          const std::vector<double>& t_grid, uint64_t replicas,
                          CenteringPart part, double c1, const GroundMetric& d,
                          uint64_t master, int threads = 1, uint64_t cap = 4096);

// Deterministic part-(b) centering identity on enumerable models:
//   |(1/n) sum_{k<=n} P^k f(x0) - mu(f)| <= M/n.
struct CesaroBias {
  double cesaro_mean = 0.0;
  double mu_f = 0.0;
  double bias = 0.0;
  double m_over_n = 0.0;
};

CesaroBias cesaro_bias_check(const ConditionalModel& m, const Observable& f,
                             const Configuration& x0, uint64_t n, const GroundMetric& d,
                             uint64_t cap = 4096);

// Bobkov-Gotze style transportation test on the one-sweep law P(x0, .):
// log E exp{lambda (F - <F>)} <= lambda^2 C ||F||^2 / 2 at each grid lambda.
struct MgfPoint {
  double lambda = 0.0;
  double log_mgf = 0.0;
  double bound = 0.0;
  double margin = 0.0;   // bound - log_mgf
  double stderr_ = 0.0;  // delta-method error of log_mgf
  bool stable = true;
};

struct MgfReport {
  std::vector<MgfPoint> points;
  double mean_f = 0.0;
  bool mean_exact = true;
  double c_t1 = 0.0;
  double lip = 0.0;
  uint64_t draws = 0;
};

MgfReport t1_mgf_check(const ConditionalModel& m, const Observable& F,
                       const Configuration& x0, const std::vector<double>& lambda_grid,
                       double c_t1, uint64_t draws, uint64_t master, int threads = 1,
                       uint64_t cap = 4096);

}  // namespace dobgibbs
