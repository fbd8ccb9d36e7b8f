#pragma once
#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "dobgibbs/core.hpp"
#include "dobgibbs/models.hpp"

namespace dobgibbs {

// Explicit one-sweep kernel on an enumerated finite state space.
struct TransitionMatrix {
  int n_sites = 0;
  int alphabet = 0;
  Eigen::MatrixXd P;  // S x S row-stochastic, mixed-radix config indexing
};

// Ordered product of the N single-site update kernels, assembled by pushing
// each row's mass site by site (never materializing the sparse factors).
// Rows parallelize deterministically.
TransitionMatrix build_transition_matrix(const ConditionalModel& m, uint64_t cap = 4096,
                                         int threads = 1);

// One sweep applied to a distribution (nu -> nu P) without forming P.
std::vector<double> sweep_distribution(const ConditionalModel& m,
                                       const std::vector<double>& nu, uint64_t cap = 4096);

// ||mu P - mu||_1.
double invariance_check(const TransitionMatrix& tm, const std::vector<double>& mu);

struct StationaryGap {
  uint64_t k = 0;
  double w1_exact = 0.0;  // W1 under the L1 configuration cost, by exact OT
  double tv_half = 0.0;   // (1/2) || delta_x0 P^k - mu ||_1
  double bound_nrk = 0.0; // N * r^k * max_i E_mu d(x0^i, y^i)
};

// Exact distance-to-stationarity profile of delta_{x0} P^k for k = 0..k_max.
// Costs are evaluated on demand from the configuration indices.
std::vector<StationaryGap> exact_w1_to_stationary(const ConditionalModel& m,
                                                  const std::vector<double>& mu,
                                                  const Configuration& x0, uint64_t k_max,
                                                  const GroundMetric& d, double r,
                                                  uint64_t cap = 4096);

double total_variation_to_stationary(const TransitionMatrix& tm,
                                     const std::vector<double>& mu, uint64_t x0_index,
                                     uint64_t k);

// Expectation of f under a distribution over the enumerated space.
double expect_under(const ConditionalModel& m, const std::vector<double>& dist,
                    const std::function<double(const Configuration&)>& f);

}  // namespace dobgibbs
