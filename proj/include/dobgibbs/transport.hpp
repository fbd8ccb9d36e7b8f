#pragma once
#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

#include "dobgibbs/core.hpp"
#include "dobgibbs/models.hpp"
#include "dobgibbs/rng.hpp"

namespace dobgibbs {

// W1 under the discrete metric = half the total variation distance.
double w1_discrete_metric(const std::vector<double>& p, const std::vector<double>& q);

// W1 on the real line = integral |F_a - F_b|.  Exact piecewise sum for two
// finite laws, closed form |mean difference| for equal-sd gaussians,
// breakpoint-split adaptive Simpson otherwise.
double w1_real_line(const Distribution1D& a, const Distribution1D& b);

// Dispatches on the ground metric.  Discrete requires finite laws on a
// common atom set.
double w1_distance(const Distribution1D& a, const Distribution1D& b,
                   const GroundMetric& d);

// One draw from a W1-optimal coupling of (a, b): maximal coupling under the
// discrete metric (diagonal-preserving: equal laws give equal draws),
// comonotone shared-uniform coupling on the line.  Returns local states
// (symbol indices for finite laws, reals for gaussians).
std::pair<double, double> optimal_coupling_sample(const Distribution1D& a,
                                                  const Distribution1D& b,
                                                  const GroundMetric& d,
                                                  SubStream& stream);

struct TransportPlan {
  struct Cell {
    int src;
    int dst;
    double mass;
  };
  std::vector<Cell> support;
  double cost = 0.0;
  std::vector<double> dual_u;  // one per source point
  std::vector<double> dual_v;  // one per destination point
  // Optimality certificate: primal cost minus dual objective, worst dual
  // feasibility violation max(u_i + v_j - c_ij, 0) over massive rows/cols,
  // and worst marginal residual.
  double dual_gap = 0.0;
  double max_dual_violation = 0.0;
  double max_marginal_residual = 0.0;
};

using CostFn = std::function<double(int, int)>;

// Exact optimal transport between finite measures via successive shortest
// paths with node potentials (uncapacitated bipartite min-cost flow).  Costs
// must be nonnegative and finite; they are evaluated on demand so callers can
// defer large cost matrices.  The plan carries its own optimality
// certificate; a dual gap above 1e-9*(1+max cost) throws.
TransportPlan exact_ot_finite(const CostFn& cost, int n_src, int n_dst,
                              const std::vector<double>& p, const std::vector<double>& q);
TransportPlan exact_ot_finite(const Eigen::MatrixXd& cost, const std::vector<double>& p,
                              const std::vector<double>& q);

// Kantorovich duality cross-check for a metric cost on a common n-point
// space: builds a 1-Lipschitz witness f by inf-convolution seeded from the
// plan's duals and returns cost(plan) - sum_i f_i (p_i - q_i) >= 0, which is
// ~0 exactly when the plan is optimal.  Throws if the witness ever exceeds
// the primal value beyond rounding (an impossible certificate).
double kantorovich_dual_check(const TransportPlan& plan, const std::vector<double>& p,
                              const std::vector<double>& q, const CostFn& cost, int n);

}  // namespace dobgibbs
