#pragma once
#include <Eigen/Dense>
#include <string>
#include <vector>

#include "dobgibbs/core.hpp"
#include "dobgibbs/models.hpp"

namespace dobgibbs {

// One systematic scan: sites updated in ascending order, site i drawing from
// mu_i(.|current).  Site i of sweep k consumes exactly one uniform from the
// (master, chain-lane, replica, k, i) substream, so any update is
// reconstructible in isolation.
Configuration gibbs_sweep(const ConditionalModel& m, Configuration x, uint64_t master,
                          uint64_t replica, uint64_t sweep);

// Z_0 = x0 and k_max further sweeps; returns k_max+1 states.
std::vector<Configuration> run_chain(const ConditionalModel& m, const Configuration& x0,
                                     uint64_t k_max, uint64_t master, uint64_t replica);

// Two chains advanced through one sweep with each site update drawn from the
// W1-optimal coupling of the two conditionals (maximal for the discrete
// metric, comonotone on the line).  Shares the plain chain's substreams, and
// preserves equality: x == y stays coupled forever.
std::pair<Configuration, Configuration> coupled_sweep(const ConditionalModel& m,
                                                      const Configuration& x,
                                                      const Configuration& y,
                                                      const GroundMetric& d, uint64_t master,
                                                      uint64_t replica, uint64_t sweep);

struct CoupledTrajectory {
  // (k_max+1) x N per-site distances d(x^i, y^i) after each sweep.
  Eigen::MatrixXd site_distance;
  long coalesced_sweep = -1;  // first sweep with x == y, -1 if never
};

CoupledTrajectory run_coupled_chain(const ConditionalModel& m, const Configuration& x0,
                                    const Configuration& y0, uint64_t k_max,
                                    const GroundMetric& d, uint64_t master, uint64_t replica);

enum class StartMode {
  kFixed,       // both chains start at the given configurations
  kStationary,  // y0 drawn afresh from the exact stationary law per replica
};

// Monte Carlo estimate of the coupled-distance decay, with the two
// analytical envelopes: bound_thm23[k] = N * r^k * max_i E d(x0^i, y0^i) and
// bound_qk[k] = sum_i (Q^k d0)_i.
struct DecayReport {
  uint64_t replicas = 0;
  double r = 0.0;
  Eigen::MatrixXd mean_site;     // (k_max+1) x N
  std::vector<double> mean_l1;
  std::vector<double> stderr_l1;
  std::vector<double> bound_thm23;
  std::vector<double> bound_qk;
  std::vector<double> coalesced_fraction;
};

DecayReport estimate_w1_decay(const ConditionalModel& m, const Configuration& x0,
                              const Configuration& y0, StartMode start, uint64_t k_max,
                              uint64_t replicas, const GroundMetric& d, uint64_t master,
                              int threads = 1);

// Goodness-of-fit check that the first marginal of the coupled update at
// `site` matches the direct conditional mu_site(.|x): Pearson chi^2 for
// finite laws, KS for gaussian ones.
struct MarginalCheck {
  std::string test;
  double stat = 0.0;
  double p_value = 1.0;
  uint64_t draws = 0;
};

MarginalCheck marginal_validity_check(const ConditionalModel& m, const Configuration& x,
                                      const Configuration& y, int site, uint64_t draws,
                                      const GroundMetric& d, uint64_t master);

}  // namespace dobgibbs
