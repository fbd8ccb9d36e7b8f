#pragma once
#include <Eigen/Dense>
#include <string>
#include <vector>

#include "dobgibbs/core.hpp"
#include "dobgibbs/rng.hpp"

namespace dobgibbs {

enum class DistKind { kFinitePmf, kGaussian };

// Law of a single site (a conditional, or a free site's marginal).
struct Distribution1D {
  DistKind kind = DistKind::kFinitePmf;
  std::vector<double> probs;  // finite: pmf in symbol order
  std::vector<double> atoms;  // finite: atom positions, same length
  double mean = 0.0;          // gaussian
  double sd = 1.0;            // gaussian

  static Distribution1D finite(std::vector<double> probs, std::vector<double> atoms);
  static Distribution1D gaussian(double mean, double sd);

  // Right-continuous inverse CDF at u in (0,1); finite laws walk atoms in
  // symbol order, gaussians go through the normal quantile.  One uniform in,
  // one state out -- this is the only sampling transform in the toolkit.
  double quantile(double u) const;
  int quantile_index(double u) const;  // finite only: the symbol drawn

  double mean_value() const;
};

enum class ModelKind { kIsingGraph, kGaussianLinear, kFree, kFinitePotential };

// A specification of single-site conditionals mu_i(. | x) on a product
// space.  Symbol-valued kinds store configurations as 0-based symbols and
// carry an atom embedding (ising: spins -1,+1); real-valued kinds live on
// R^N directly.
struct ConditionalModel {
  ModelKind kind = ModelKind::kFree;
  int n_sites = 0;

  // ising: pairwise couplings J (symmetric, zero diagonal), external field h,
  // inverse temperature beta.  Conditional pmf over spins:
  //   P(s_i = s | x) ~ exp(beta * s * (sum_j J_ij s_j + h_i)).
  Eigen::MatrixXd coupling;
  Eigen::VectorXd field;  // doubles as the offset vector b for gaussian kind
  double beta = 1.0;

  // gaussian: x_i | rest ~ N(b_i + sum_j A_ij x_j, sigma_i^2), A_ii = 0.
  Eigen::MatrixXd mean_coeff;
  Eigen::VectorXd sigma;

  // free: one shared site law, sites independent.
  Distribution1D site_law;

  // potential: alphabet A, energy table V over all A^N configurations
  // (site 0 most significant), reference single-site weights pi.
  // mu(x) ~ prod_i pi[x_i] * exp(-V(x)).
  int alphabet_size = 2;
  std::vector<double> energy;
  std::vector<double> ref_weights;

  static ConditionalModel ising(Eigen::MatrixXd J, Eigen::VectorXd h, double beta);
  static ConditionalModel gaussian_linear(Eigen::MatrixXd A, Eigen::VectorXd b,
                                          Eigen::VectorXd sigma);
  static ConditionalModel free_sites(int n, Distribution1D law);
  static ConditionalModel finite_potential(int n, int alphabet,
                                           std::vector<double> energy,
                                           std::vector<double> ref_weights);

  StateKind state_kind() const;
  bool finite_sites() const { return state_kind() == StateKind::kSymbol; }
  int local_alphabet() const;           // symbol kinds only
  std::vector<double> atom_values() const;  // symbol -> position on the line
  GroundMetric default_metric() const;
};

// Distance between two local states, resolving symbols through the model's
// atom embedding when the metric is |.-.|.
double site_distance(const ConditionalModel& m, const GroundMetric& d,
                     double a, double b);
double config_distance(const ConditionalModel& m, const GroundMetric& d,
                       const Configuration& x, const Configuration& y);

// mu_i(. | x); reads only coordinates j != i.
Distribution1D conditional_distribution(const ConditionalModel& m, int i,
                                        const Configuration& x);

// One draw from mu_i(. | x), consuming exactly one uniform.  Returns the new
// local state (symbol index for finite kinds, a real otherwise).
double conditional_sample(const ConditionalModel& m, int i,
                          const Configuration& x, SubStream& stream);

// Sites j != i whose value can change mu_i; structural for ising/gaussian,
// exhaustive table scan for potential kind.
std::vector<int> neighborhood(const ConditionalModel& m, int i, uint64_t cap = 4096);
std::vector<std::vector<int>> interaction_neighborhoods(const ConditionalModel& m,
                                                        uint64_t cap = 4096);

// Exact stationary law over all A^N configurations (log-sum-exp normalized).
// Throws AssumptionError for real-valued kinds.
std::vector<double> exact_gibbs_measure(const ConditionalModel& m, uint64_t cap = 4096);

// Named starting points: "all_zero", "all_plus", or a whitespace-separated
// value list.
Configuration make_configuration(const ConditionalModel& m, const std::string& descriptor);

}  // namespace dobgibbs
