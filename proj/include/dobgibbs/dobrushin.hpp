#pragma once
#include <Eigen/Dense>

#include "dobgibbs/core.hpp"
#include "dobgibbs/models.hpp"

namespace dobgibbs {

// Interdependence matrix: c_ij bounds how strongly a change at site j can
// move the conditional law at site i, measured in W1 over the ground metric:
//   c_ij = sup { W1(mu_i(.|x), mu_i(.|y)) / d(x_j, y_j) : x = y off j }.
struct CoefficientMatrix {
  Eigen::MatrixXd C;
  double r = 0.0;   // max row sum  ||C||_inf
  double r1 = 0.0;  // max column sum  ||C||_1
};

// Exact coefficients.  Finite kinds enumerate interaction neighborhoods
// (ConfigError beyond `cap` states per neighborhood); the linear gaussian
// kind is analytic (c_ij = |A_ij|).  A deterministic spot check verifies
// that sites outside the detected neighborhoods really cannot move the
// conditionals.
CoefficientMatrix coefficient_matrix(const ConditionalModel& m, const GroundMetric& d,
                                     uint64_t cap = 4096);

struct DobrushinNorms {
  double r = 0.0;
  double r1 = 0.0;
  bool h1 = false;       // r  < 1
  bool h2 = false;       // r1 < 1
  bool h2_half = false;  // r1 < 1/2
};

DobrushinNorms dobrushin_norms(const Eigen::MatrixXd& C);

// B_i: identity with row i replaced by row i of C.
Eigen::MatrixXd update_matrix(const Eigen::MatrixXd& C, int i);

// One-sweep sensitivity product Q = B_{N-1} ... B_1 B_0 (site 0 applied
// first).  Column 0 of Q is exactly zero.
struct SweepProduct {
  Eigen::MatrixXd Q;
  double inf_norm = 0.0;
  double one_norm = 0.0;
};

SweepProduct q_product(const Eigen::MatrixXd& C);

// Entrywise closed form of the same product via the chain-sum recursion
//   W(k,h) = c_kh + sum_{h<m<k} c_km W(m,h),
//   Q_kj  = sum_{h<j} ( [h==k] + [h<k] W(k,h) ) c_hj,   Q_k0 = 0,
// memoized on (k,h).  Guarded to n <= 12 sites.
Eigen::MatrixXd q_closed_form(const Eigen::MatrixXd& C);

// Certificate for the two sweep-contraction norm bounds:
//   ||Q||_inf <= r            (meaningful when r  < 1)
//   ||Q||_1   <= r1/(1-r1)    (meaningful when r1 < 1)
// Margins are bound minus achieved value; `*_ok` applies the stated 1e-12
// slack and is reported true when the hypothesis fails (bound not claimed).
struct ContractionCertificate {
  int n = 0;
  DobrushinNorms norms;
  double inf_norm = 0.0;
  double one_norm = 0.0;
  double bound_inf = 0.0;
  double bound_one = 0.0;
  double margin_inf = 0.0;
  double margin_one = 0.0;
  bool inf_ok = true;
  bool one_ok = true;
};

ContractionCertificate contraction_certificate(const Eigen::MatrixXd& C);

// Coarse Ricci curvature lower bound (1-2*r1)/(1-r1); AssumptionError when
// r1 >= 1.
double ricci_lower_bound(double r1);

}  // namespace dobgibbs
