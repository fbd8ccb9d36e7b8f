#pragma once
#include <functional>
#include <string>

#include "dobgibbs/core.hpp"
#include "dobgibbs/models.hpp"

namespace dobgibbs {

// An observable together with its site-wise Lipschitz profile relative to
// the chosen ground metric (so ||f||_Lip(d_L1) = max_i deltas[i]).  The two
// optional hooks enable exact centerings where the structure allows it:
// `product_mean` gives E f under an i.i.d. product of a site law, and
// `linear_coeffs` is set when f(x) = sum_i w_i x_i on real-valued states.
struct Observable {
  std::string name;
  std::function<double(const Configuration&)> f;
  LipschitzProfile profile;
  std::function<double(const Distribution1D&, int)> product_mean;
  std::vector<double> linear_coeffs;
};

// Named observables:
//   site_average   (1/N) sum_i x_i over raw values (symbols or reals)
//   sum_values     sum_i x_i
//   mean_spin      (1/N) sum_i (2 x_i - 1), binary symbol models
//   sum_spins      sum_i (2 x_i - 1), binary symbol models
//   all_plus       indicator of every site at its top symbol
//   first_site     x_1
// Profiles are analytic; ConfigError for names/models that do not combine.
Observable make_observable(const std::string& name, const ConditionalModel& m,
                           const GroundMetric& d);

}  // namespace dobgibbs
