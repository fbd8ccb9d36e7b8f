#pragma once
#include <cstdint>
#include <utility>

namespace dobgibbs {

// Standard normal CDF.
double normal_cdf(double x);

// Standard normal quantile (Wichura's PPND16 rational approximation,
// |error| < 1e-15 over (0,1)).  Throws std::domain_error outside (0,1).
double normal_quantile(double p);

// Regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Chi-squared survival function with `dof` degrees of freedom.
double chi2_sf(double stat, double dof);

// Asymptotic Kolmogorov-Smirnov survival function for the one-sample
// statistic D with n observations (Stephens' small-sample correction).
double ks_sf(double d_stat, uint64_t n);

// Wilson score interval for a binomial proportion, returns {lo, hi}.
std::pair<double, double> wilson_interval(uint64_t count, uint64_t trials,
                                          double z = 1.959963984540054);

// E|Y - c| for Y ~ N(mean, sd^2).
double gaussian_mean_abs_dev(double mean, double sd, double c);

}  // namespace dobgibbs
