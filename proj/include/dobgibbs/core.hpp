#pragma once
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dobgibbs {

// Bad user input (model file, experiment config, CLI flags).  CLI exit 2.
struct ConfigError : std::runtime_error {
  std::string key;
  ConfigError(const std::string& msg, std::string k = "")
      : std::runtime_error(msg), key(std::move(k)) {}
};

// A required model assumption fails (e.g. contraction coefficient out of
// range for a requested bound).  CLI exit 3.
struct AssumptionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class StateKind { kSymbol, kReal };

enum class MetricKind { kDiscrete, kAbsoluteDifference };

// Single-site ground metric d.  Product configurations are always compared
// with the L1 aggregate sum_i d(x_i, y_i).
struct GroundMetric {
  MetricKind kind = MetricKind::kDiscrete;
  double operator()(double a, double b) const {
    if (kind == MetricKind::kDiscrete) return a == b ? 0.0 : 1.0;
    return a < b ? b - a : a - b;
  }
};

// A full configuration x = (x^1, ..., x^N).  Symbol-valued models store
// 0-based symbol indices; real-valued models store coordinates directly.
struct Configuration {
  StateKind kind = StateKind::kSymbol;
  std::vector<double> values;

  int size() const { return static_cast<int>(values.size()); }
  int symbol(int i) const { return static_cast<int>(values[static_cast<size_t>(i)]); }

  static Configuration symbols(std::vector<int> s);
  static Configuration reals(std::vector<double> v);

  bool operator==(const Configuration& o) const {
    return kind == o.kind && values == o.values;
  }
};

double l1_distance(const Configuration& x, const Configuration& y,
                   const GroundMetric& d);

// Site-wise Lipschitz profile of an observable: |f(x) - f(y)| <=
// sum_i deltas[i] * d(x_i, y_i) for configurations differing arbitrarily.
struct LipschitzProfile {
  std::vector<double> deltas;
  double lip_norm = 0.0;    // max_i deltas[i]
  double sum_deltas = 0.0;  // sum_i deltas[i]
};

// Validates a user-declared profile (finite, nonnegative entries).
LipschitzProfile lipschitz_profile_declared(std::vector<double> deltas);

// Mixed-radix index of a symbol configuration; site 0 is most significant.
uint64_t config_index(const Configuration& x, int alphabet);
Configuration config_from_index(uint64_t idx, int n_sites, int alphabet);
uint64_t state_space_size(int n_sites, int alphabet, uint64_t cap);

// Exact per-site oscillations of f over a finite product space by full
// enumeration: deltas[i] = max |f(x) - f(x with site i changed)| / d(.,.).
// f is evaluated on symbol configurations; `atoms` maps symbol s to its real
// position for the |.-.| metric (empty = identity embedding).  Throws
// ConfigError when the space exceeds `cap` states.
LipschitzProfile lipschitz_profile_bruteforce(
    const std::function<double(const Configuration&)>& f, int n_sites,
    int alphabet, const std::vector<double>& atoms, const GroundMetric& d,
    uint64_t cap = 4096);

}  // namespace dobgibbs
