#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "dobgibbs/core.hpp"
#include "dobgibbs/models.hpp"

namespace dobgibbs {

// Experiment description shared by all subcommands.  Parsed from the same
// line-oriented `key value...` grammar as model files; the model is given
// either inline (model grammar keys directly in the file) or via
// `model <path>` relative to the config file.  Unknown keys are rejected.
struct ExperimentConfig {
  ConditionalModel model;
  GroundMetric metric;
  bool metric_overridden = false;

  std::string observable = "site_average";
  std::string x0 = "all_zero";
  std::string y0 = "all_plus";  // second chain start; "stationary" draws from mu

  uint64_t k_max = 20;
  uint64_t n = 100;          // sweeps averaged by `concentrate`
  uint64_t replicas = 10000;
  uint64_t draws = 100000;   // one-sweep draws for the MGF check
  std::vector<double> t_grid;
  std::vector<double> lambda_grid;
  std::string part = "a";    // concentration centering: "a" or "b"
  double c1 = -1.0;          // < 0: use default_c1(model, metric)
  double c_t1 = -1.0;        // < 0: use N*C1/(1-r1)^2
  uint64_t cap = 4096;       // enumeration ceiling for exact computations

  uint64_t seed = 0;  // master seed; always explicit in outputs
  int threads = 0;    // 0: DOBRUSHIN_GIBBS_THREADS env, else 1

  uint64_t config_hash = 0;  // over the canonical dump (model + parameters)
};

// Canonical text rendering of the semantic content (model + experiment
// parameters, fixed order, 17-digit numbers).  The config hash is the FNV-1a
// of this dump, so equivalent configs hash equal regardless of formatting.
std::string canonical_dump(const ExperimentConfig& cfg);

ExperimentConfig parse_experiment_text(const std::string& text,
                                       const std::string& base_dir);
ExperimentConfig parse_experiment_file(const std::string& path);

}  // namespace dobgibbs
