#include "dobgibbs/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "dobgibbs/model_io.hpp"
#include "dobgibbs/util.hpp"

namespace dobgibbs {

namespace {

const std::set<std::string> kModelKeys = {"kind",  "n_sites", "beta",
                                          "edges", "field",   "A",
                                          "sigma", "alphabet", "potential_table"};

uint64_t parse_u64(const std::string& key, const std::string& text) {
  try {
    size_t pos = 0;
    if (!text.empty() && text[0] == '-') throw std::invalid_argument("negative");
    const uint64_t v = std::stoull(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("expected a non-negative integer, got '" + text + "'", key);
  }
}

double parse_real(const std::string& key, const std::string& text) {
  try {
    size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("expected a real number, got '" + text + "'", key);
  }
}

std::vector<double> parse_reals(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(parse_real(key, tok));
  if (out.empty()) throw ConfigError("expected at least one value", key);
  return out;
}

}  // namespace

ExperimentConfig parse_experiment_text(const std::string& text,
                                       const std::string& base_dir) {
  ExperimentConfig cfg;
  std::string model_path;
  std::string model_lines;
  std::set<std::string> seen;

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const size_t hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    std::string value;
    std::getline(ls, value);
    const size_t b = value.find_first_not_of(" \t\r");
    value = b == std::string::npos ? std::string() : value.substr(b);
    while (!value.empty() && (value.back() == ' ' || value.back() == '\t' ||
                              value.back() == '\r'))
      value.pop_back();

    if (kModelKeys.count(key)) {
      model_lines += key + " " + value + "\n";
      continue;
    }
    if (!seen.insert(key).second)
      throw ConfigError("duplicate key (line " + std::to_string(lineno) + ")", key);
    if (value.empty() && key != "model")
      throw ConfigError("missing value (line " + std::to_string(lineno) + ")", key);

    if (key == "model") {
      model_path = value;
    } else if (key == "metric") {
      if (value == "discrete")
        cfg.metric = GroundMetric{MetricKind::kDiscrete};
      else if (value == "absdiff")
        cfg.metric = GroundMetric{MetricKind::kAbsoluteDifference};
      else
        throw ConfigError("expected discrete|absdiff, got '" + value + "'", "metric");
      cfg.metric_overridden = true;
    } else if (key == "observable") {
      cfg.observable = value;
    } else if (key == "x0") {
      cfg.x0 = value;
    } else if (key == "y0") {
      cfg.y0 = value;
    } else if (key == "k_max") {
      cfg.k_max = parse_u64(key, value);
    } else if (key == "n") {
      cfg.n = parse_u64(key, value);
      if (cfg.n == 0) throw ConfigError("must be >= 1", "n");
    } else if (key == "replicas") {
      cfg.replicas = parse_u64(key, value);
    } else if (key == "draws") {
      cfg.draws = parse_u64(key, value);
    } else if (key == "t_grid") {
      cfg.t_grid = parse_reals(key, value);
    } else if (key == "lambda_grid") {
      cfg.lambda_grid = parse_reals(key, value);
    } else if (key == "part") {
      if (value != "a" && value != "b")
        throw ConfigError("expected a|b, got '" + value + "'", "part");
      cfg.part = value;
    } else if (key == "c1") {
      cfg.c1 = parse_real(key, value);
      if (!(cfg.c1 > 0.0)) throw ConfigError("must be > 0", "c1");
    } else if (key == "c_t1") {
      cfg.c_t1 = parse_real(key, value);
      if (!(cfg.c_t1 > 0.0)) throw ConfigError("must be > 0", "c_t1");
    } else if (key == "cap") {
      cfg.cap = parse_u64(key, value);
      if (cfg.cap == 0) throw ConfigError("must be >= 1", "cap");
    } else if (key == "seed") {
      cfg.seed = parse_u64(key, value);
    } else if (key == "threads") {
      cfg.threads = static_cast<int>(parse_u64(key, value));
    } else {
      throw ConfigError("unknown key (line " + std::to_string(lineno) + ")", key);
    }
  }

  if (!model_path.empty() && !model_lines.empty())
    throw ConfigError("give either `model <path>` or inline model keys, not both", "model");
  if (!model_path.empty()) {
    std::filesystem::path p(model_path);
    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
    cfg.model = parse_model_file(p.string());
  } else if (!model_lines.empty()) {
    cfg.model = parse_model_text(model_lines);
  } else {
    throw ConfigError("no model given (path or inline keys)", "model");
  }

  if (!cfg.metric_overridden) cfg.metric = cfg.model.default_metric();
  if (cfg.metric.kind == MetricKind::kDiscrete && !cfg.model.finite_sites())
    throw ConfigError("discrete metric needs a finite local state space", "metric");
  cfg.config_hash = fnv1a64(canonical_dump(cfg));
  return cfg;
}

ExperimentConfig parse_experiment_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'", "config");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_experiment_text(buf.str(),
                               std::filesystem::path(path).parent_path().string());
}

std::string canonical_dump(const ExperimentConfig& cfg) {
  std::string s = "== model ==\n" + serialize_model(cfg.model) + "== experiment ==\n";
  s += "metric " +
       std::string(cfg.metric.kind == MetricKind::kDiscrete ? "discrete" : "absdiff") +
       "\n";
  s += "observable " + cfg.observable + "\n";
  s += "x0 " + cfg.x0 + "\n";
  s += "y0 " + cfg.y0 + "\n";
  s += "k_max " + std::to_string(cfg.k_max) + "\n";
  s += "n " + std::to_string(cfg.n) + "\n";
  s += "replicas " + std::to_string(cfg.replicas) + "\n";
  s += "draws " + std::to_string(cfg.draws) + "\n";
  s += "t_grid";
  for (double t : cfg.t_grid) s += " " + fmt17(t);
  s += "\nlambda_grid";
  for (double l : cfg.lambda_grid) s += " " + fmt17(l);
  s += "\npart " + cfg.part + "\n";
  s += "c1 " + fmt17(cfg.c1) + "\n";
  s += "c_t1 " + fmt17(cfg.c_t1) + "\n";
  s += "cap " + std::to_string(cfg.cap) + "\n";
  return s;
}

}  // namespace dobgibbs
