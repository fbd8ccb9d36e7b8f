#include "dobgibbs/model_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "dobgibbs/util.hpp"

namespace dobgibbs {

namespace {

struct KeyValues {
  std::map<std::string, std::vector<std::string>> fields;

  bool has(const std::string& k) const { return fields.count(k) > 0; }

  const std::vector<std::string>& tokens(const std::string& k) const {
    auto it = fields.find(k);
    if (it == fields.end()) throw ConfigError("missing required key '" + k + "'", k);
    return it->second;
  }

  double number(const std::string& k, size_t pos) const {
    const auto& toks = tokens(k);
    if (pos >= toks.size()) throw ConfigError("key '" + k + "' is missing values", k);
    size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(toks[pos], &used);
    } catch (const std::exception&) {
      throw ConfigError("key '" + k + "': '" + toks[pos] + "' is not a number", k);
    }
    if (used != toks[pos].size())
      throw ConfigError("key '" + k + "': '" + toks[pos] + "' is not a number", k);
    return v;
  }

  long integer(const std::string& k, size_t pos = 0) const {
    const double v = number(k, pos);
    const long n = static_cast<long>(v);
    if (v != static_cast<double>(n))
      throw ConfigError("key '" + k + "' must be an integer", k);
    return n;
  }

  std::vector<double> numbers(const std::string& k) const {
    const auto& toks = tokens(k);
    std::vector<double> out(toks.size());
    for (size_t i = 0; i < toks.size(); ++i) out[i] = number(k, i);
    return out;
  }
};

KeyValues tokenize(const std::string& text, const std::vector<std::string>& known) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    bool ok = false;
    for (const auto& k : known) ok = ok || k == key;
    if (!ok)
      throw ConfigError("unknown key '" + key + "' on line " + std::to_string(lineno), key);
    if (kv.fields.count(key))
      throw ConfigError("duplicate key '" + key + "'", key);
    auto& toks = kv.fields[key];
    std::string tok;
    while (ls >> tok) toks.push_back(tok);
    if (toks.empty()) throw ConfigError("key '" + key + "' has no value", key);
  }
  return kv;
}

void reject_keys(const KeyValues& kv, const std::vector<std::string>& allowed,
                 const std::string& kind) {
  for (const auto& [key, _] : kv.fields) {
    bool ok = false;
    for (const auto& k : allowed) ok = ok || k == key;
    if (!ok)
      throw ConfigError("key '" + key + "' does not apply to kind '" + kind + "'", key);
  }
}

const std::vector<std::string> kModelKeys = {"kind",  "n_sites", "beta",
                                             "edges", "field",   "A",
                                             "sigma", "alphabet", "potential_table"};

ConditionalModel build_ising(const KeyValues& kv, int n) {
  reject_keys(kv, {"kind", "n_sites", "beta", "edges", "field"}, "ising");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  if (kv.has("edges")) {
    const auto vals = kv.numbers("edges");
    if (vals.size() % 3 != 0)
      throw ConfigError("edges must be triples 'i j J'", "edges");
    for (size_t e = 0; e < vals.size(); e += 3) {
      const int i = static_cast<int>(vals[e]);
      const int j = static_cast<int>(vals[e + 1]);
      if (i != vals[e] || j != vals[e + 1] || i < 1 || j < 1 || i > n || j > n || i == j)
        throw ConfigError("edge sites must be distinct integers in [1, n_sites]", "edges");
      if (J(i - 1, j - 1) != 0.0) throw ConfigError("duplicate edge", "edges");
      J(i - 1, j - 1) = J(j - 1, i - 1) = vals[e + 2];
    }
  }
  Eigen::VectorXd h = Eigen::VectorXd::Zero(n);
  if (kv.has("field")) {
    const auto vals = kv.numbers("field");
    if (vals.size() != static_cast<size_t>(n))
      throw ConfigError("field needs one entry per site", "field");
    for (int i = 0; i < n; ++i) h(i) = vals[static_cast<size_t>(i)];
  }
  const double beta = kv.has("beta") ? kv.number("beta", 0) : 1.0;
  return ConditionalModel::ising(std::move(J), std::move(h), beta);
}

ConditionalModel build_gaussian(const KeyValues& kv, int n) {
  reject_keys(kv, {"kind", "n_sites", "A", "field", "sigma"}, "gaussian");
  const auto avals = kv.numbers("A");
  if (avals.size() != static_cast<size_t>(n) * static_cast<size_t>(n))
    throw ConfigError("A needs n_sites*n_sites row-major entries", "A");
  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      A(i, j) = avals[static_cast<size_t>(i) * static_cast<size_t>(n) + static_cast<size_t>(j)];
  const auto svals = kv.numbers("sigma");
  if (svals.size() != static_cast<size_t>(n))
    throw ConfigError("sigma needs one entry per site", "sigma");
  Eigen::VectorXd sigma(n);
  for (int i = 0; i < n; ++i) sigma(i) = svals[static_cast<size_t>(i)];
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  if (kv.has("field")) {
    const auto bvals = kv.numbers("field");
    if (bvals.size() != static_cast<size_t>(n))
      throw ConfigError("field needs one entry per site", "field");
    for (int i = 0; i < n; ++i) b(i) = bvals[static_cast<size_t>(i)];
  }
  return ConditionalModel::gaussian_linear(std::move(A), std::move(b), std::move(sigma));
}

ConditionalModel build_free(const KeyValues& kv, int n) {
  reject_keys(kv, {"kind", "n_sites", "alphabet", "potential_table", "sigma", "field"},
              "free");
  const bool finite = kv.has("alphabet") || kv.has("potential_table");
  const bool gauss = kv.has("sigma");
  if (finite == gauss)
    throw ConfigError(
        "free model needs either alphabet+potential_table or sigma (+field)", "kind");
  if (finite) {
    const int A = static_cast<int>(kv.integer("alphabet"));
    if (A < 2) throw ConfigError("alphabet must be >= 2", "alphabet");
    const auto v = kv.numbers("potential_table");
    if (v.size() != static_cast<size_t>(A))
      throw ConfigError("free potential_table needs one energy per symbol",
                        "potential_table");
    double lmax = -std::numeric_limits<double>::infinity();
    for (double e : v) lmax = std::max(lmax, -e);
    std::vector<double> probs(v.size());
    double sum = 0.0;
    for (size_t s = 0; s < v.size(); ++s) sum += probs[s] = std::exp(-v[s] - lmax);
    std::vector<double> atoms(v.size());
    for (size_t s = 0; s < v.size(); ++s) {
      probs[s] /= sum;
      atoms[s] = static_cast<double>(s);
    }
    return ConditionalModel::free_sites(n, Distribution1D::finite(probs, atoms));
  }
  const auto svals = kv.numbers("sigma");
  if (svals.size() != 1)
    throw ConfigError("free gaussian law takes a single sigma", "sigma");
  double mean = 0.0;
  if (kv.has("field")) {
    const auto f = kv.numbers("field");
    if (f.size() != 1) throw ConfigError("free gaussian law takes a single field", "field");
    mean = f[0];
  }
  return ConditionalModel::free_sites(n, Distribution1D::gaussian(mean, svals[0]));
}

ConditionalModel build_potential(const KeyValues& kv, int n) {
  reject_keys(kv, {"kind", "n_sites", "alphabet", "potential_table"}, "potential");
  const int A = static_cast<int>(kv.integer("alphabet"));
  if (A < 2) throw ConfigError("alphabet must be >= 2", "alphabet");
  return ConditionalModel::finite_potential(n, A, kv.numbers("potential_table"), {});
}

}  // namespace

ConditionalModel parse_model_text(const std::string& text) {
  const KeyValues kv = tokenize(text, kModelKeys);
  const auto& kind_toks = kv.tokens("kind");
  const std::string kind = kind_toks[0];
  const long n = kv.integer("n_sites");
  if (n < 1 || n > 100000) throw ConfigError("n_sites out of range", "n_sites");
  if (kind == "ising") return build_ising(kv, static_cast<int>(n));
  if (kind == "gaussian") return build_gaussian(kv, static_cast<int>(n));
  if (kind == "free") return build_free(kv, static_cast<int>(n));
  if (kind == "potential") return build_potential(kv, static_cast<int>(n));
  throw ConfigError("unknown model kind '" + kind + "'", "kind");
}

ConditionalModel parse_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file '" + path + "'", "model");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_model_text(buf.str());
}

std::string serialize_model(const ConditionalModel& m) {
  std::ostringstream out;
  out << "n_sites " << m.n_sites << "\n";
  switch (m.kind) {
    case ModelKind::kIsingGraph: {
      std::ostringstream head;
      head << "kind ising\nbeta " << fmt17(m.beta) << "\n";
      std::ostringstream edges;
      int count = 0;
      for (int i = 0; i < m.n_sites; ++i)
        for (int j = i + 1; j < m.n_sites; ++j)
          if (m.coupling(i, j) != 0.0) {
            edges << " " << (i + 1) << " " << (j + 1) << " " << fmt17(m.coupling(i, j));
            ++count;
          }
      head << out.str();
      if (count > 0) head << "edges" << edges.str() << "\n";
      head << "field";
      for (int i = 0; i < m.n_sites; ++i) head << " " << fmt17(m.field(i));
      head << "\n";
      return head.str();
    }
    case ModelKind::kGaussianLinear: {
      std::ostringstream s;
      s << "kind gaussian\n" << out.str() << "A";
      for (int i = 0; i < m.n_sites; ++i)
        for (int j = 0; j < m.n_sites; ++j) s << " " << fmt17(m.mean_coeff(i, j));
      s << "\nfield";
      for (int i = 0; i < m.n_sites; ++i) s << " " << fmt17(m.field(i));
      s << "\nsigma";
      for (int i = 0; i < m.n_sites; ++i) s << " " << fmt17(m.sigma(i));
      s << "\n";
      return s.str();
    }
    case ModelKind::kFree: {
      std::ostringstream s;
      s << "kind free\n" << out.str();
      if (m.site_law.kind == DistKind::kGaussian) {
        s << "field " << fmt17(m.site_law.mean) << "\nsigma " << fmt17(m.site_law.sd) << "\n";
      } else {
        s << "alphabet " << m.site_law.probs.size() << "\npotential_table";
        for (double p : m.site_law.probs) s << " " << fmt17(-std::log(p));
        s << "\n";
      }
      return s.str();
    }
    case ModelKind::kFinitePotential: {
      std::ostringstream s;
      s << "kind potential\n" << out.str() << "alphabet " << m.alphabet_size
        << "\npotential_table";
      for (double v : m.energy) s << " " << fmt17(v);
      s << "\n";
      return s.str();
    }
  }
  throw std::logic_error("serialize_model: unknown kind");
}

}  // namespace dobgibbs
