#include "dobgibbs/models.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "dobgibbs/stats.hpp"

namespace dobgibbs {

namespace {

void require(bool ok, const std::string& msg, const std::string& key = "") {
  if (!ok) throw ConfigError(msg, key);
}

double stable_sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double spin(int symbol) { return 2.0 * symbol - 1.0; }

}  // namespace

Distribution1D Distribution1D::finite(std::vector<double> probs, std::vector<double> atoms) {
  require(!probs.empty() && probs.size() == atoms.size(),
          "finite law needs matching probs/atoms", "probs");
  double sum = 0.0;
  for (double p : probs) {
    require(std::isfinite(p) && p >= 0.0, "pmf entries must be finite and >= 0", "probs");
    sum += p;
  }
  require(std::fabs(sum - 1.0) <= 1e-12, "pmf must sum to 1", "probs");
  for (size_t s = 1; s < atoms.size(); ++s)
    require(atoms[s] > atoms[s - 1], "atoms must be strictly increasing", "atoms");
  Distribution1D d;
  d.kind = DistKind::kFinitePmf;
  d.probs = std::move(probs);
  d.atoms = std::move(atoms);
  return d;
}

Distribution1D Distribution1D::gaussian(double mean, double sd) {
  require(std::isfinite(mean) && std::isfinite(sd) && sd > 0.0,
          "gaussian law needs finite mean and sd > 0", "sigma");
  Distribution1D d;
  d.kind = DistKind::kGaussian;
  d.mean = mean;
  d.sd = sd;
  return d;
}

int Distribution1D::quantile_index(double u) const {
  if (kind != DistKind::kFinitePmf)
    throw std::invalid_argument("quantile_index: finite laws only");
  double cum = 0.0;
  const int last = static_cast<int>(probs.size()) - 1;
  for (int s = 0; s <= last; ++s) {
    cum += probs[static_cast<size_t>(s)];
    if (u <= cum) return s;
  }
  return last;  // u exceeded cum by rounding slack
}

double Distribution1D::quantile(double u) const {
  if (kind == DistKind::kGaussian) return mean + sd * normal_quantile(u);
  return atoms[static_cast<size_t>(quantile_index(u))];
}

double Distribution1D::mean_value() const {
  if (kind == DistKind::kGaussian) return mean;
  double m = 0.0;
  for (size_t s = 0; s < probs.size(); ++s) m += probs[s] * atoms[s];
  return m;
}

ConditionalModel ConditionalModel::ising(Eigen::MatrixXd J, Eigen::VectorXd h, double beta) {
  const int n = static_cast<int>(J.rows());
  require(n >= 1 && J.cols() == n, "coupling matrix must be square", "edges");
  require(h.size() == n, "field must have one entry per site", "field");
  require(std::isfinite(beta) && beta >= 0.0, "beta must be finite and >= 0", "beta");
  for (int i = 0; i < n; ++i) {
    require(J(i, i) == 0.0, "couplings must have zero diagonal", "edges");
    for (int j = 0; j < n; ++j) {
      require(std::isfinite(J(i, j)), "couplings must be finite", "edges");
      require(J(i, j) == J(j, i), "couplings must be symmetric", "edges");
    }
    require(std::isfinite(h(i)), "field entries must be finite", "field");
  }
  ConditionalModel m;
  m.kind = ModelKind::kIsingGraph;
  m.n_sites = n;
  m.coupling = std::move(J);
  m.field = std::move(h);
  m.beta = beta;
  return m;
}

ConditionalModel ConditionalModel::gaussian_linear(Eigen::MatrixXd A, Eigen::VectorXd b,
                                                   Eigen::VectorXd sigma) {
  const int n = static_cast<int>(A.rows());
  require(n >= 1 && A.cols() == n, "mean coefficient matrix must be square", "A");
  require(b.size() == n && sigma.size() == n, "field/sigma must have one entry per site",
          "sigma");
  for (int i = 0; i < n; ++i) {
    require(A(i, i) == 0.0, "mean coefficients must have zero diagonal", "A");
    for (int j = 0; j < n; ++j)
      require(std::isfinite(A(i, j)), "mean coefficients must be finite", "A");
    require(std::isfinite(b(i)), "field entries must be finite", "field");
    require(std::isfinite(sigma(i)) && sigma(i) > 0.0, "sigma entries must be > 0", "sigma");
  }
  ConditionalModel m;
  m.kind = ModelKind::kGaussianLinear;
  m.n_sites = n;
  m.mean_coeff = std::move(A);
  m.field = std::move(b);
  m.sigma = std::move(sigma);
  return m;
}

ConditionalModel ConditionalModel::free_sites(int n, Distribution1D law) {
  require(n >= 1, "need at least one site", "n_sites");
  ConditionalModel m;
  m.kind = ModelKind::kFree;
  m.n_sites = n;
  m.site_law = std::move(law);
  return m;
}

ConditionalModel ConditionalModel::finite_potential(int n, int alphabet,
                                                    std::vector<double> energy,
                                                    std::vector<double> ref_weights) {
  require(n >= 1, "need at least one site", "n_sites");
  require(alphabet >= 2, "alphabet must have at least two symbols", "alphabet");
  uint64_t size = 1;
  for (int i = 0; i < n; ++i) {
    size *= static_cast<uint64_t>(alphabet);
    require(size <= (1ull << 24), "potential table too large", "potential_table");
  }
  require(energy.size() == size, "potential table must cover every configuration",
          "potential_table");
  for (double v : energy)
    require(std::isfinite(v), "potential entries must be finite", "potential_table");
  if (ref_weights.empty())
    ref_weights.assign(static_cast<size_t>(alphabet), 1.0 / alphabet);
  require(ref_weights.size() == static_cast<size_t>(alphabet),
          "reference weights must have one entry per symbol", "ref_weights");
  double sum = 0.0;
  for (double w : ref_weights) {
    require(std::isfinite(w) && w > 0.0, "reference weights must be > 0", "ref_weights");
    sum += w;
  }
  require(std::fabs(sum - 1.0) <= 1e-12, "reference weights must sum to 1", "ref_weights");
  ConditionalModel m;
  m.kind = ModelKind::kFinitePotential;
  m.n_sites = n;
  m.alphabet_size = alphabet;
  m.energy = std::move(energy);
  m.ref_weights = std::move(ref_weights);
  return m;
}

StateKind ConditionalModel::state_kind() const {
  if (kind == ModelKind::kGaussianLinear) return StateKind::kReal;
  if (kind == ModelKind::kFree && site_law.kind == DistKind::kGaussian)
    return StateKind::kReal;
  return StateKind::kSymbol;
}

int ConditionalModel::local_alphabet() const {
  switch (kind) {
    case ModelKind::kIsingGraph:
      return 2;
    case ModelKind::kFinitePotential:
      return alphabet_size;
    case ModelKind::kFree:
      if (site_law.kind == DistKind::kFinitePmf)
        return static_cast<int>(site_law.probs.size());
      break;
    default:
      break;
  }
  throw std::invalid_argument("local_alphabet: real-valued model");
}

std::vector<double> ConditionalModel::atom_values() const {
  switch (kind) {
    case ModelKind::kIsingGraph:
      return {-1.0, 1.0};
    case ModelKind::kFinitePotential: {
      std::vector<double> a(static_cast<size_t>(alphabet_size));
      for (int s = 0; s < alphabet_size; ++s) a[static_cast<size_t>(s)] = s;
      return a;
    }
    case ModelKind::kFree:
      if (site_law.kind == DistKind::kFinitePmf) return site_law.atoms;
      break;
    default:
      break;
  }
  throw std::invalid_argument("atom_values: real-valued model");
}

GroundMetric ConditionalModel::default_metric() const {
  GroundMetric d;
  d.kind = finite_sites() ? MetricKind::kDiscrete : MetricKind::kAbsoluteDifference;
  return d;
}

double site_distance(const ConditionalModel& m, const GroundMetric& d, double a, double b) {
  if (m.finite_sites() && d.kind == MetricKind::kAbsoluteDifference) {
    const auto atoms = m.atom_values();
    return d(atoms[static_cast<size_t>(static_cast<int>(a))],
             atoms[static_cast<size_t>(static_cast<int>(b))]);
  }
  return d(a, b);
}

double config_distance(const ConditionalModel& m, const GroundMetric& d,
                       const Configuration& x, const Configuration& y) {
  if (x.size() != m.n_sites || y.size() != m.n_sites)
    throw std::invalid_argument("config_distance: wrong configuration length");
  if (m.finite_sites() && d.kind == MetricKind::kAbsoluteDifference) {
    double s = 0.0;
    for (int i = 0; i < m.n_sites; ++i) s += site_distance(m, d, x.values[i], y.values[i]);
    return s;
  }
  return l1_distance(x, y, d);
}

Distribution1D conditional_distribution(const ConditionalModel& m, int i,
                                        const Configuration& x) {
  if (i < 0 || i >= m.n_sites) throw std::invalid_argument("conditional: site out of range");
  if (x.size() != m.n_sites) throw std::invalid_argument("conditional: wrong configuration length");
  switch (m.kind) {
    case ModelKind::kIsingGraph: {
      double local = m.field(i);
      for (int j = 0; j < m.n_sites; ++j)
        if (j != i) local += m.coupling(i, j) * spin(x.symbol(j));
      const double p_plus = stable_sigmoid(2.0 * m.beta * local);
      return Distribution1D::finite({1.0 - p_plus, p_plus}, {-1.0, 1.0});
    }
    case ModelKind::kGaussianLinear: {
      double mean = m.field(i);
      for (int j = 0; j < m.n_sites; ++j)
        if (j != i) mean += m.mean_coeff(i, j) * x.values[static_cast<size_t>(j)];
      return Distribution1D::gaussian(mean, m.sigma(i));
    }
    case ModelKind::kFree:
      return m.site_law;
    case ModelKind::kFinitePotential: {
      const int A = m.alphabet_size;
      Configuration y = x;
      std::vector<double> logw(static_cast<size_t>(A));
      double lmax = -std::numeric_limits<double>::infinity();
      for (int s = 0; s < A; ++s) {
        y.values[static_cast<size_t>(i)] = s;
        logw[static_cast<size_t>(s)] =
            std::log(m.ref_weights[static_cast<size_t>(s)]) - m.energy[config_index(y, A)];
        lmax = std::max(lmax, logw[static_cast<size_t>(s)]);
      }
      if (!std::isfinite(lmax))
        throw AssumptionError("conditional weights are not normalizable");
      std::vector<double> probs(static_cast<size_t>(A));
      double sum = 0.0;
      for (int s = 0; s < A; ++s) {
        probs[static_cast<size_t>(s)] = std::exp(logw[static_cast<size_t>(s)] - lmax);
        sum += probs[static_cast<size_t>(s)];
      }
      std::vector<double> atoms(static_cast<size_t>(A));
      for (int s = 0; s < A; ++s) {
        probs[static_cast<size_t>(s)] /= sum;
        atoms[static_cast<size_t>(s)] = s;
      }
      return Distribution1D::finite(std::move(probs), std::move(atoms));
    }
  }
  throw std::logic_error("conditional: unknown model kind");
}

double conditional_sample(const ConditionalModel& m, int i, const Configuration& x,
                          SubStream& stream) {
  const Distribution1D law = conditional_distribution(m, i, x);
  const double u = stream.next_uniform();
  if (law.kind == DistKind::kFinitePmf) return law.quantile_index(u);
  return law.quantile(u);
}

namespace {

bool pmf_equal(const Distribution1D& a, const Distribution1D& b) {
  for (size_t s = 0; s < a.probs.size(); ++s)
    if (std::fabs(a.probs[s] - b.probs[s]) > 1e-14) return false;
  return true;
}

std::vector<int> scan_potential_neighborhood(const ConditionalModel& m, int i, uint64_t cap) {
  const int A = m.alphabet_size;
  const uint64_t size = state_space_size(m.n_sites, A, cap);
  std::vector<int> nbr;
  for (int j = 0; j < m.n_sites; ++j) {
    if (j == i) continue;
    bool depends = false;
    for (uint64_t idx = 0; idx < size && !depends; ++idx) {
      Configuration x = config_from_index(idx, m.n_sites, A);
      // The conditional never reads x_i, and contexts differing only at j are
      // covered by the bumps below; fixing both coordinates to 0 removes
      // duplicate work.
      if (x.symbol(i) != 0 || x.symbol(j) != 0) continue;
      const Distribution1D base = conditional_distribution(m, i, x);
      for (int a = 1; a < A; ++a) {
        x.values[static_cast<size_t>(j)] = a;
        if (!pmf_equal(base, conditional_distribution(m, i, x))) {
          depends = true;
          break;
        }
      }
    }
    if (depends) nbr.push_back(j);
  }
  return nbr;
}

}  // namespace

std::vector<int> neighborhood(const ConditionalModel& m, int i, uint64_t cap) {
  if (i < 0 || i >= m.n_sites) throw std::invalid_argument("neighborhood: site out of range");
  std::vector<int> nbr;
  switch (m.kind) {
    case ModelKind::kIsingGraph:
      for (int j = 0; j < m.n_sites; ++j)
        if (j != i && m.coupling(i, j) != 0.0) nbr.push_back(j);
      return nbr;
    case ModelKind::kGaussianLinear:
      for (int j = 0; j < m.n_sites; ++j)
        if (j != i && m.mean_coeff(i, j) != 0.0) nbr.push_back(j);
      return nbr;
    case ModelKind::kFree:
      return nbr;
    case ModelKind::kFinitePotential:
      return scan_potential_neighborhood(m, i, cap);
  }
  throw std::logic_error("neighborhood: unknown model kind");
}

std::vector<std::vector<int>> interaction_neighborhoods(const ConditionalModel& m,
                                                        uint64_t cap) {
  std::vector<std::vector<int>> all(static_cast<size_t>(m.n_sites));
  for (int i = 0; i < m.n_sites; ++i) all[static_cast<size_t>(i)] = neighborhood(m, i, cap);
  return all;
}

std::vector<double> exact_gibbs_measure(const ConditionalModel& m, uint64_t cap) {
  if (!m.finite_sites())
    throw AssumptionError("exact stationary law requires a finite state space");
  const int A = m.local_alphabet();
  const uint64_t size = state_space_size(m.n_sites, A, cap);
  std::vector<double> logw(size);
  double lmax = -std::numeric_limits<double>::infinity();
  for (uint64_t idx = 0; idx < size; ++idx) {
    const Configuration x = config_from_index(idx, m.n_sites, A);
    double w = 0.0;
    switch (m.kind) {
      case ModelKind::kIsingGraph: {
        for (int i = 0; i < m.n_sites; ++i) {
          w += m.field(i) * spin(x.symbol(i));
          for (int j = i + 1; j < m.n_sites; ++j)
            w += m.coupling(i, j) * spin(x.symbol(i)) * spin(x.symbol(j));
        }
        w *= m.beta;
        break;
      }
      case ModelKind::kFinitePotential: {
        w = -m.energy[idx];
        for (int i = 0; i < m.n_sites; ++i)
          w += std::log(m.ref_weights[static_cast<size_t>(x.symbol(i))]);
        break;
      }
      case ModelKind::kFree: {
        for (int i = 0; i < m.n_sites; ++i) {
          const double p = m.site_law.probs[static_cast<size_t>(x.symbol(i))];
          w += std::log(p);  // -inf for zero-mass symbols is fine under LSE
        }
        break;
      }
      default:
        throw std::logic_error("exact_gibbs_measure: unknown finite kind");
    }
    logw[idx] = w;
    lmax = std::max(lmax, w);
  }
  std::vector<double> mu(size);
  double sum = 0.0;
  for (uint64_t idx = 0; idx < size; ++idx) {
    mu[idx] = std::exp(logw[idx] - lmax);
    sum += mu[idx];
  }
  for (double& p : mu) p /= sum;
  return mu;
}

Configuration make_configuration(const ConditionalModel& m, const std::string& descriptor) {
  const bool finite = m.finite_sites();
  if (descriptor == "all_zero") {
    if (finite) return Configuration::symbols(std::vector<int>(m.n_sites, 0));
    return Configuration::reals(std::vector<double>(m.n_sites, 0.0));
  }
  if (descriptor == "all_plus") {
    if (finite)
      return Configuration::symbols(std::vector<int>(m.n_sites, m.local_alphabet() - 1));
    return Configuration::reals(std::vector<double>(m.n_sites, 1.0));
  }
  std::istringstream in(descriptor);
  std::vector<double> vals;
  double v;
  while (in >> v) vals.push_back(v);
  if (static_cast<int>(vals.size()) != m.n_sites)
    throw ConfigError("configuration needs " + std::to_string(m.n_sites) + " values", "x0");
  if (finite) {
    std::vector<int> syms(vals.size());
    for (size_t i = 0; i < vals.size(); ++i) {
      const int s = static_cast<int>(vals[i]);
      if (s != vals[i] || s < 0 || s >= m.local_alphabet())
        throw ConfigError("configuration symbols must be integers in [0, alphabet)", "x0");
      syms[i] = s;
    }
    return Configuration::symbols(std::move(syms));
  }
  return Configuration::reals(std::move(vals));
}

}  // namespace dobgibbs
