#include "dobgibbs/core.hpp"

#include <cmath>

namespace dobgibbs {

Configuration Configuration::symbols(std::vector<int> s) {
  Configuration c;
  c.kind = StateKind::kSymbol;
  c.values.assign(s.begin(), s.end());
  return c;
}

Configuration Configuration::reals(std::vector<double> v) {
  Configuration c;
  c.kind = StateKind::kReal;
  c.values = std::move(v);
  return c;
}

double l1_distance(const Configuration& x, const Configuration& y,
                   const GroundMetric& d) {
  if (x.kind != y.kind || x.values.size() != y.values.size())
    throw std::invalid_argument("l1_distance: incompatible configurations");
  double s = 0.0;
  for (size_t i = 0; i < x.values.size(); ++i) s += d(x.values[i], y.values[i]);
  return s;
}

LipschitzProfile lipschitz_profile_declared(std::vector<double> deltas) {
  LipschitzProfile p;
  for (double v : deltas) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw ConfigError("lipschitz profile entries must be finite and >= 0", "deltas");
    p.lip_norm = std::max(p.lip_norm, v);
    p.sum_deltas += v;
  }
  p.deltas = std::move(deltas);
  return p;
}

uint64_t config_index(const Configuration& x, int alphabet) {
  if (x.kind != StateKind::kSymbol)
    throw std::invalid_argument("config_index: symbol configurations only");
  uint64_t idx = 0;
  for (int i = 0; i < x.size(); ++i) {
    const int s = x.symbol(i);
    if (s < 0 || s >= alphabet) throw std::invalid_argument("config_index: symbol out of range");
    idx = idx * static_cast<uint64_t>(alphabet) + static_cast<uint64_t>(s);
  }
  return idx;
}

Configuration config_from_index(uint64_t idx, int n_sites, int alphabet) {
  std::vector<int> s(static_cast<size_t>(n_sites));
  for (int i = n_sites - 1; i >= 0; --i) {
    s[static_cast<size_t>(i)] = static_cast<int>(idx % static_cast<uint64_t>(alphabet));
    idx /= static_cast<uint64_t>(alphabet);
  }
  if (idx != 0) throw std::invalid_argument("config_from_index: index out of range");
  return Configuration::symbols(std::move(s));
}

uint64_t state_space_size(int n_sites, int alphabet, uint64_t cap) {
  if (n_sites <= 0 || alphabet <= 1)
    throw std::invalid_argument("state_space_size: need n_sites >= 1, alphabet >= 2");
  uint64_t s = 1;
  for (int i = 0; i < n_sites; ++i) {
    s *= static_cast<uint64_t>(alphabet);
    if (s > cap)
      throw ConfigError("state space exceeds enumeration cap (" + std::to_string(cap) + ")",
                        "cap");
  }
  return s;
}

LipschitzProfile lipschitz_profile_bruteforce(
    const std::function<double(const Configuration&)>& f, int n_sites,
    int alphabet, const std::vector<double>& atoms, const GroundMetric& d,
    uint64_t cap) {
  const uint64_t size = state_space_size(n_sites, alphabet, cap);
  auto atom = [&](int s) {
    return atoms.empty() ? static_cast<double>(s) : atoms[static_cast<size_t>(s)];
  };
  // f is evaluated on symbol configurations (the representation chains
  // produce); atoms only enter through the ground distance.
  std::vector<double> fv(size);
  for (uint64_t idx = 0; idx < size; ++idx)
    fv[idx] = f(config_from_index(idx, n_sites, alphabet));
  std::vector<double> deltas(static_cast<size_t>(n_sites), 0.0);
  // stride[i] = alphabet^(n_sites-1-i): changing site i moves the index by
  // multiples of its stride.
  std::vector<uint64_t> stride(static_cast<size_t>(n_sites), 1);
  for (int i = n_sites - 2; i >= 0; --i)
    stride[static_cast<size_t>(i)] = stride[static_cast<size_t>(i) + 1] * static_cast<uint64_t>(alphabet);
  for (uint64_t idx = 0; idx < size; ++idx) {
    Configuration x = config_from_index(idx, n_sites, alphabet);
    for (int i = 0; i < n_sites; ++i) {
      const int si = x.symbol(i);
      for (int a = si + 1; a < alphabet; ++a) {
        const uint64_t jdx = idx + stride[static_cast<size_t>(i)] * static_cast<uint64_t>(a - si);
        const double dist = d(atom(si), atom(a));
        if (dist <= 0.0) continue;
        const double osc = std::fabs(fv[idx] - fv[jdx]) / dist;
        deltas[static_cast<size_t>(i)] = std::max(deltas[static_cast<size_t>(i)], osc);
      }
    }
  }
  return lipschitz_profile_declared(std::move(deltas));
}

}  // namespace dobgibbs
