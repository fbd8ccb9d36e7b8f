#include "dobgibbs/observables.hpp"

#include <cmath>

namespace dobgibbs {

namespace {

// Mean of the raw stored value under a site law: the symbol index for finite
// laws (what configurations hold), the gaussian mean otherwise.
double raw_site_mean(const Distribution1D& law) {
  if (law.kind == DistKind::kGaussian) return law.mean;
  double s = 0.0;
  for (size_t a = 0; a < law.probs.size(); ++a) s += law.probs[a] * static_cast<double>(a);
  return s;
}

// Largest |a - b| / d(atom_a, atom_b) over symbol pairs: converts a unit
// change in raw symbol value into ground-metric units.
double symbol_stretch(const ConditionalModel& m, const GroundMetric& d) {
  if (!m.finite_sites()) return 1.0;
  const int A = m.local_alphabet();
  if (d.kind == MetricKind::kDiscrete) return static_cast<double>(A - 1);
  const auto atoms = m.atom_values();
  double worst = 0.0;
  for (int a = 0; a < A; ++a)
    for (int b = a + 1; b < A; ++b)
      worst = std::max(worst, (b - a) / (atoms[static_cast<size_t>(b)] -
                                         atoms[static_cast<size_t>(a)]));
  return worst;
}

void require_binary_symbols(const ConditionalModel& m, const std::string& name) {
  if (!m.finite_sites() || m.local_alphabet() != 2)
    throw ConfigError("observable '" + name + "' needs a binary symbol model",
                      "observable");
}

}  // namespace

Observable make_observable(const std::string& name, const ConditionalModel& m,
                           const GroundMetric& d) {
  const int n = m.n_sites;
  const double nn = static_cast<double>(n);
  Observable o;
  o.name = name;

  auto uniform_profile = [&](double delta) {
    return lipschitz_profile_declared(std::vector<double>(static_cast<size_t>(n), delta));
  };

  if (name == "site_average" || name == "sum_values" || name == "first_site") {
    const double stretch = symbol_stretch(m, d);
    if (name == "site_average") {
      o.f = [nn](const Configuration& x) {
        double s = 0.0;
        for (double v : x.values) s += v;
        return s / nn;
      };
      o.profile = uniform_profile(stretch / nn);
      o.product_mean = [](const Distribution1D& law, int) { return raw_site_mean(law); };
      o.linear_coeffs.assign(static_cast<size_t>(n), 1.0 / nn);
    } else if (name == "sum_values") {
      o.f = [](const Configuration& x) {
        double s = 0.0;
        for (double v : x.values) s += v;
        return s;
      };
      o.profile = uniform_profile(stretch);
      o.product_mean = [](const Distribution1D& law, int sites) {
        return sites * raw_site_mean(law);
      };
      o.linear_coeffs.assign(static_cast<size_t>(n), 1.0);
    } else {
      o.f = [](const Configuration& x) { return x.values[0]; };
      std::vector<double> deltas(static_cast<size_t>(n), 0.0);
      deltas[0] = stretch;
      o.profile = lipschitz_profile_declared(std::move(deltas));
      o.product_mean = [](const Distribution1D& law, int) { return raw_site_mean(law); };
      o.linear_coeffs.assign(static_cast<size_t>(n), 0.0);
      o.linear_coeffs[0] = 1.0;
    }
    return o;
  }

  if (name == "mean_spin" || name == "sum_spins") {
    require_binary_symbols(m, name);
    const double scale = name == "mean_spin" ? 1.0 / nn : 1.0;
    o.f = [scale](const Configuration& x) {
      double s = 0.0;
      for (double v : x.values) s += 2.0 * v - 1.0;
      return scale * s;
    };
    double delta;
    if (d.kind == MetricKind::kDiscrete) {
      delta = 2.0 * scale;
    } else {
      const auto atoms = m.atom_values();
      delta = 2.0 * scale / (atoms[1] - atoms[0]);
    }
    o.profile = uniform_profile(delta);
    o.product_mean = [scale](const Distribution1D& law, int sites) {
      return scale * sites * (2.0 * raw_site_mean(law) - 1.0);
    };
    return o;
  }

  if (name == "all_plus") {
    if (!m.finite_sites())
      throw ConfigError("observable 'all_plus' needs a symbol model", "observable");
    const int top = m.local_alphabet() - 1;
    o.f = [top](const Configuration& x) {
      for (int i = 0; i < x.size(); ++i)
        if (x.symbol(i) != top) return 0.0;
      return 1.0;
    };
    double delta = 1.0;
    if (d.kind == MetricKind::kAbsoluteDifference) {
      const auto atoms = m.atom_values();
      delta = 1.0 / (atoms[static_cast<size_t>(top)] - atoms[static_cast<size_t>(top) - 1]);
    }
    o.profile = uniform_profile(delta);
    o.product_mean = [top](const Distribution1D& law, int sites) {
      return std::pow(law.probs[static_cast<size_t>(top)], sites);
    };
    return o;
  }

  throw ConfigError("unknown observable '" + name + "'", "observable");
}

}  // namespace dobgibbs
