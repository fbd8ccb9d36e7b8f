#include "dobgibbs/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dobgibbs {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double w1_discrete_metric(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size() || p.empty())
    throw std::invalid_argument("w1_discrete_metric: pmf sizes differ");
  double s = 0.0;
  for (size_t i = 0; i < p.size(); ++i) s += std::fabs(p[i] - q[i]);
  return 0.5 * s;
}

namespace {

double cdf_at(const Distribution1D& f, double t) {
  if (f.kind == DistKind::kGaussian)
    return 0.5 * std::erfc(-(t - f.mean) / (f.sd * std::sqrt(2.0)));
  double c = 0.0;
  for (size_t s = 0; s < f.atoms.size(); ++s)
    if (f.atoms[s] <= t) c += f.probs[s];
  return c;
}

double w1_finite_finite(const Distribution1D& a, const Distribution1D& b) {
  std::vector<double> pts;
  pts.reserve(a.atoms.size() + b.atoms.size());
  pts.insert(pts.end(), a.atoms.begin(), a.atoms.end());
  pts.insert(pts.end(), b.atoms.begin(), b.atoms.end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  double w = 0.0;
  double fa = 0.0, fb = 0.0;
  size_t ia = 0, ib = 0;
  for (size_t l = 0; l + 1 < pts.size(); ++l) {
    while (ia < a.atoms.size() && a.atoms[ia] <= pts[l]) fa += a.probs[ia++];
    while (ib < b.atoms.size() && b.atoms[ib] <= pts[l]) fb += b.probs[ib++];
    w += std::fabs(fa - fb) * (pts[l + 1] - pts[l]);
  }
  return w;
}

double simpson(const std::function<double(double)>& g, double lo, double hi, double flo,
               double fmid, double fhi, double whole, double tol, int depth) {
  const double mid = 0.5 * (lo + hi);
  const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
  const double flm = g(lm), frm = g(rm);
  const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
  const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson(g, lo, mid, flo, flm, fmid, left, 0.5 * tol, depth - 1) +
         simpson(g, mid, hi, fmid, frm, fhi, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& g, double lo, double hi, double tol) {
  if (hi <= lo) return 0.0;
  const double mid = 0.5 * (lo + hi);
  const double flo = g(lo), fmid = g(mid), fhi = g(hi);
  const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
  return simpson(g, lo, hi, flo, fmid, fhi, whole, tol, 48);
}

}  // namespace

double w1_real_line(const Distribution1D& a, const Distribution1D& b) {
  if (a.kind == DistKind::kFinitePmf && b.kind == DistKind::kFinitePmf)
    return w1_finite_finite(a, b);
  if (a.kind == DistKind::kGaussian && b.kind == DistKind::kGaussian) {
    const double scale = std::max({1.0, a.sd, b.sd});
    if (std::fabs(a.sd - b.sd) <= 1e-14 * scale) return std::fabs(a.mean - b.mean);
  }
  // Integrand |F_a - F_b| is smooth between breakpoints (atoms), so split
  // there and run adaptive Simpson on each piece.
  std::vector<double> pts;
  auto span = [&pts](const Distribution1D& f) {
    if (f.kind == DistKind::kGaussian) {
      pts.push_back(f.mean - 12.0 * f.sd);
      pts.push_back(f.mean + 12.0 * f.sd);
    } else {
      for (double t : f.atoms) pts.push_back(t);
    }
  };
  span(a);
  span(b);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  auto g = [&](double t) { return std::fabs(cdf_at(a, t) - cdf_at(b, t)); };
  double w = 0.0;
  for (size_t l = 0; l + 1 < pts.size(); ++l)
    w += integrate(g, pts[l], pts[l + 1], 1e-10);
  return w;
}

double w1_distance(const Distribution1D& a, const Distribution1D& b, const GroundMetric& d) {
  if (d.kind == MetricKind::kDiscrete) {
    if (a.kind != DistKind::kFinitePmf || b.kind != DistKind::kFinitePmf)
      throw AssumptionError("discrete-metric W1 needs finite laws");
    if (a.atoms != b.atoms)
      throw std::invalid_argument("w1_distance: discrete metric needs a common atom set");
    return w1_discrete_metric(a.probs, b.probs);
  }
  return w1_real_line(a, b);
}

std::pair<double, double> optimal_coupling_sample(const Distribution1D& a,
                                                  const Distribution1D& b,
                                                  const GroundMetric& d, SubStream& stream) {
  if (d.kind == MetricKind::kDiscrete) {
    if (a.kind != DistKind::kFinitePmf || b.kind != DistKind::kFinitePmf)
      throw AssumptionError("maximal coupling needs finite laws");
    if (a.probs.size() != b.probs.size())
      throw std::invalid_argument("optimal_coupling_sample: alphabet mismatch");
    const size_t A = a.probs.size();
    double omega = 0.0;
    for (size_t s = 0; s < A; ++s) omega += std::min(a.probs[s], b.probs[s]);
    const double u0 = stream.next_uniform();
    const double resid = 1.0 - omega;
    auto walk = [&](const std::function<double(size_t)>& w, double total, double u) {
      double cum = 0.0;
      for (size_t s = 0; s + 1 < A; ++s) {
        cum += w(s);
        if (u * total <= cum) return static_cast<double>(s);
      }
      return static_cast<double>(A - 1);
    };
    if (u0 < omega || resid <= 1e-12) {
      const double s = walk([&](size_t t) { return std::min(a.probs[t], b.probs[t]); },
                            std::max(omega, 1e-300), stream.next_uniform());
      return {s, s};
    }
    const double sa = walk([&](size_t t) { return std::max(a.probs[t] - b.probs[t], 0.0); },
                           resid, stream.next_uniform());
    const double sb = walk([&](size_t t) { return std::max(b.probs[t] - a.probs[t], 0.0); },
                           resid, stream.next_uniform());
    return {sa, sb};
  }
  // Comonotone: push one shared uniform through both quantile functions.
  const double u = stream.next_uniform();
  const double xa =
      a.kind == DistKind::kFinitePmf ? static_cast<double>(a.quantile_index(u)) : a.quantile(u);
  const double xb =
      b.kind == DistKind::kFinitePmf ? static_cast<double>(b.quantile_index(u)) : b.quantile(u);
  return {xa, xb};
}

namespace {

struct ActiveSide {
  std::vector<int> ids;      // global indices with positive mass
  std::vector<double> rem;   // remaining supply/demand
};

ActiveSide collect(const std::vector<double>& w, const char* what) {
  ActiveSide side;
  for (size_t i = 0; i < w.size(); ++i) {
    if (!(std::isfinite(w[i]) && w[i] >= 0.0))
      throw std::invalid_argument(std::string("exact_ot_finite: ") + what +
                                  " entries must be finite and >= 0");
    if (w[i] > 0.0) {
      side.ids.push_back(static_cast<int>(i));
      side.rem.push_back(w[i]);
    }
  }
  return side;
}

}  // namespace

TransportPlan exact_ot_finite(const CostFn& cost, int n_src, int n_dst,
                              const std::vector<double>& p, const std::vector<double>& q) {
  if (static_cast<int>(p.size()) != n_src || static_cast<int>(q.size()) != n_dst)
    throw std::invalid_argument("exact_ot_finite: marginal sizes disagree with space sizes");
  ActiveSide S = collect(p, "source"), T = collect(q, "destination");
  double mass_p = 0.0, mass_q = 0.0;
  for (double v : p) mass_p += v;
  for (double v : q) mass_q += v;
  if (std::fabs(mass_p - mass_q) > 1e-10 * std::max(1.0, std::max(mass_p, mass_q)))
    throw std::invalid_argument("exact_ot_finite: unbalanced marginals");

  const int m = static_cast<int>(S.ids.size());
  const int k = static_cast<int>(T.ids.size());
  TransportPlan plan;
  plan.dual_u.assign(p.size(), 0.0);
  plan.dual_v.assign(q.size(), 0.0);
  if (m == 0 || k == 0) return plan;

  // Cached active-cost matrix; every entry is touched at least once by the
  // certificate scan, so caching does not change asymptotic memory honesty
  // for the sizes this solver targets.
  std::vector<double> c(static_cast<size_t>(m) * static_cast<size_t>(k));
  double cmax = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < k; ++j) {
      const double v = cost(S.ids[static_cast<size_t>(i)], T.ids[static_cast<size_t>(j)]);
      if (!(std::isfinite(v) && v >= 0.0))
        throw std::invalid_argument("exact_ot_finite: costs must be finite and >= 0");
      c[static_cast<size_t>(i) * k + j] = v;
      cmax = std::max(cmax, v);
    }
  auto C = [&](int i, int j) -> double { return c[static_cast<size_t>(i) * k + j]; };

  // flow[i] holds (j, mass) pairs; potentials pi keep reduced costs >= 0.
  std::vector<std::vector<std::pair<int, double>>> flow(static_cast<size_t>(m));
  std::vector<double> pi(static_cast<size_t>(m) + static_cast<size_t>(k), 0.0);
  const int nn = m + k;
  std::vector<double> dist(static_cast<size_t>(nn));
  std::vector<int> parent(static_cast<size_t>(nn));
  std::vector<char> done(static_cast<size_t>(nn));

  double total_rem = 0.0;
  for (double v : S.rem) total_rem += v;
  const double eps_mass = 1e-15 * std::max(1.0, mass_p);
  long guard = 32L * nn + 256;

  while (total_rem > eps_mass) {
    if (--guard < 0)
      throw std::runtime_error("exact_ot_finite: augmentation guard tripped");
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(parent.begin(), parent.end(), -1);
    std::fill(done.begin(), done.end(), 0);
    for (int i = 0; i < m; ++i)
      if (S.rem[static_cast<size_t>(i)] > eps_mass) dist[static_cast<size_t>(i)] = 0.0;

    int target = -1;
    for (;;) {
      int u = -1;
      double best = kInf;
      for (int v = 0; v < nn; ++v)
        if (!done[static_cast<size_t>(v)] && dist[static_cast<size_t>(v)] < best) {
          best = dist[static_cast<size_t>(v)];
          u = v;
        }
      if (u < 0) break;
      done[static_cast<size_t>(u)] = 1;
      if (u >= m && T.rem[static_cast<size_t>(u - m)] > eps_mass) {
        target = u - m;
        break;
      }
      if (u < m) {
        // forward arcs source u -> every sink
        for (int j = 0; j < k; ++j) {
          const int vj = m + j;
          if (done[static_cast<size_t>(vj)]) continue;
          double rc = C(u, j) + pi[static_cast<size_t>(u)] - pi[static_cast<size_t>(vj)];
          if (rc < 0.0) rc = 0.0;  // rounding slack
          if (dist[static_cast<size_t>(u)] + rc < dist[static_cast<size_t>(vj)]) {
            dist[static_cast<size_t>(vj)] = dist[static_cast<size_t>(u)] + rc;
            parent[static_cast<size_t>(vj)] = u;
          }
        }
      } else {
        // backward arcs sink -> sources currently shipping into it
        const int j = u - m;
        for (int i = 0; i < m; ++i) {
          if (done[static_cast<size_t>(i)]) continue;
          bool carries = false;
          for (const auto& [jj, f] : flow[static_cast<size_t>(i)])
            if (jj == j && f > 0.0) {
              carries = true;
              break;
            }
          if (!carries) continue;
          double rc = pi[static_cast<size_t>(u)] - pi[static_cast<size_t>(i)] - C(i, j);
          if (rc < 0.0) rc = 0.0;
          if (dist[static_cast<size_t>(u)] + rc < dist[static_cast<size_t>(i)]) {
            dist[static_cast<size_t>(i)] = dist[static_cast<size_t>(u)] + rc;
            parent[static_cast<size_t>(i)] = u;
          }
        }
      }
    }
    if (target < 0) {
      // Balanced transport over a complete cost matrix cannot be infeasible,
      // so an unreachable target means every remaining residual sits below
      // the seeding threshold (subtraction dust from near-identical
      // marginals).  Stop and let the closing marginal-residual certificate
      // judge the dust instead of forcing cost-positive micro-arcs.
      double live = 0.0;
      for (double v : S.rem) live += v;
      if (live <= 1e-9 * std::max(1.0, mass_p)) break;
      throw std::runtime_error("exact_ot_finite: no augmenting path (infeasible)");
    }

    // Johnson update capped at the target distance, applied to every node:
    // unlabeled nodes (dist = inf) must advance by dt as well, or arcs out
    // of them would turn reduced-negative and break dual feasibility.
    const double dt = dist[static_cast<size_t>(m + target)];
    for (int v = 0; v < nn; ++v)
      pi[static_cast<size_t>(v)] += std::min(dist[static_cast<size_t>(v)], dt);

    // Trace the path back to an origin source and find the bottleneck.
    double delta = T.rem[static_cast<size_t>(target)];
    int node = m + target;
    while (parent[static_cast<size_t>(node)] >= 0) {
      const int prev = parent[static_cast<size_t>(node)];
      if (prev >= m) {
        // backward arc (sink prev-m) <- source node: limited by its flow
        for (const auto& [jj, f] : flow[static_cast<size_t>(node)])
          if (jj == prev - m) delta = std::min(delta, f);
      }
      node = prev;
    }
    delta = std::min(delta, S.rem[static_cast<size_t>(node)]);

    // Apply the augmentation.
    int cur = m + target;
    while (parent[static_cast<size_t>(cur)] >= 0) {
      const int prev = parent[static_cast<size_t>(cur)];
      if (prev < m) {
        // forward source prev -> sink cur-m
        auto& fl = flow[static_cast<size_t>(prev)];
        bool found = false;
        for (auto& [jj, f] : fl)
          if (jj == cur - m) {
            f += delta;
            found = true;
            break;
          }
        if (!found) fl.emplace_back(cur - m, delta);
      } else {
        // backward: remove delta of flow (cur is a source, prev-m the sink)
        auto& fl = flow[static_cast<size_t>(cur)];
        for (size_t e = 0; e < fl.size(); ++e)
          if (fl[e].first == prev - m) {
            fl[e].second -= delta;
            if (fl[e].second <= eps_mass) {
              fl[e] = fl.back();
              fl.pop_back();
            }
            break;
          }
      }
      cur = prev;
    }
    S.rem[static_cast<size_t>(cur)] -= delta;
    T.rem[static_cast<size_t>(target)] -= delta;
    total_rem -= delta;
  }

  // Assemble the plan and its certificate.
  std::vector<double> row_mass(static_cast<size_t>(m), 0.0);
  std::vector<double> col_mass(static_cast<size_t>(k), 0.0);
  for (int i = 0; i < m; ++i)
    for (const auto& [j, f] : flow[static_cast<size_t>(i)]) {
      plan.support.push_back({S.ids[static_cast<size_t>(i)], T.ids[static_cast<size_t>(j)], f});
      plan.cost += f * C(i, j);
      row_mass[static_cast<size_t>(i)] += f;
      col_mass[static_cast<size_t>(j)] += f;
    }
  std::sort(plan.support.begin(), plan.support.end(),
            [](const TransportPlan::Cell& a, const TransportPlan::Cell& b) {
              return a.src != b.src ? a.src < b.src : a.dst < b.dst;
            });
  for (int i = 0; i < m; ++i)
    plan.max_marginal_residual =
        std::max(plan.max_marginal_residual,
                 std::fabs(row_mass[static_cast<size_t>(i)] - p[static_cast<size_t>(S.ids[static_cast<size_t>(i)])]));
  for (int j = 0; j < k; ++j)
    plan.max_marginal_residual =
        std::max(plan.max_marginal_residual,
                 std::fabs(col_mass[static_cast<size_t>(j)] - q[static_cast<size_t>(T.ids[static_cast<size_t>(j)])]));

  // Duals: u = -pi on sources, v = +pi on sinks (feasible with equality on
  // flow-carrying arcs).  Zero-mass points get the tightest value consistent
  // with the active duals so the reported vectors are complete.
  std::vector<char> src_active(p.size(), 0), dst_active(q.size(), 0);
  for (int i = 0; i < m; ++i) {
    plan.dual_u[static_cast<size_t>(S.ids[static_cast<size_t>(i)])] = -pi[static_cast<size_t>(i)];
    src_active[static_cast<size_t>(S.ids[static_cast<size_t>(i)])] = 1;
  }
  for (int j = 0; j < k; ++j) {
    plan.dual_v[static_cast<size_t>(T.ids[static_cast<size_t>(j)])] = pi[static_cast<size_t>(m + j)];
    dst_active[static_cast<size_t>(T.ids[static_cast<size_t>(j)])] = 1;
  }
  for (int gi = 0; gi < n_src; ++gi)
    if (!src_active[static_cast<size_t>(gi)]) {
      double best = kInf;
      for (int j = 0; j < k; ++j)
        best = std::min(best, cost(gi, T.ids[static_cast<size_t>(j)]) -
                                  plan.dual_v[static_cast<size_t>(T.ids[static_cast<size_t>(j)])]);
      plan.dual_u[static_cast<size_t>(gi)] = best;
    }
  for (int gj = 0; gj < n_dst; ++gj)
    if (!dst_active[static_cast<size_t>(gj)]) {
      double best = kInf;
      for (int i = 0; i < m; ++i)
        best = std::min(best, cost(S.ids[static_cast<size_t>(i)], gj) -
                                  plan.dual_u[static_cast<size_t>(S.ids[static_cast<size_t>(i)])]);
      plan.dual_v[static_cast<size_t>(gj)] = best;
    }

  double dual_obj = 0.0;
  for (size_t i = 0; i < p.size(); ++i) dual_obj += plan.dual_u[i] * p[i];
  for (size_t j = 0; j < q.size(); ++j) dual_obj += plan.dual_v[j] * q[j];
  plan.dual_gap = plan.cost - dual_obj;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < k; ++j) {
      const double viol = -pi[static_cast<size_t>(i)] + pi[static_cast<size_t>(m + j)] - C(i, j);
      plan.max_dual_violation = std::max(plan.max_dual_violation, viol);
    }

  const double tol = 1e-9 * (1.0 + cmax);
  if (std::fabs(plan.dual_gap) > tol || plan.max_dual_violation > tol ||
      plan.max_marginal_residual > 1e-9 * std::max(1.0, mass_p))
    throw std::runtime_error(
        "exact_ot_finite: optimality certificate failed (gap=" +
        std::to_string(plan.dual_gap) + ", violation=" +
        std::to_string(plan.max_dual_violation) + ", residual=" +
        std::to_string(plan.max_marginal_residual) + ")");
  return plan;
}

TransportPlan exact_ot_finite(const Eigen::MatrixXd& cost, const std::vector<double>& p,
                              const std::vector<double>& q) {
  return exact_ot_finite([&cost](int i, int j) { return cost(i, j); },
                         static_cast<int>(cost.rows()), static_cast<int>(cost.cols()), p, q);
}

double kantorovich_dual_check(const TransportPlan& plan, const std::vector<double>& p,
                              const std::vector<double>& q, const CostFn& cost, int n) {
  if (static_cast<int>(p.size()) != n || static_cast<int>(q.size()) != n)
    throw std::invalid_argument("kantorovich_dual_check: common-space sizes disagree");
  // f_i = min_k cost(i,k) + g_k is 1-Lipschitz for any g when cost is a
  // metric; seeding g = -v recovers at least the solver's dual objective.
  std::vector<double> f(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    double best = kInf;
    for (int k = 0; k < n; ++k)
      best = std::min(best, cost(i, k) - plan.dual_v[static_cast<size_t>(k)]);
    f[static_cast<size_t>(i)] = best;
  }
  double witness = 0.0;
  for (int i = 0; i < n; ++i)
    witness += f[static_cast<size_t>(i)] * (p[static_cast<size_t>(i)] - q[static_cast<size_t>(i)]);
  const double gap = plan.cost - witness;
  if (gap < -1e-9 * (1.0 + std::fabs(plan.cost)))
    throw AssumptionError("kantorovich_dual_check: witness exceeds primal cost");
  return std::max(gap, 0.0);
}

}  // namespace dobgibbs
