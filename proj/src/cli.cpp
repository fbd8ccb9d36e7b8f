#include "dobgibbs/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <iostream>
#include <iterator>

#include "dobgibbs/concentration.hpp"
#include "dobgibbs/config.hpp"
#include "dobgibbs/dobrushin.hpp"
#include "dobgibbs/kernel_exact.hpp"
#include "dobgibbs/observables.hpp"
#include "dobgibbs/report.hpp"
#include "dobgibbs/sampler.hpp"
#include "dobgibbs/util.hpp"
#include "dobgibbs/version.hpp"

namespace dobgibbs {

namespace {

using Row = ReportWriter::Row;

void matrix_rows(std::vector<Row>& rows, const std::string& name,
                 const Eigen::MatrixXd& M) {
  for (long i = 0; i < M.rows(); ++i)
    for (long j = 0; j < M.cols(); ++j)
      rows.push_back({name, i + 1, j + 1, M(i, j)});
}

void cmd_coeffs(const ExperimentConfig& cfg, ReportWriter& w) {
  const CoefficientMatrix cm = coefficient_matrix(cfg.model, cfg.metric, cfg.cap);
  const ContractionCertificate cert = contraction_certificate(cm.C);
  const SweepProduct qp = q_product(cm.C);

  std::vector<Row> mats;
  matrix_rows(mats, "C", cm.C);
  for (int i = 0; i < cfg.model.n_sites; ++i)
    matrix_rows(mats, "B" + std::to_string(i + 1), update_matrix(cm.C, i));
  matrix_rows(mats, "Q", qp.Q);
  if (cfg.model.n_sites <= 12) matrix_rows(mats, "Q_closed", q_closed_form(cm.C));
  w.write_table("coeffs_matrices", {"matrix", "i", "j", "value"}, mats);

  Row s = {cfg.model.n_sites, cm.r,         cm.r1,
           cert.norms.h1,     cert.norms.h2, cert.norms.h2_half,
           cert.inf_norm,     cert.one_norm, cert.bound_inf,
           cert.bound_one,    cert.margin_inf, cert.margin_one,
           cert.inf_ok,       cert.one_ok};
  if (cm.r1 < 1.0)
    s.push_back(ricci_lower_bound(cm.r1));
  else
    s.push_back("undefined");
  w.write_table("coeffs_summary",
                {"n_sites", "r", "r1", "h1", "h2", "h2_half", "q_inf", "q_one",
                 "bound_inf", "bound_one", "margin_inf", "margin_one", "inf_ok",
                 "one_ok", "ricci_lower"},
                {s});
}

void cmd_exact(const ExperimentConfig& cfg, ReportWriter& w) {
  if (!cfg.model.finite_sites())
    throw AssumptionError("exact enumeration needs a finite local state space");
  const Configuration x0 = make_configuration(cfg.model, cfg.x0);
  const std::vector<double> mu = exact_gibbs_measure(cfg.model, cfg.cap);
  const CoefficientMatrix cm = coefficient_matrix(cfg.model, cfg.metric, cfg.cap);
  const std::vector<StationaryGap> gaps =
      exact_w1_to_stationary(cfg.model, mu, x0, cfg.k_max, cfg.metric, cm.r, cfg.cap);
  std::vector<Row> rows;
  for (const StationaryGap& g : gaps)
    rows.push_back({g.k, g.w1_exact, g.tv_half, g.bound_nrk});
  w.write_table("exact", {"k", "w1_exact", "tv_half", "bound_nrk"}, rows);
}

void cmd_couple(const ExperimentConfig& cfg, ReportWriter& w) {
  if (cfg.replicas < 1) throw ConfigError("need replicas >= 1", "replicas");
  const Configuration x0 = make_configuration(cfg.model, cfg.x0);
  const StartMode start =
      cfg.y0 == "stationary" ? StartMode::kStationary : StartMode::kFixed;
  const Configuration y0 =
      start == StartMode::kStationary ? x0 : make_configuration(cfg.model, cfg.y0);
  const DecayReport rep = estimate_w1_decay(cfg.model, x0, y0, start, cfg.k_max,
                                            cfg.replicas, cfg.metric, cfg.seed,
                                            cfg.threads);
  std::vector<std::string> cols = {"sweep"};
  for (int i = 0; i < cfg.model.n_sites; ++i)
    cols.push_back("mean_site_" + std::to_string(i + 1));
  cols.insert(cols.end(), {"mean_l1", "stderr_l1", "bound_theorem23", "bound_qk"});
  std::vector<Row> rows;
  for (uint64_t k = 0; k <= cfg.k_max; ++k) {
    Row row = {k};
    for (int i = 0; i < cfg.model.n_sites; ++i)
      row.push_back(rep.mean_site(static_cast<long>(k), i));
    row.insert(row.end(), {rep.mean_l1[k], rep.stderr_l1[k], rep.bound_thm23[k],
                           rep.bound_qk[k]});
    rows.push_back(std::move(row));
  }
  w.write_table("couple", cols, rows);
}

void cmd_simulate(const ExperimentConfig& cfg, ReportWriter& w) {
  if (cfg.replicas < 1) throw ConfigError("need replicas >= 1", "replicas");
  const ConditionalModel& m = cfg.model;
  const Configuration x0 = make_configuration(m, cfg.x0);
  const Observable obs = make_observable(cfg.observable, m, cfg.metric);
  const uint64_t rows_n = cfg.k_max + 1;
  const int n = m.n_sites;
  const std::vector<double> atoms =
      m.finite_sites() ? m.atom_values() : std::vector<double>();

  const uint64_t block = 64;
  const uint64_t n_blocks = (cfg.replicas + block - 1) / block;
  std::vector<Eigen::MatrixXd> site_part(n_blocks);
  std::vector<Eigen::VectorXd> f_part(n_blocks), f2_part(n_blocks);
  parallel_blocks(cfg.replicas, block, resolve_threads(cfg.threads),
                  [&](uint64_t bi, uint64_t begin, uint64_t end) {
                    Eigen::MatrixXd sp = Eigen::MatrixXd::Zero(
                        static_cast<long>(rows_n), n);
                    Eigen::VectorXd fp = Eigen::VectorXd::Zero(static_cast<long>(rows_n));
                    Eigen::VectorXd fp2 = fp;
                    for (uint64_t rep = begin; rep < end; ++rep) {
                      Configuration z = x0;
                      for (uint64_t k = 0; k <= cfg.k_max; ++k) {
                        if (k > 0) z = gibbs_sweep(m, z, cfg.seed, rep, k);
                        for (int i = 0; i < n; ++i) {
                          const double v = z.values[static_cast<size_t>(i)];
                          sp(static_cast<long>(k), i) +=
                              atoms.empty() ? v : atoms[static_cast<size_t>(
                                                      static_cast<int>(v))];
                        }
                        const double fv = obs.f(z);
                        fp(static_cast<long>(k)) += fv;
                        fp2(static_cast<long>(k)) += fv * fv;
                      }
                    }
                    site_part[bi] = std::move(sp);
                    f_part[bi] = std::move(fp);
                    f2_part[bi] = std::move(fp2);
                  });
  Eigen::MatrixXd site_sum = Eigen::MatrixXd::Zero(static_cast<long>(rows_n), n);
  Eigen::VectorXd f_sum = Eigen::VectorXd::Zero(static_cast<long>(rows_n));
  Eigen::VectorXd f2_sum = f_sum;
  for (uint64_t bi = 0; bi < n_blocks; ++bi) {
    site_sum += site_part[bi];
    f_sum += f_part[bi];
    f2_sum += f2_part[bi];
  }

  std::vector<std::string> cols = {"sweep"};
  for (int i = 0; i < n; ++i) cols.push_back("mean_site_" + std::to_string(i + 1));
  cols.insert(cols.end(), {"mean_f", "stderr_f"});
  const double R = static_cast<double>(cfg.replicas);
  std::vector<Row> rows;
  for (uint64_t k = 0; k <= cfg.k_max; ++k) {
    Row row = {k};
    for (int i = 0; i < n; ++i) row.push_back(site_sum(static_cast<long>(k), i) / R);
    const double mf = f_sum(static_cast<long>(k)) / R;
    const double var = std::max(
        0.0, (f2_sum(static_cast<long>(k)) - R * mf * mf) / std::max(1.0, R - 1.0));
    row.insert(row.end(), {mf, std::sqrt(var / R)});
    rows.push_back(std::move(row));
  }
  w.write_table("simulate", cols, rows);
}

void cmd_concentrate(const ExperimentConfig& cfg, ReportWriter& w) {
  if (cfg.replicas < 1000) throw ConfigError("need replicas >= 1000", "replicas");
  if (cfg.t_grid.empty()) throw ConfigError("t_grid is required", "t_grid");
  const Configuration x0 = make_configuration(cfg.model, cfg.x0);
  const Observable obs = make_observable(cfg.observable, cfg.model, cfg.metric);
  const double c1 = cfg.c1 > 0.0 ? cfg.c1 : default_c1(cfg.model, cfg.metric);
  const CenteringPart part =
      cfg.part == "a" ? CenteringPart::kPartA : CenteringPart::kPartB;
  const TailReport tr = empirical_tail(cfg.model, obs, x0, cfg.n, cfg.t_grid,
                                       cfg.replicas, part, c1, cfg.metric, cfg.seed,
                                       cfg.threads, cfg.cap);
  std::vector<Row> rows;
  for (const TailPoint& p : tr.points)
    rows.push_back({p.t, p.tail_count, tr.replicas, p.tail_hat, p.ci_lo, p.ci_hi,
                    p.bound_a, p.bound_b, tr.params.m_bias, tr.params.n,
                    tr.params.n_sites, tr.params.r1, tr.params.c1, tr.params.alpha,
                    cfg.seed});
  w.write_table("concentrate",
                {"t", "tail_count", "replicas", "tail_hat", "ci_lo", "ci_hi",
                 "bound_a", "bound_b", "M", "n", "N", "r1", "C1", "alpha", "seed"},
                rows);
  w.write_table("concentrate_centering",
                {"part", "centering", "exact", "stderr"},
                {{cfg.part, tr.centering, tr.centering_exact, tr.centering_stderr}});
}

void cmd_report(const ExperimentConfig& cfg, ReportWriter& w) {
  const ConditionalModel& m = cfg.model;
  const CoefficientMatrix cm = coefficient_matrix(m, cfg.metric, cfg.cap);
  const ContractionCertificate cert = contraction_certificate(cm.C);
  std::vector<Row> rows;

  rows.push_back({"sweep_contraction_inf", cert.inf_norm,
                  cert.norms.h1 ? Row::value_type(cert.bound_inf) : Row::value_type("no_h1"),
                  cert.margin_inf, cert.inf_ok});
  rows.push_back({"sweep_contraction_one", cert.one_norm,
                  cert.norms.h2 ? Row::value_type(cert.bound_one) : Row::value_type("no_h2"),
                  cert.margin_one, cert.one_ok});

  if (m.n_sites <= 12) {
    const double dev = (q_closed_form(cm.C) - q_product(cm.C).Q).cwiseAbs().maxCoeff();
    rows.push_back({"closed_form_vs_product", dev, 1e-12, 1e-12 - dev, dev <= 1e-12});
  }

  bool enumerable = false;
  if (m.finite_sites()) {
    try {
      enumerable = state_space_size(m.n_sites, m.local_alphabet(), cfg.cap) <= cfg.cap;
    } catch (const ConfigError&) {
      enumerable = false;
    }
  }
  if (enumerable) {
    const std::vector<double> mu = exact_gibbs_measure(m, cfg.cap);
    const TransitionMatrix tm = build_transition_matrix(m, cfg.cap, cfg.threads);
    const double resid = invariance_check(tm, mu);
    rows.push_back({"stationarity_residual", resid, 1e-10, 1e-10 - resid,
                    resid <= 1e-10});
    if (cm.r < 1.0) {
      const Observable obs = make_observable(cfg.observable, m, cfg.metric);
      const Configuration x0 = make_configuration(m, cfg.x0);
      const CesaroBias cb =
          cesaro_bias_check(m, obs, x0, cfg.n, cfg.metric, cfg.cap);
      rows.push_back({"cesaro_bias_leq_M_over_n", cb.bias, cb.m_over_n,
                      cb.m_over_n - cb.bias, cb.bias <= cb.m_over_n + 1e-10});
    }
  }

  {
    const Configuration x0 = make_configuration(m, cfg.x0);
    const Configuration y0 = cfg.y0 == "stationary"
                                 ? make_configuration(m, "all_plus")
                                 : make_configuration(m, cfg.y0);
    const MarginalCheck mc =
        marginal_validity_check(m, x0, y0, 0, std::max<uint64_t>(cfg.draws, 10000),
                                cfg.metric, cfg.seed);
    rows.push_back({"coupling_marginal_p_" + mc.test, mc.p_value, 1e-4,
                    mc.p_value - 1e-4, mc.p_value >= 1e-4});
  }

  if (cm.r1 < 0.5) {
    const double c1 = cfg.c1 > 0.0 ? cfg.c1 : default_c1(m, cfg.metric);
    const double c_t1 =
        cfg.c_t1 > 0.0
            ? cfg.c_t1
            : static_cast<double>(m.n_sites) * c1 / ((1.0 - cm.r1) * (1.0 - cm.r1));
    std::vector<double> grid = cfg.lambda_grid;
    if (grid.empty()) grid = {-1.0, -0.5, -0.25, 0.25, 0.5, 1.0};
    const Observable obs = make_observable(cfg.observable, m, cfg.metric);
    const Configuration x0 = make_configuration(m, cfg.x0);
    const MgfReport mr = t1_mgf_check(m, obs, x0, grid, c_t1,
                                      std::max<uint64_t>(cfg.draws, 10000), cfg.seed,
                                      cfg.threads, cfg.cap);
    for (const MgfPoint& p : mr.points)
      rows.push_back({"mgf_lambda=" + fmt17(p.lambda), p.log_mgf, p.bound,
                      p.margin, p.stable && p.margin >= -3.0 * p.stderr_});
  }

  w.write_table("report", {"check", "value", "bound", "margin", "ok"}, rows);
}

struct CommonFlags {
  std::string config_path;
  std::string out = ".";
  std::string format = "csv";
  uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
  bool threads_set = false;
};

void add_common(CLI::App* sub, CommonFlags& fl) {
  sub->add_option("--config", fl.config_path, "experiment config file")->required();
  sub->add_option("--seed", fl.seed, "master seed (overrides config)");
  sub->add_option("--out", fl.out, "output directory");
  sub->add_option("--format", fl.format, "csv (with json mirror) or json");
  sub->add_option("--threads", fl.threads,
                  "worker threads (DOBRUSHIN_GIBBS_THREADS as fallback)");
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{std::string(kToolName) +
               " - systematic-scan Gibbs sampling with Dobrushin certificates"};
  app.require_subcommand(1);

  struct Cmd {
    const char* name;
    const char* help;
    void (*fn)(const ExperimentConfig&, ReportWriter&);
  };
  const Cmd cmds[] = {
      {"coeffs", "interdependence matrix, sweep product, contraction certificates",
       &cmd_coeffs},
      {"exact", "exact per-sweep W1 distance to stationarity", &cmd_exact},
      {"couple", "coupled-chain W1 decay against the analytic envelopes",
       &cmd_couple},
      {"simulate", "plain-chain trajectories of site means and an observable",
       &cmd_simulate},
      {"concentrate", "empirical-mean tail frequencies against the closed-form bound",
       &cmd_concentrate},
      {"report", "one-shot certificate and validity battery", &cmd_report},
  };
  CommonFlags fl[std::size(cmds)];
  for (size_t c = 0; c < std::size(cmds); ++c) {
    CLI::App* sub = app.add_subcommand(cmds[c].name, cmds[c].help);
    add_common(sub, fl[c]);
  }

  try {
    app.parse(argc, argv);
    for (size_t c = 0; c < std::size(cmds); ++c) {
      CLI::App* sub = app.get_subcommand(cmds[c].name);
      if (!sub->parsed()) continue;
      CommonFlags& f = fl[c];
      f.seed_set = sub->count("--seed") > 0;
      f.threads_set = sub->count("--threads") > 0;
      ExperimentConfig cfg = parse_experiment_file(f.config_path);
      if (f.seed_set) cfg.seed = f.seed;
      if (f.threads_set) cfg.threads = f.threads;
      ReportWriter writer(f.out, f.format, cfg.config_hash, cfg.seed);
      cmds[c].fn(cfg, writer);
    }
    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error kind=config key=cli msg=\"" << e.what() << "\"\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error kind=config key=" << (e.key.empty() ? "-" : e.key)
              << " msg=\"" << e.what() << "\"\n";
    return 2;
  } catch (const AssumptionError& e) {
    std::cerr << "error kind=assumption key=- msg=\"" << e.what() << "\"\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error kind=internal key=- msg=\"" << e.what() << "\"\n";
    return 1;
  }
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back(kToolName);
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace dobgibbs
