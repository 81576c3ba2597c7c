#include "vortex/commands.hpp"

#include <algorithm>
#include <cmath>
#include <chrono>
#include <filesystem>
#include <future>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace vortex {

namespace fs = std::filesystem;

RunConfig effective_config(const CommandOptions& opts, ProblemKind fallback) {
  RunConfig cfg;
  if (opts.config_path) {
    cfg = load_config(*opts.config_path);
  } else {
    cfg.kind = fallback;
#ifdef VORTEX_CORRUPT_LAMBDA_SIGN
    cfg.lambda_sign = -1.0;
#endif
  }
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.grid) cfg.grid = *opts.grid;
  if (opts.eps_min) cfg.continuation.eps_min = *opts.eps_min;
  if (opts.quick) cfg.quick = true;
  cfg.validate();
  return cfg;
}

GeometryPtr build_geometry(const RunConfig& cfg) {
  if (cfg.backend == BackendKind::torus) return Geometry::torus(cfg.grid, cfg.period, cfg.lambda_sign);
  return Geometry::hopf(cfg.grid, cfg.lambda_sign);
}

SplitModel build_model(const RunConfig& cfg, const Geometry& g) {
  SplitModel m;
  if (!cfg.degrees.empty()) {
    m.degrees = cfg.degrees;
  } else if (!cfg.weights.empty()) {
    for (double w : cfg.weights) m.degrees.push_back(hopf_line_degree(g, w));
  } else {
    m.degrees = {0.0};
  }
  m.phi_index = cfg.phi_index;
  m.extensions = cfg.extensions;
  m.validate();
  return m;
}

PairProblem build_pair(const RunConfig& cfg, const GeometryPtr& g) {
  if (!cfg.tau) throw std::invalid_argument("tau is required");
  if (!cfg.extensions.empty())
    throw std::invalid_argument("extensions are analyzer-only; solves use split bundles");
  const SplitModel m = build_model(cfg, *g);
  std::vector<Complex> amps(m.rank(), Complex(0.0));
  if (cfg.phi.empty()) amps[m.phi_index] = 1.0;
  else amps.assign(cfg.phi.begin(), cfg.phi.end());
  return make_split_pair(g, m, amps, *cfg.tau);
}

HiggsProblem build_higgs(const RunConfig& cfg, const GeometryPtr& g) {
  const SplitModel m = build_model(cfg, *g);
  const int r = m.rank();
  CMat theta = CMat::Zero(r, r);
  if (!cfg.theta.empty())
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) theta(i, j) = cfg.theta[i * r + j];
  HiggsProblem probe = make_higgs_split(g, m.degrees, theta, 0.0);
  const double lambda = cfg.lambda ? *cfg.lambda : higgs_lambda_from_degree(probe);
  return make_higgs_split(g, m.degrees, theta, lambda);
}

MatrixField build_start(const RunConfig& cfg, const Geometry& g) {
  const int r = cfg.rank();
  if (cfg.start == "identity") return MatrixField::identity(g.points(), r);
  const MatrixField u = smooth_random_field(g, r, cfg.seed, cfg.start_amplitude);
  return u.map([](const CMat& x) { return fiber::herm_exp(x); });
}

namespace {

std::string verdict_of(const SolveReport& r, bool higgs) {
  if (r.status == RunStatus::converged) return "converged";
  if (higgs) return "boundary";
  return r.status == RunStatus::diverged ? "diverged" : "failed";
}

int exit_code_of(const std::string& verdict) {
  if (verdict == "converged") return 0;
  if (verdict == "diverged" || verdict == "boundary") return 2;
  return 1;
}

Json config_json(const RunConfig& cfg) {
  Json j;
  j["kind"] = to_string(cfg.kind);
  j["backend"] = to_string(cfg.backend);
  j["grid"] = cfg.grid;
  if (cfg.tau) j["tau"] = *cfg.tau;
  if (cfg.lambda) j["lambda"] = *cfg.lambda;
  j["eps_min"] = cfg.continuation.eps_min;
  j["ratio"] = cfg.continuation.ratio;
  j["newton_tol"] = cfg.continuation.newton_tolerance;
  j["cap"] = cfg.continuation.cap;
  j["seed"] = cfg.seed;
  j["start"] = cfg.start;
  return j;
}

void write_outputs(const std::string& dir, const Json& report, const SolveReport& r, const std::string& title) {
  fs::create_directories(dir);
  write_text_file((fs::path(dir) / "report.json").string(), report.dump(2) + "\n");
  write_text_file((fs::path(dir) / "trace.csv").string(), trace_csv(r.trace));
  write_text_file((fs::path(dir) / "convergence.svg").string(), convergence_svg(r.trace, title));
}

template <typename Fn>
int guarded(std::ostream& err, Fn fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int cmd_solve(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = effective_config(opts);
    if (cfg.kind != ProblemKind::vortex && cfg.kind != ProblemKind::higgs)
      throw std::invalid_argument("solve needs kind = vortex or higgs");
    const GeometryPtr g = build_geometry(cfg);
    const MatrixField start = build_start(cfg, *g);
    const std::string dir = resolve_output_dir(cfg, opts.out);
    Json report;
    report["config"] = config_json(cfg);
    SolveReport r;
    const bool higgs = cfg.kind == ProblemKind::higgs;
    if (higgs) {
      const HiggsProblem hp = build_higgs(cfg, g);
      r = run_continuation(hp.pair(), cfg.continuation, &hp.theta(), &start);
      report["problem"] = {{"degree", hp.pair().degree()},
                           {"lambda", hp.lambda()},
                           {"theta_holomorphic_defect", hp.holomorphic_defect()},
                           {"boundary_run", true}};
    } else {
      const PairProblem p = build_pair(cfg, g);
      r = run_continuation(p, cfg.continuation, nullptr, &start);
      Json prob;
      prob["degree"] = p.degree();
      prob["phi_norm_squared"] = p.phi_norm_squared();
      prob["tau"] = p.tau();
      prob["phi_holomorphic_defect"] = p.holomorphic_defect();
      if (p.model()) prob["stability"] = stability_json(analyze(*p.model(), *g, p.tau()));
      report["problem"] = prob;
    }
    const std::string verdict = verdict_of(r, higgs);
    report["verdict"] = verdict;
    report["solve"] = solve_report_json(r);
    report["trace_file"] = "trace.csv";
    report["plot_file"] = "convergence.svg";
    write_outputs(dir, report, r, to_string(cfg.kind) + " on " + to_string(cfg.backend));
    out << verdict << ": residual " << std::scientific << std::setprecision(3) << r.final_residual
        << ", sup|log f| " << r.final_sup_log_f << ", eps reached " << r.eps_reached;
    if (r.status != RunStatus::converged) out << " (" << to_string(r.cause) << ": " << r.message << ")";
    out << "\nwrote " << dir << "/report.json\n";
    return exit_code_of(verdict);
  });
}

SweepResult sweep_tau(const PairProblem& p, const ContinuationConfig& cfg, double low, double high, double width) {
  if (!(low < high)) throw std::invalid_argument("sweep: empty bracket");
  SweepResult res;
  auto run = [&p, &cfg](double tau) { return run_continuation(p.with_tau(tau), cfg); };
  auto batch = [&](const std::vector<double>& taus) {
    std::vector<std::future<SolveReport>> jobs;
    for (double t : taus) jobs.push_back(std::async(std::launch::async, run, t));
    std::vector<bool> ok;
    for (std::size_t i = 0; i < taus.size(); ++i) {
      SolveReport r = jobs[i].get();
      ok.push_back(r.status == RunStatus::converged);
      res.runs.emplace_back(taus[i], std::move(r));
    }
    return ok;
  };
  const std::vector<bool> ends = batch({low, high});
  if (ends[0] || !ends[1]) {
    throw std::runtime_error(std::string("sweep bracket error: ") +
                             (ends[0] ? "the lower end already converges" : "the upper end does not converge"));
  }
  const double initial = high - low;
  while (high - low > width * std::max(std::abs(low), std::abs(high)) && high - low > 1e-3 * initial) {
    const double step = (high - low) / 4.0;
    const std::vector<double> pts = {low + step, low + 2 * step, low + 3 * step};
    const std::vector<bool> ok = batch(pts);
    double new_low = low, new_high = high;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (ok[i]) {
        new_high = pts[i];
        break;
      }
      new_low = pts[i];
    }
    low = new_low;
    high = new_high;
  }
  res.low = low;
  res.high = high;
  res.estimate = 0.5 * (low + high);
  std::sort(res.runs.begin(), res.runs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return res;
}

int cmd_sweep_tau(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig cfg = effective_config(opts);
    if (cfg.kind != ProblemKind::vortex) throw std::invalid_argument("sweep-tau needs kind = vortex");
    const GeometryPtr g = build_geometry(cfg);
    if (!cfg.tau) cfg.tau = 1.0;
    const PairProblem p = build_pair(cfg, g);
    const StabilityReport window = stability_window(*p.model(), *g);
    double low = 0.0, high = 0.0;
    if (cfg.tau_low && cfg.tau_high) {
      low = *cfg.tau_low;
      high = *cfg.tau_high;
    } else if (window.window_low > 0.0) {
      low = 0.5 * window.window_low;
      high = 2.0 * window.window_low;
    } else {
      throw std::invalid_argument("sweep-tau needs tau_low and tau_high when the analyzer threshold is not positive");
    }
    ContinuationConfig cc = cfg.continuation;
    cc.ritz_steps = 0;
    const SweepResult s = sweep_tau(p, cc, low, high, cfg.sweep_width);
    Json j;
    j["config"] = config_json(cfg);
    j["bracket"] = {s.low, s.high};
    j["threshold_estimate"] = s.estimate;
    j["analyzer_threshold"] = json_number(window.window_low);
    const double ref = window.window_low;
    j["relative_error"] = ref != 0.0 ? json_number(std::abs(s.estimate - ref) / std::abs(ref)) : Json(nullptr);
    j["absolute_error"] = std::abs(s.estimate - ref);
    Json runs = Json::array();
    for (const auto& [tau, r] : s.runs) {
      Json e = solve_report_json(r);
      e["tau"] = tau;
      runs.push_back(e);
    }
    j["runs"] = runs;
    const std::string dir = resolve_output_dir(cfg, opts.out);
    fs::create_directories(dir);
    write_text_file((fs::path(dir) / "sweep.json").string(), j.dump(2) + "\n");
    out << std::setprecision(6) << "threshold estimate " << s.estimate << " in [" << s.low << ", " << s.high
        << "], analyzer " << ref << "\nwrote " << dir << "/sweep.json\n";
    return 0;
  });
}

int cmd_stability(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = effective_config(opts);
    const GeometryPtr g = build_geometry(cfg);
    const SplitModel m = build_model(cfg, *g);
    const StabilityReport rep = cfg.tau ? analyze(m, *g, *cfg.tau) : stability_window(m, *g);
    Json j = stability_json(rep);
    if (cfg.tau) j["tau"] = *cfg.tau;
    const std::string dir = resolve_output_dir(cfg, opts.out);
    fs::create_directories(dir);
    write_text_file((fs::path(dir) / "stability.json").string(), j.dump(2) + "\n");
    out << std::setprecision(8) << "tau window (" << rep.window_low << ", " << rep.window_high << ")";
    if (rep.verdict) out << ", verdict " << to_string(*rep.verdict);
    out << "\n" << rep.scope_note << "\n";
    return 0;
  });
}

int cmd_verify(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = effective_config(opts, ProblemKind::verify);
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<VerifyCheck> checks = run_verify_suite(cfg, cfg.quick);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Json matrix;
    bool all = true;
    for (const VerifyCheck& c : checks) {
      matrix[c.name] = {{"value", json_number(c.value)}, {"threshold", c.threshold}, {"pass", c.pass}, {"detail", c.detail}};
      all = all && c.pass;
      out << (c.pass ? "PASS " : "FAIL ") << c.name << "  " << std::scientific << std::setprecision(3) << c.value
          << (c.detail.empty() ? "" : "  " + c.detail) << "\n";
    }
    Json j;
    j["quick"] = cfg.quick;
    j["lambda_sign"] = cfg.lambda_sign;
    j["checks"] = matrix;
    j["all_pass"] = all;
    j["wall_seconds"] = seconds;
    const std::string dir = resolve_output_dir(cfg, opts.out);
    fs::create_directories(dir);
    write_text_file((fs::path(dir) / "verify.json").string(), j.dump(2) + "\n");
    out << (all ? "all checks passed" : "some checks FAILED") << " in " << std::fixed << std::setprecision(1) << seconds
        << " s\n";
    return all ? 0 : 1;
  });
}

int cmd_report(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig cfg;
    if (opts.config_path) cfg = load_config(*opts.config_path);
    const std::string dir = resolve_output_dir(cfg, opts.out);
    const Json report = Json::parse(read_text_file((fs::path(dir) / "report.json").string()));
    const std::vector<TraceRow> trace = parse_trace_csv(read_text_file((fs::path(dir) / "trace.csv").string()));
    write_text_file((fs::path(dir) / "convergence.svg").string(), convergence_svg(trace, "convergence"));
    out << "verdict " << report.value("verdict", std::string("?")) << ", " << trace.size() << " accepted states\n";
    out << std::setw(12) << "eps" << std::setw(14) << "residual" << std::setw(14) << "sup|log f|" << std::setw(8)
        << "newton\n";
    for (const TraceRow& row : trace)
      out << std::scientific << std::setprecision(3) << std::setw(12) << row.eps << std::setw(14) << row.residual_sup
          << std::setw(14) << row.diagnostics.sup_log_f << std::setw(8) << row.diagnostics.newton_iterations << "\n";
    return 0;
  });
}

}  // namespace vortex
