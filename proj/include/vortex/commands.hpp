// Subcommands of the batch runner. Each returns the process exit code:
// 0 converged or pass, 2 diverged (a result, not an error), 1 operational
// failure or a failed verification.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vortex/config.hpp"
#include "vortex/higgs.hpp"
#include "vortex/report.hpp"

namespace vortex {

struct CommandOptions {
  std::optional<std::string> config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> grid;
  std::optional<double> eps_min;
  bool quick = false;
};

/// Loads the config (defaults when no path) and applies flag overrides.
RunConfig effective_config(const CommandOptions& opts, ProblemKind fallback = ProblemKind::vortex);

GeometryPtr build_geometry(const RunConfig& cfg);
SplitModel build_model(const RunConfig& cfg, const Geometry& g);
PairProblem build_pair(const RunConfig& cfg, const GeometryPtr& g);
HiggsProblem build_higgs(const RunConfig& cfg, const GeometryPtr& g);
/// Raw starting metric: identity, or exp of a smooth random field.
MatrixField build_start(const RunConfig& cfg, const Geometry& g);

int cmd_solve(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep_tau(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_stability(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_verify(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_report(const CommandOptions& opts, std::ostream& out, std::ostream& err);

struct SweepResult {
  double low = 0.0;
  double high = 0.0;
  double estimate = 0.0;
  std::vector<std::pair<double, SolveReport>> runs;
};

/// Bisection (four-way per round, runs in parallel) for the smallest
/// solvable tau in [low, high]. Throws std::runtime_error when the bracket
/// does not separate converged from non-converged runs.
SweepResult sweep_tau(const PairProblem& p, const ContinuationConfig& cfg, double low, double high, double width);

struct VerifyCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string detail;
};

/// Runs the property suite on reduced grids (quick) or desk grids.
std::vector<VerifyCheck> run_verify_suite(const RunConfig& cfg, bool quick);

}  // namespace vortex
