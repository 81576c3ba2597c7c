// Run configuration: a flat "key = value" text format, one entry per line,
// '#' starts a comment. Unknown keys are rejected and every value is
// validated before any computation. See README.md for the key list.
#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vortex/continuation.hpp"

namespace vortex {

enum class ProblemKind { vortex, higgs, stability, verify };
std::string to_string(ProblemKind k);

struct RunConfig {
  ProblemKind kind = ProblemKind::vortex;
  BackendKind backend = BackendKind::torus;
  int grid = 64;
  double period = 1.0;
  /// Summand degrees; on the Hopf backend `weights` may be given instead.
  std::vector<double> degrees;
  std::vector<double> weights;
  std::vector<std::pair<int, int>> extensions;
  int phi_index = 0;
  /// phi amplitude per summand (empty: 1 on the phi summand, 0 elsewhere).
  std::vector<std::complex<double>> phi;
  /// Higgs coefficient, row-major r x r.
  std::vector<std::complex<double>> theta;
  std::optional<double> tau;
  std::optional<double> lambda;
  ContinuationConfig continuation;
  std::string out;
  std::uint64_t seed = 1;
  /// "identity" or "random" (random smooth positive start metric).
  std::string start = "identity";
  double start_amplitude = 0.02;
  std::optional<double> tau_low;
  std::optional<double> tau_high;
  double sweep_width = 0.01;
  double lambda_sign = 1.0;
  bool quick = false;

  int rank() const;
  void validate() const;
};

/// Parses config text; throws std::invalid_argument naming the line on any
/// unknown key or bad value.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
/// All recognised keys, in documentation order.
const std::vector<std::string>& config_keys();

/// Effective output directory: explicit flag, then VORTEX_OUT_DIR, then the
/// config value, then "vortex_out".
std::string resolve_output_dir(const RunConfig& cfg, const std::optional<std::string>& flag);

}  // namespace vortex
