#include "vortex/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace vortex {

std::string to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::vortex: return "vortex";
    case ProblemKind::higgs: return "higgs";
    case ProblemKind::stability: return "stability";
    case ProblemKind::verify: return "verify";
  }
  return "?";
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "kind",       "backend",    "grid",          "period",       "degrees",      "weights",
      "extensions", "phi_index",  "phi",           "theta",        "tau",          "lambda",
      "eps_min",    "ratio",      "newton_tol",    "max_newton",   "linear_tol",   "cap",
      "gmres_restart", "gmres_max_iterations", "ritz_steps", "polish", "out",     "seed",
      "start",      "start_amplitude", "tau_low",  "tau_high",     "sweep_width",  "lambda_sign",
      "quick"};
  return keys;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double parse_double(const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + v + "'");
  }
  if (used != v.size()) throw std::invalid_argument("not a number: '" + v + "'");
  if (!std::isfinite(x)) throw std::invalid_argument("not finite: '" + v + "'");
  return x;
}

long long parse_int(const std::string& v) {
  std::size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("not an integer: '" + v + "'");
  }
  if (used != v.size()) throw std::invalid_argument("not an integer: '" + v + "'");
  return x;
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("not a boolean: '" + v + "'");
}

/// "a" or "a:b" for a + b i.
std::complex<double> parse_complex(const std::string& v) {
  const auto colon = v.find(':');
  if (colon == std::string::npos) return {parse_double(v), 0.0};
  return {parse_double(trim(v.substr(0, colon))), parse_double(trim(v.substr(colon + 1)))};
}

std::vector<double> parse_list(const std::string& v) {
  std::vector<double> out;
  for (const std::string& item : split(v, ',')) out.push_back(parse_double(item));
  return out;
}

void apply(RunConfig& cfg, const std::string& key, const std::string& v) {
  ContinuationConfig& c = cfg.continuation;
  if (key == "kind") {
    if (v == "vortex") cfg.kind = ProblemKind::vortex;
    else if (v == "higgs") cfg.kind = ProblemKind::higgs;
    else if (v == "stability") cfg.kind = ProblemKind::stability;
    else if (v == "verify") cfg.kind = ProblemKind::verify;
    else throw std::invalid_argument("unknown problem kind '" + v + "'");
  } else if (key == "backend") {
    if (v == "torus") cfg.backend = BackendKind::torus;
    else if (v == "hopf") cfg.backend = BackendKind::hopf;
    else throw std::invalid_argument("unknown backend '" + v + "'");
  } else if (key == "grid") {
    cfg.grid = static_cast<int>(parse_int(v));
  } else if (key == "period") {
    cfg.period = parse_double(v);
  } else if (key == "degrees") {
    cfg.degrees = parse_list(v);
  } else if (key == "weights") {
    cfg.weights = parse_list(v);
  } else if (key == "extensions") {
    cfg.extensions.clear();
    if (v.empty()) return;
    for (const std::string& item : split(v, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw std::invalid_argument("extension entries are i:j");
      cfg.extensions.emplace_back(static_cast<int>(parse_int(trim(item.substr(0, colon)))),
                                  static_cast<int>(parse_int(trim(item.substr(colon + 1)))));
    }
  } else if (key == "phi_index") {
    cfg.phi_index = static_cast<int>(parse_int(v));
  } else if (key == "phi") {
    cfg.phi.clear();
    for (const std::string& item : split(v, ',')) cfg.phi.push_back(parse_complex(item));
  } else if (key == "theta") {
    cfg.theta.clear();
    for (const std::string& row : split(v, ';'))
      for (const std::string& item : split(row, ',')) cfg.theta.push_back(parse_complex(item));
  } else if (key == "tau") {
    cfg.tau = parse_double(v);
  } else if (key == "lambda") {
    cfg.lambda = parse_double(v);
  } else if (key == "eps_min") {
    c.eps_min = parse_double(v);
  } else if (key == "ratio") {
    c.ratio = parse_double(v);
  } else if (key == "newton_tol") {
    c.newton_tolerance = parse_double(v);
  } else if (key == "max_newton") {
    c.max_newton = static_cast<int>(parse_int(v));
  } else if (key == "linear_tol") {
    c.linear_tolerance = parse_double(v);
  } else if (key == "cap") {
    c.cap = parse_double(v);
  } else if (key == "gmres_restart") {
    c.gmres_restart = static_cast<int>(parse_int(v));
  } else if (key == "gmres_max_iterations") {
    c.gmres_max_iterations = static_cast<int>(parse_int(v));
  } else if (key == "ritz_steps") {
    c.ritz_steps = static_cast<int>(parse_int(v));
  } else if (key == "polish") {
    c.polish = parse_bool(v);
  } else if (key == "out") {
    cfg.out = v;
  } else if (key == "seed") {
    const long long s = parse_int(v);
    if (s < 0) throw std::invalid_argument("seed must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(s);
  } else if (key == "start") {
    if (v != "identity" && v != "random") throw std::invalid_argument("start must be identity or random");
    cfg.start = v;
  } else if (key == "start_amplitude") {
    cfg.start_amplitude = parse_double(v);
  } else if (key == "tau_low") {
    cfg.tau_low = parse_double(v);
  } else if (key == "tau_high") {
    cfg.tau_high = parse_double(v);
  } else if (key == "sweep_width") {
    cfg.sweep_width = parse_double(v);
  } else if (key == "lambda_sign") {
    cfg.lambda_sign = parse_double(v);
  } else if (key == "quick") {
    cfg.quick = parse_bool(v);
  } else {
    throw std::invalid_argument("unknown key '" + key + "'");
  }
}

}  // namespace

int RunConfig::rank() const {
  if (!degrees.empty()) return static_cast<int>(degrees.size());
  if (!weights.empty()) return static_cast<int>(weights.size());
  return 1;
}

void RunConfig::validate() const {
  if (backend == BackendKind::torus) {
    if (grid < 8 || grid % 2 != 0) throw std::invalid_argument("grid must be an even integer >= 8 on the torus");
    if (!(period > 0.0)) throw std::invalid_argument("period must be positive");
    if (!weights.empty()) throw std::invalid_argument("weights apply to the hopf backend only");
  } else {
    if (grid < 16) throw std::invalid_argument("grid must be >= 16 on the hopf backend");
    if (!degrees.empty() && !weights.empty()) throw std::invalid_argument("give degrees or weights, not both");
    for (double w : weights)
      if (!(w > 0.0)) throw std::invalid_argument("deck weights must be positive");
  }
  const int r = rank();
  if (r > 16) throw std::invalid_argument("rank above 16 is not supported");
  if (phi_index < 0 || phi_index >= r) throw std::invalid_argument("phi_index out of range");
  if (!phi.empty() && static_cast<int>(phi.size()) != r)
    throw std::invalid_argument("phi needs one amplitude per summand");
  for (const auto& [i, j] : extensions)
    if (i < 0 || j < 0 || i >= r || j >= r || i == j) throw std::invalid_argument("extension index out of range");
  if (!theta.empty() && static_cast<int>(theta.size()) != r * r)
    throw std::invalid_argument("theta needs rank x rank entries");
  if (kind == ProblemKind::vortex && !tau) throw std::invalid_argument("vortex problems need tau");
  if (kind == ProblemKind::higgs && !extensions.empty())
    throw std::invalid_argument("higgs problems take no extensions");
  if (!(start_amplitude >= 0.0)) throw std::invalid_argument("start_amplitude must be non-negative");
  if (!(sweep_width > 0.0 && sweep_width < 1.0)) throw std::invalid_argument("sweep_width must lie in (0,1)");
  if (tau_low && tau_high && !(*tau_low < *tau_high)) throw std::invalid_argument("tau_low must be below tau_high");
  if (lambda_sign != 1.0 && lambda_sign != -1.0) throw std::invalid_argument("lambda_sign must be 1 or -1");
  continuation.validate();
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  std::map<std::string, int> seen;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(number) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (seen.count(key))
      throw std::invalid_argument("config line " + std::to_string(number) + ": duplicate key '" + key + "'");
    seen[key] = number;
    try {
      apply(cfg, key, value);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(number) + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string resolve_output_dir(const RunConfig& cfg, const std::optional<std::string>& flag) {
  if (flag && !flag->empty()) return *flag;
  if (const char* env = std::getenv("VORTEX_OUT_DIR"); env && *env) return env;
  if (!cfg.out.empty()) return cfg.out;
  return "vortex_out";
}

}  // namespace vortex
