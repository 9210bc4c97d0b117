#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "sparsetrig/function_classes.hpp"
#include "sparsetrig/trig_polynomial.hpp"

namespace sparsetrig {

enum class ExperimentKind { Approx, Rates, Cubature, Oracle };

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

struct Tolerances {
  // Accepted fitted slope range. NaN picks the default around the predicted
  // slope (+-0.25 for rates and cubature; approx needs slope_hi).
  double slope_lo = std::numeric_limits<double>::quiet_NaN();
  double slope_hi = std::numeric_limits<double>::quiet_NaN();
  double min_fraction = 0.9;  // approx: share of seeds whose slope is <= slope_hi
  double match = 1e-10;  // oracle: |algorithm - oracle| for the L_2 equivalence
  double monitor_ratio = 10.0;  // oracle: residual / sigma_m threshold
  double exact = 1e-12;  // cubature exactness on the hyperbolic cross
};

// Everything a run depends on. Together with the library version it fixes
// every byte of results.csv on one platform.
struct ExperimentConfig {
  std::string id;
  ExperimentKind kind = ExperimentKind::Rates;
  // approx: "ia". rates: "layered" or "partial_sum". cubature: "smolyak".
  // oracle: "l2_equivalence" or "lebesgue".
  std::string method = "layered";
  std::string description;
  std::string claim;  // the asymptotic statement the run measures
  std::string guard;  // the parameter inequality the regime satisfies
  bool monitored = false;  // rate-band breaches warn instead of failing

  // regime
  int d = 2;
  std::string target = "class";  // "class" or "kernel"
  ClassKind family = ClassKind::W;
  double r = 1.5;
  double q = 2.0;
  double p = 2.0;
  double theta = std::numeric_limits<double>::infinity();
  double mu = 0.5;
  double t = 1.0;  // WCGA weakness
  double v = 1.0;  // IA schedule constant
  double a = 0.0;  // WAb only
  double b = 0.0;

  // ranges
  std::vector<int> n_values;
  int m_min = 8;
  int m_max = 256;
  std::vector<int> box;  // N for Box(N) dictionaries
  std::vector<std::uint64_t> seeds;

  int oversampling = 4;
  int extra_layers = 6;  // rates: samples truncated at Q_{n_max + extra}; cubature: at Q_{n + extra}
  std::string sampling = "random";  // cubature: "random" or "rule_aligned"
  int exact_check_max = 6;  // cubature exactness verified for n <= this
  int c_iter = 4;  // oracle lebesgue: step multiplier
  Tolerances tol;
  unsigned threads = 0;  // 0 = hardware concurrency
  std::string out_dir;

  ClassSpec class_spec() const;
  // Throws RegimeError naming the failed guard, std::invalid_argument on
  // malformed ranges or unknown methods.
  void validate() const;
  nlohmann::json to_json() const;
  // Unknown keys are rejected.
  static ExperimentConfig from_json(const nlohmann::json& j);
};

// Real polynomial on Box(N): standard normal coefficients on every real atom,
// scaled to unit real A-norm.
TrigPolynomial random_box_polynomial(const std::vector<int>& box, std::uint64_t seed);

enum class Severity { Assert, Monitor };

struct Check {
  std::string name;
  bool passed = true;
  Severity severity = Severity::Assert;
  std::string detail;
};

enum class RunStatus { Pass = 0, Fail = 1, Warn = 2 };

std::string to_string(RunStatus s);

struct RunResult {
  ExperimentConfig config;
  std::string csv;  // header line plus rows, '\n' terminated
  std::size_t rows = 0;
  nlohmann::json results;  // kind-specific summary data
  std::vector<Check> checks;
  std::vector<std::string> warnings;
  double elapsed_seconds = 0.0;

  // Fail if an asserted check failed, Warn if only monitored ones did.
  RunStatus status() const;
  // Process exit code: 0 pass, 1 failure, 2 monitored warning.
  int exit_code() const { return static_cast<int>(status()); }
  nlohmann::json summary() const;
};

// Validates, then dispatches on config.kind.
RunResult run(const ExperimentConfig& config);

nlohmann::json make_manifest(const RunResult& result, const std::string& subcommand);

// Writes results.csv, summary.json and manifest.json into dir (created if
// needed). Throws std::runtime_error when the directory cannot be written.
void write_bundle(const RunResult& result, const std::filesystem::path& dir, const std::string& subcommand);

// Reruns the manifest's config and checks the CSV against the recorded digest.
RunResult replay(const nlohmann::json& manifest);

// Built-in configurations, one per implemented rate statement plus the
// oracle and cubature suites. Every preset names its claim and guard.
const std::map<std::string, ExperimentConfig>& presets();
ExperimentConfig preset(const std::string& name);

}  // namespace sparsetrig
