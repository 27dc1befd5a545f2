#pragma once

#include <cstdint>
#include <limits>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "g2flow/classifier.hpp"
#include "g2flow/flow.hpp"
#include "g2flow/invariants.hpp"

namespace g2flow {

// Exit codes of the command line driver.
enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kConfigError = 2, kIntegrationError = 3, kBracketError = 4 };

struct RunConfig {
  // b7 (delta_su2), d7 (su2_factor), kmn, k11, cs, cone, ac
  std::string family = "kmn";
  int m = 1, n = 2;
  double r0 = 1.0;
  // NaN means "auto": alpha1 = alpha2 solved from the family constraint.
  double alpha1 = std::numeric_limits<double>::quiet_NaN();
  double alpha2 = std::numeric_limits<double>::quiet_NaN();
  double alpha3 = std::numeric_limits<double>::quiet_NaN();
  double alpha = 0.0;  // k11
  double beta = 1.0;
  double c = 0.0;
  // ac end only; NaN takes (p, q) of K_{m,n}(r0)
  double p = std::numeric_limits<double>::quiet_NaN();
  double q = std::numeric_limits<double>::quiet_NaN();
  double t0 = 0.0;  // cone: start time (0 = 1)
  double t1 = 0.0;  // solve: end of integration (0 = 1000 * scale^{1/3})
  double t_switch = 0.0;
  double T_switch = 0.0;

  double rtol = 1e-12;
  double atol = 1e-300;
  double event_tol = 1e-10;
  double cushion = 1e-9;
  double t_max = 1e7;
  bool confirm_blowup = false;

  double k = 1.5;
  double c_tol = 1e-13;
  double beta_tol = 1e-9;

  // sweep
  std::string sweep_param = "beta";
  std::vector<double> values;
  double from = 0, to = 0;
  int count = 0;
  int threads = 0;

  std::string out = "g2flow_out";
  std::uint64_t seed = 1234;
  bool quick = false;
  std::vector<int> only;

  // Throws ConfigError / ConstraintError.
  void validate() const;
  nlohmann::json to_json() const;
  // Flat keys; '-' and '_' are interchangeable. Unknown keys are rejected.
  static RunConfig from_json(const nlohmann::json& j);
  std::string hash() const;  // FNV-1a of the canonical JSON dump
  IntegratorOptions integrator() const;
  ClassifyOptions classify_options() const;
};

nlohmann::json load_config_file(const std::string& path);
// file values, then overrides on top.
RunConfig merge_config(const nlohmann::json& file, const nlohmann::json& overrides);

// Initial data built from a RunConfig.
struct SeedBuild {
  ModelParams params;
  bool u1 = true;  // false: only the full 6D state is meaningful
  U1State state;
  FullState full;
  double t = 0;
  nlohmann::json info;
};

SeedBuild build_seed(const RunConfig& cfg);

// Sweep values from values, or from/to/count (geometric when both ends are positive).
std::vector<double> sweep_values(const RunConfig& cfg);
RunConfig with_sweep_value(const RunConfig& cfg, double v);

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_classify(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_find_ac(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_figure1(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Runs a command by name with error-to-exit-code mapping.
int run_command(const std::string& name, const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace g2flow
