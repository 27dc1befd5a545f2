#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "g2flow/flow.hpp"
#include "g2flow/invariants.hpp"
#include "g2flow/regions.hpp"

namespace g2flow {

enum class VerdictKind { ALC, AC, Incomplete, Indeterminate };
const char* to_string(VerdictKind k);

struct MonitorSample {
  double t;
  U1State state;
  double mean_curvature;
  std::vector<std::string> chambers;
};

struct Verdict {
  static constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  VerdictKind kind = VerdictKind::Indeterminate;
  double ell = nan;         // ALC: lim 6b/t^2
  double ell_alt = nan;     // ALC: from lim a^2/b^3 = 2/(3 ell^3)
  double b_exponent = nan;  // ALC: fitted d log b / d log t
  double rate = nan;        // AC: log-log slope of the cone deviation (negative)
  std::string reason;       // Incomplete / Indeterminate
  std::optional<EventKind> event;
  double budget_used = 0;   // final arc length reached
  std::vector<MonitorSample> monitors;

  nlohmann::json to_json() const;
};

struct RatioMonitors {
  double alpha, P, Q, R, S;
};

// P = b^{1+alpha}/a, Q = b^alpha/lambda, R = (1+alpha)a - b lambda, lambda = da/db,
// S = alpha(2F + aF_a) - (2bF_b - aF_a).
RatioMonitors monitor_ratios(const U1State& s, double alpha, const ModelParams& mp);

struct AlcEstimate {
  double ell;
  double ell_alt;
  double b_exponent;
};

// Uses samples at t, 2t, 4t, ... taken from the tail of an arc-length trajectory;
// double Richardson extrapolation of 6b/t^2 and (2b^3/(3a^2))^{1/3}.
AlcEstimate extract_alc_ell(const Trajectory& traj);

struct ClassifyOptions {
  double t_max = 1e7;          // arc-length budget, relative to the model scale^{1/3}
  double cushion = 1e-9;
  bool confirm_blowup = false;
  bool decision_only = false;  // stop at the first alc_chamber / death_quadrant entry
  double ell_tol = 0.02;
  double ell_converge = 1e-7;
  IntegratorOptions integ{};
  bool keep_trajectory = false;
};

struct Classification {
  Verdict verdict;
  Trajectory trajectory;  // filled when keep_trajectory
};

Classification classify(const U1State& seed, double t0, const ModelParams& mp,
                        const ClassifyOptions& opt = {});

}  // namespace g2flow
