#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "g2flow/flow.hpp"
#include "g2flow/regions.hpp"

namespace g2flow {

enum class GammaHit { gamma1, gamma2, corner, none };
const char* to_string(GammaHit h);

struct AcShootOptions {
  double T_switch = 0.0;  // 0: chosen from c and (p, q)
  double tol = 1e-13;     // relative bracket width in c
  int scan_lo = -10;      // scan exponents around the natural scale, base 2
  int scan_hi = 10;
  int scan_limit = 40;
  IntegratorOptions integ{};
};

struct BackwardRun {
  Trajectory traj;  // a-parametrized, decreasing a
  GammaHit hit = GammaHit::none;
  double c = 0;
  double T_switch = 0;
};

// Natural size of c_ac for the given (p, q), from the scaling of the AC ends.
double ac_natural_c(const ModelParams& mp);
// Arc length at which the AC series is evaluated for this c.
double ac_T_switch(const ModelParams& mp, double c);

// Integrates an AC end with parameter c backward (a-parametrized) until gamma_1, gamma_2
// or the corner. RegionExitError if b > a, da > db > 0 fails on the way.
BackwardRun extend_ac_backward(const GammaCurve& g, double c, const AcShootOptions& opt = {});

struct ClosureResult {
  double beta = 0;
  double kappa_fit = 0;       // lim (b - mn r0^3)/a^2 from the trajectory
  double kappa_expected = 0;  // sqrt(mn)(m+n)/(2 beta^3 r0^3)
  double residual = 0;        // |kappa_fit - kappa_expected| / kappa_expected
  double fit_rms = 0;
  double a_min = 0, a_max = 0;
  int samples = 0;
  nlohmann::json to_json() const;
};

// Fits da(a) = c0 + c2 a^2 + c4 a^4 + c6 a^6 and (b - b0)/a^2 on a in [a_min, a_max];
// a_max <= 0 picks a window from the data. ClosureError when the residual exceeds tol.
ClosureResult closure_extract_beta(const Trajectory& traj, int m, int n, double r0,
                                   double a_min = 0.0, double a_max = 0.0, double tol = 1e-4);

struct ScanEntry {
  double value;
  std::string outcome;
};

struct ShootResult {
  double critical_value = 0;
  double lo = 0, hi = 0;
  int iterations = 0;
  std::vector<ScanEntry> history;
  std::optional<ClosureResult> closure;
  nlohmann::json to_json() const;
};

// Bisection in c between gamma_1 hits (below) and gamma_2 hits (above), then closure.
ShootResult find_c_ac(const GammaCurve& g, const AcShootOptions& opt = {});

struct BetaShootOptions {
  double tol = 1e-9;  // relative bracket width in beta
  int scan_lo = -10;
  int scan_hi = 10;
  IntegratorOptions integ{};
};

// Bisection in beta between Incomplete (below) and ALC (above) forward K_{m,n} seeds.
ShootResult find_beta_ac(int m, int n, double r0, const BetaShootOptions& opt = {});

// Decision-only forward classification of a K_{m,n} seed: "ALC" or "Incomplete".
std::string kmn_forward_decision(int m, int n, double r0, double beta,
                                 const IntegratorOptions& integ = {});

}  // namespace g2flow
