#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "g2flow/invariants.hpp"
#include "g2flow/regions.hpp"

namespace g2flow {

// (x1, x2, y1, y2) = (da db, da^2, a, b)
using U1Vars = std::array<double, 4>;

U1Vars u1_vars(const U1State& s);          // s must be arc-length
U1State u1_state(const U1Vars& v);         // arc-length view

struct FullRhs {
  Vec3 dx;
  Vec3 dy;
};

FullRhs rhs_full(const FullState& s, const ModelParams& mp);
U1Vars rhs_u1(const U1Vars& v, const ModelParams& mp);

// 2F(a'b'' - b'a'') - a'b'(a'F_a - 2b'F_b)
double brandhuber_residual(double a, double b, double da, double db, double dda, double ddb,
                           const ModelParams& mp);

enum class EventKind {
  F_vanishes,
  enters_alc_chamber,
  enters_death_chamber,
  hits_gamma1,
  hits_gamma2,
  hits_corner,
  blow_up,
  budget_exhausted,
  reaches_a_equals_b,
};

const char* to_string(EventKind k);

struct StopEvent {
  EventKind kind = EventKind::budget_exhausted;
  // F_vanishes: eps_F; chambers: cushion; blow_up: factor times ModelParams::scale;
  // hits_corner: radius relative to r0^3. Unused for gamma hits.
  double threshold = 0.0;
  GammaCurve gamma{};

  static StopEvent f_vanishes(double eps = 1e-10);
  static StopEvent alc_chamber(double cushion = 1e-9);
  static StopEvent death_chamber(double cushion = 1e-9);
  static StopEvent blow_up(double factor = 1e12);
  static StopEvent gamma1(const GammaCurve& g);
  static StopEvent gamma2(const GammaCurve& g);
  static StopEvent corner(const GammaCurve& g, double eps_rel = 1e-5);
  static StopEvent a_equals_b();
};

struct Budget {
  double span = std::numeric_limits<double>::infinity();  // |parameter change|
  std::size_t max_steps = 5000000;
  int direction = +1;
};

struct IntegratorOptions {
  double rtol = 1e-12;
  double atol = 1e-300;
  double event_tol = 1e-10;
  double max_step = std::numeric_limits<double>::infinity();
};

struct TrajectorySample {
  double param;
  double t;  // arc length (equal to param for arc-length runs)
  U1State state;
};

struct EventRecord {
  EventKind kind;
  double param;
  double t;
  U1State state;
};

struct Trajectory {
  Param param = Param::arc_length_t;
  ModelParams params;
  std::vector<TrajectorySample> samples;
  std::vector<EventRecord> events;

  const TrajectorySample& back() const { return samples.back(); }
  std::optional<EventKind> terminal_event() const;
  // max |H| over samples divided by (1 + max sqrt F)
  double relative_h_drift() const;
};

// Initial condition for integrate: state, starting parameter, starting arc length.
struct U1Seed {
  U1State state;
  double param = 0.0;
  double t = 0.0;
};

U1Seed arc_seed(const U1State& s, double t);
U1Seed a_param_seed(const U1State& s, double t, const ModelParams& mp);

Trajectory integrate(const U1Seed& seed, const ModelParams& mp, const std::vector<StopEvent>& stops,
                     const Budget& budget, const IntegratorOptions& opt = {});

Trajectory reparametrize(const Trajectory& traj, Param target);

struct FullSample {
  double t;
  FullState state;
};

struct FullTrajectory {
  ModelParams params;
  std::vector<FullSample> samples;
  std::vector<std::pair<EventKind, double>> events;
};

// Supports F_vanishes (on -Lambda) and blow_up stops; others are ignored.
FullTrajectory integrate_full(const FullState& s, double t0, const ModelParams& mp,
                              const std::vector<StopEvent>& stops, const Budget& budget,
                              const IntegratorOptions& opt = {});

}  // namespace g2flow
