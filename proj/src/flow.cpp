#include "g2flow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "g2flow/dopri5.hpp"
#include "g2flow/errors.hpp"

namespace g2flow {

namespace {

constexpr double kHuge = std::numeric_limits<double>::max();

bool full_rhs_nothrow(const FullState& s, const ModelParams& mp, FullRhs& out) {
  const double lam = eval_lambda(s.y, mp);
  if (!(lam < 0)) return false;
  const double x1 = s.x[0], x2 = s.x[1], x3 = s.x[2];
  if (!(x1 > 0 && x2 > 0 && x3 > 0)) return false;
  const double root = std::sqrt(-lam);
  const double rx = std::sqrt(x1 * x2 * x3);
  const double p = mp.p, q = mp.q;
  // shared sum keeps equal components bit-identical
  const double sq = s.y[0] * s.y[0] + s.y[1] * s.y[1] + s.y[2] * s.y[2];
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    const double yi = s.y[i], yj = s.y[j], yk = s.y[k];
    out.dx[i] = 2 * (yi * (sq - 2 * yi * yi - p * q) - (p - q) * yj * yk) / root;
    out.dy[i] = s.x[j] * s.x[k] / rx;
  }
  return true;
}

bool u1_rhs_nothrow(const U1Vars& v, const ModelParams& mp, U1Vars& out) {
  const double x1 = v[0], x2 = v[1];
  const FValue f = eval_F(v[2], v[3], mp);
  if (!(f.F > 0) || !(x1 > 0) || !(x2 > 0)) return false;
  const double sf = std::sqrt(f.F);
  const double r = std::sqrt(x1 * x1 * x2);
  // F_b through 2F_b - F_a = 8(a-b)(a(2b+q-p)+b^2+pq), so that a = b, x1 = x2 is kept exactly.
  const double a = v[2], b = v[3], p = mp.p, q = mp.q;
  const double fb = 0.5 * (f.Fa + 8 * (a - b) * (a * (2 * b + q - p) + b * b + p * q));
  out[0] = f.Fa / (4 * sf);
  out[1] = fb / (2 * sf);
  out[2] = x1 * x2 / r;
  out[3] = x1 * x1 / r;
  return true;
}

// a-parametrized system, z = (b, mu = db/da, t).
bool aparam_rhs_nothrow(double s, const std::array<double, 3>& z, const ModelParams& mp,
                        std::array<double, 3>& out) {
  const double b = z[0], mu = z[1];
  const FValue f = eval_F(s, b, mp);
  if (!(f.F > 0) || !(mu > 0)) return false;
  out[0] = mu;
  out[1] = mu * (f.Fa - 2 * mu * f.Fb) / (2 * f.F);
  out[2] = std::cbrt(2 * mu / std::sqrt(f.F));
  return true;
}

double f_relative(const U1State& s, const ModelParams& mp) {
  const double w = s.a * s.a + s.b * s.b + std::abs(mp.p * mp.q);
  return eval_F(s.a, s.b, mp).F / (w * w);
}

double blow_up_margin(const U1State& arc, const ModelParams& mp, double factor) {
  const double lim = factor * mp.scale();
  const double big = std::max({std::abs(arc.a), std::abs(arc.b), std::abs(arc.da), std::abs(arc.db)});
  return 1.0 - big / lim;
}

double min_margin(Chamber c, const U1State& s, const ModelParams& mp, double cushion) {
  const auto v = chamber_margins(c, s, mp, cushion);
  return *std::min_element(v.begin(), v.end());
}

struct EventFn {
  EventKind kind;
  // Positive while the event has not happened.
  std::function<double(const U1State& raw, const U1State& arc)> g;
};

std::vector<EventFn> make_events(const std::vector<StopEvent>& stops, const ModelParams& mp,
                                 const U1State& start) {
  std::vector<EventFn> ev;
  for (const StopEvent& st : stops) {
    switch (st.kind) {
      case EventKind::F_vanishes: {
        const double eps = st.threshold > 0 ? st.threshold : 1e-10;
        ev.push_back({st.kind, [eps, mp](const U1State& s, const U1State&) {
                        return f_relative(s, mp) - eps;
                      }});
        break;
      }
      case EventKind::enters_alc_chamber: {
        const double cu = st.threshold;
        ev.push_back({st.kind, [cu, mp](const U1State& s, const U1State&) {
                        return -min_margin(Chamber::alc_chamber, s, mp, cu);
                      }});
        break;
      }
      case EventKind::enters_death_chamber: {
        const double cu = st.threshold;
        ev.push_back({st.kind, [cu, mp](const U1State& s, const U1State&) {
                        return -min_margin(Chamber::death_quadrant, s, mp, cu);
                      }});
        break;
      }
      case EventKind::hits_gamma1: {
        const GammaCurve g = st.gamma;
        ev.push_back({st.kind, [g](const U1State& s, const U1State&) { return g.gamma1(s.a, s.b); }});
        break;
      }
      case EventKind::hits_gamma2: {
        const GammaCurve g = st.gamma;
        ev.push_back({st.kind, [g](const U1State& s, const U1State&) { return g.gamma2(s.a, s.b); }});
        break;
      }
      case EventKind::hits_corner: {
        const GammaCurve g = st.gamma;
        const double eps = (st.threshold > 0 ? st.threshold : 1e-5) * g.r0 * g.r0 * g.r0;
        ev.push_back({st.kind, [g, eps](const U1State& s, const U1State&) {
                        return std::max(std::abs(s.a), std::abs(g.gamma1(s.a, s.b))) - eps;
                      }});
        break;
      }
      case EventKind::blow_up: {
        const double fac = st.threshold > 0 ? st.threshold : 1e12;
        ev.push_back({st.kind, [fac, mp](const U1State&, const U1State& arc) {
                        return blow_up_margin(arc, mp, fac);
                      }});
        break;
      }
      case EventKind::reaches_a_equals_b: {
        const double sgn = start.b - start.a >= 0 ? 1.0 : -1.0;
        ev.push_back({st.kind, [sgn](const U1State& s, const U1State&) { return sgn * (s.b - s.a); }});
        break;
      }
      case EventKind::budget_exhausted:
        break;
    }
  }
  return ev;
}

bool has_blow_up(const std::vector<StopEvent>& stops) {
  return std::any_of(stops.begin(), stops.end(),
                     [](const StopEvent& s) { return s.kind == EventKind::blow_up; });
}

// Shared driver. View maps (param, z) to (raw state, arc-length state, arc-length t).
template <std::size_t N, class Rhs, class View>
Trajectory drive(const std::array<double, N>& z0, double param0, const ModelParams& mp,
                 const std::vector<StopEvent>& stops, const Budget& budget,
                 const IntegratorOptions& opt, Param tag, Rhs rhs, View view) {
  using Solver = Dopri5<N>;
  typename Solver::Options so;
  so.rtol = opt.rtol;
  so.atol = opt.atol;
  so.h_max = opt.max_step;
  Solver solver([&](double t, const std::array<double, N>& z, std::array<double, N>& out) {
    return rhs(t, z, out);
  }, so);

  Trajectory traj;
  traj.param = tag;
  traj.params = mp;
  const double dir = budget.direction >= 0 ? 1.0 : -1.0;

  auto sample = [&](double param, const std::array<double, N>& z) {
    double t;
    U1State raw, arc;
    view(param, z, raw, arc, t);
    return std::make_tuple(raw, arc, t);
  };

  auto [raw0, arc0, t0] = sample(param0, z0);
  if (!solver.start(param0, z0, dir))
    throw SeedError("integrate: seed is outside the domain of the vector field");
  traj.samples.push_back({param0, t0, raw0});

  const auto events = make_events(stops, mp, raw0);
  std::vector<double> g_old(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    g_old[i] = events[i].g(raw0, arc0);
    if (!(g_old[i] > 0)) {
      traj.events.push_back({events[i].kind, param0, t0, raw0});
      return traj;
    }
  }

  const double limit = std::isfinite(budget.span) ? param0 + dir * budget.span : dir * kHuge;
  std::size_t steps = 0;
  for (;;) {
    if (steps >= budget.max_steps || dir * (limit - solver.t()) <= 0) {
      const auto& last = traj.samples.back();
      traj.events.push_back({EventKind::budget_exhausted, last.param, last.t, last.state});
      return traj;
    }
    const auto res = solver.step(limit);
    ++steps;
    if (res == Solver::Result::underflow) {
      const auto& last = traj.samples.back();
      if (has_blow_up(stops)) {
        traj.events.push_back({EventKind::blow_up, last.param, last.t, last.state});
        return traj;
      }
      std::vector<double> zl(solver.y().begin(), solver.y().end());
      throw StiffnessError("integrate: step size underflow", solver.t(), zl);
    }
    const double tn = solver.t();
    const auto zn = solver.y();
    auto [rawn, arcn, ttn] = sample(tn, zn);

    // Earliest triggered event within the step.
    int hit = -1;
    double hit_param = tn;
    for (std::size_t i = 0; i < events.size(); ++i) {
      const double gn = events[i].g(rawn, arcn);
      if (gn > 0) {
        g_old[i] = gn;
        continue;
      }
      double lo = solver.t_old(), hi = tn;
      const double tol = opt.event_tol * std::max(1.0, std::abs(tn));
      for (int it = 0; it < 200 && std::abs(hi - lo) > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        auto [rm, am, tm] = sample(mid, solver.dense(mid));
        (void)tm;
        if (events[i].g(rm, am) > 0)
          lo = mid;
        else
          hi = mid;
      }
      if (hit < 0 || dir * (hi - hit_param) < 0) {
        hit = int(i);
        hit_param = hi;
      }
    }
    if (hit >= 0) {
      const auto zh = hit_param == tn ? zn : solver.dense(hit_param);
      auto [rh, ah, th] = sample(hit_param, zh);
      (void)ah;
      if (dir * (hit_param - traj.samples.back().param) > 0)
        traj.samples.push_back({hit_param, th, rh});
      traj.events.push_back({events[hit].kind, hit_param, th, rh});
      return traj;
    }
    traj.samples.push_back({tn, ttn, rawn});
  }
}

}  // namespace

U1Vars u1_vars(const U1State& s) {
  if (s.param != Param::arc_length_t) throw DomainError("u1_vars: expected an arc-length state");
  return {s.da * s.db, s.da * s.da, s.a, s.b};
}

U1State u1_state(const U1Vars& v) {
  U1State s;
  s.a = v[2];
  s.b = v[3];
  s.da = std::sqrt(v[1]);
  s.db = v[0] / s.da;
  s.param = Param::arc_length_t;
  return s;
}

FullRhs rhs_full(const FullState& s, const ModelParams& mp) {
  FullRhs out;
  if (!full_rhs_nothrow(s, mp, out)) throw DomainError("rhs_full: state off the principal-orbit locus");
  return out;
}

U1Vars rhs_u1(const U1Vars& v, const ModelParams& mp) {
  U1Vars out;
  if (!u1_rhs_nothrow(v, mp, out)) throw DomainError("rhs_u1: F <= 0 or x1^2 x2 <= 0");
  return out;
}

double brandhuber_residual(double a, double b, double da, double db, double dda, double ddb,
                           const ModelParams& mp) {
  const FValue f = eval_F(a, b, mp);
  return 2 * f.F * (da * ddb - db * dda) - da * db * (da * f.Fa - 2 * db * f.Fb);
}

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::F_vanishes: return "F_vanishes";
    case EventKind::enters_alc_chamber: return "enters_alc_chamber";
    case EventKind::enters_death_chamber: return "enters_death_chamber";
    case EventKind::hits_gamma1: return "hits_gamma1";
    case EventKind::hits_gamma2: return "hits_gamma2";
    case EventKind::hits_corner: return "hits_corner";
    case EventKind::blow_up: return "blow_up";
    case EventKind::budget_exhausted: return "budget_exhausted";
    case EventKind::reaches_a_equals_b: return "reaches_a_equals_b";
  }
  return "?";
}

StopEvent StopEvent::f_vanishes(double eps) { return {EventKind::F_vanishes, eps, {}}; }
StopEvent StopEvent::alc_chamber(double cushion) { return {EventKind::enters_alc_chamber, cushion, {}}; }
StopEvent StopEvent::death_chamber(double cushion) {
  return {EventKind::enters_death_chamber, cushion, {}};
}
StopEvent StopEvent::blow_up(double factor) { return {EventKind::blow_up, factor, {}}; }
StopEvent StopEvent::gamma1(const GammaCurve& g) { return {EventKind::hits_gamma1, 1.0, g}; }
StopEvent StopEvent::gamma2(const GammaCurve& g) { return {EventKind::hits_gamma2, 1.0, g}; }
StopEvent StopEvent::corner(const GammaCurve& g, double eps_rel) {
  return {EventKind::hits_corner, eps_rel, g};
}
StopEvent StopEvent::a_equals_b() { return {EventKind::reaches_a_equals_b, 1.0, {}}; }

std::optional<EventKind> Trajectory::terminal_event() const {
  if (events.empty()) return std::nullopt;
  return events.back().kind;
}

double Trajectory::relative_h_drift() const {
  double hmax = 0.0, vmax = 0.0;
  for (const auto& s : samples) {
    const U1State arc = to_arc_length(s.state, params);
    const double F = eval_F(arc.a, arc.b, params).F;
    if (F < 0) continue;
    hmax = std::max(hmax, std::abs(std::sqrt(F) - 2 * arc.da * arc.da * arc.db));
    vmax = std::max(vmax, std::sqrt(F));
  }
  return hmax / (1.0 + vmax);
}

U1Seed arc_seed(const U1State& s, double t) { return {s, t, t}; }

U1Seed a_param_seed(const U1State& s, double t, const ModelParams& mp) {
  U1State r;
  r.a = s.a;
  r.b = s.b;
  r.da = 1.0;
  r.db = s.param == Param::a_equals_s ? s.db : s.db / s.da;
  r.param = Param::a_equals_s;
  (void)mp;
  return {r, s.a, t};
}

Trajectory integrate(const U1Seed& seed, const ModelParams& mp, const std::vector<StopEvent>& stops,
                     const Budget& budget, const IntegratorOptions& opt) {
  const U1State& s = seed.state;
  if (!(eval_F(s.a, s.b, mp).F > 0)) throw SeedError("integrate: F(a,b) <= 0 at the seed");
  if (!(s.da > 0) || !(s.db > 0)) throw SeedError("integrate: seed derivatives must be positive");

  if (s.param == Param::arc_length_t) {
    const U1Vars z0 = u1_vars(s);
    auto rhs = [&mp](double, const U1Vars& z, U1Vars& out) { return u1_rhs_nothrow(z, mp, out); };
    auto view = [](double param, const U1Vars& z, U1State& raw, U1State& arc, double& t) {
      raw = u1_state(z);
      arc = raw;
      t = param;
    };
    return drive<4>(z0, seed.param, mp, stops, budget, opt, Param::arc_length_t, rhs, view);
  }

  if (s.da != 1.0) throw SeedError("integrate: a-parametrized seed must have da = 1");
  const std::array<double, 3> z0{s.b, s.db, seed.t};
  auto rhs = [&mp](double a, const std::array<double, 3>& z, std::array<double, 3>& out) {
    return aparam_rhs_nothrow(a, z, mp, out);
  };
  auto view = [&mp](double a, const std::array<double, 3>& z, U1State& raw, U1State& arc,
                    double& t) {
    raw = {a, z[0], 1.0, z[1], Param::a_equals_s};
    const double F = eval_F(a, z[0], mp).F;
    arc = raw;
    if (F > 0 && z[1] > 0) {
      arc.da = std::cbrt(std::sqrt(F) / (2 * z[1]));
      arc.db = z[1] * arc.da;
      arc.param = Param::arc_length_t;
    }
    t = z[2];
  };
  return drive<3>(z0, seed.param, mp, stops, budget, opt, Param::a_equals_s, rhs, view);
}

Trajectory reparametrize(const Trajectory& traj, Param target) {
  if (traj.param == target) return traj;
  Trajectory out;
  out.param = target;
  out.params = traj.params;
  auto convert = [&](const U1State& s, double t, double& param) {
    U1State r;
    if (target == Param::a_equals_s) {
      if (!(s.da > 0)) throw DomainError("reparametrize: da <= 0");
      r = {s.a, s.b, 1.0, s.db / s.da, Param::a_equals_s};
      param = s.a;
    } else {
      r = to_arc_length(s, traj.params);
      param = t;
    }
    return r;
  };
  for (const auto& smp : traj.samples) {
    double param;
    const U1State r = convert(smp.state, smp.t, param);
    if (!out.samples.empty()) {
      const double prev = out.samples.back().param;
      if (param == prev) continue;
      if (out.samples.size() >= 2) {
        const double dprev = prev - out.samples[out.samples.size() - 2].param;
        if ((param - prev) * dprev <= 0) throw DomainError("reparametrize: parameter not monotone");
      }
    }
    out.samples.push_back({param, smp.t, r});
  }
  for (const auto& e : traj.events) {
    double param;
    const U1State r = convert(e.state, e.t, param);
    out.events.push_back({e.kind, param, e.t, r});
  }
  return out;
}

FullTrajectory integrate_full(const FullState& s0, double t0, const ModelParams& mp,
                              const std::vector<StopEvent>& stops, const Budget& budget,
                              const IntegratorOptions& opt) {
  using Z = std::array<double, 6>;
  auto pack = [](const FullState& s) {
    return Z{s.x[0], s.x[1], s.x[2], s.y[0], s.y[1], s.y[2]};
  };
  auto unpack = [](const Z& z) {
    FullState s;
    s.x = {z[0], z[1], z[2]};
    s.y = {z[3], z[4], z[5]};
    return s;
  };
  Dopri5<6>::Options so;
  so.rtol = opt.rtol;
  so.atol = opt.atol;
  so.h_max = opt.max_step;
  Dopri5<6> solver([&](double, const Z& z, Z& out) {
    FullRhs r;
    if (!full_rhs_nothrow(unpack(z), mp, r)) return false;
    out = {r.dx[0], r.dx[1], r.dx[2], r.dy[0], r.dy[1], r.dy[2]};
    return true;
  }, so);
  const double dir = budget.direction >= 0 ? 1.0 : -1.0;
  if (!solver.start(t0, pack(s0), dir)) throw SeedError("integrate_full: seed off the locus");

  double eps_f = -1, blow = -1;
  for (const auto& st : stops) {
    if (st.kind == EventKind::F_vanishes) eps_f = st.threshold > 0 ? st.threshold : 1e-10;
    if (st.kind == EventKind::blow_up) blow = st.threshold > 0 ? st.threshold : 1e12;
  }
  auto g_f = [&](const FullState& s) {
    const double w = s.y[0] * s.y[0] + s.y[1] * s.y[1] + s.y[2] * s.y[2] + std::abs(mp.p * mp.q);
    return -eval_lambda(s.y, mp) / (w * w) - eps_f;
  };
  auto g_b = [&](const FullState& s) {
    double big = 0;
    const Vec3 d = derivatives_from_x(s.x);
    for (int i = 0; i < 3; ++i) big = std::max({big, std::abs(s.y[i]), d[i]});
    return 1.0 - big / (blow * mp.scale());
  };

  FullTrajectory out;
  out.params = mp;
  out.samples.push_back({t0, s0});
  const double limit = std::isfinite(budget.span) ? t0 + dir * budget.span : dir * kHuge;
  std::size_t steps = 0;
  for (;;) {
    if (steps >= budget.max_steps || dir * (limit - solver.t()) <= 0) {
      out.events.push_back({EventKind::budget_exhausted, solver.t()});
      return out;
    }
    const auto res = solver.step(limit);
    ++steps;
    if (res == Dopri5<6>::Result::underflow) {
      if (blow > 0) {
        out.events.push_back({EventKind::blow_up, solver.t()});
        return out;
      }
      throw StiffnessError("integrate_full: step size underflow", solver.t(),
                           std::vector<double>(solver.y().begin(), solver.y().end()));
    }
    const FullState sn = unpack(solver.y());
    out.samples.push_back({solver.t(), sn});
    if (eps_f > 0 && !(g_f(sn) > 0)) {
      out.events.push_back({EventKind::F_vanishes, solver.t()});
      return out;
    }
    if (blow > 0 && !(g_b(sn) > 0)) {
      out.events.push_back({EventKind::blow_up, solver.t()});
      return out;
    }
  }
}

}  // namespace g2flow
