#include "g2flow/classifier.hpp"

#include <algorithm>
#include <cmath>

#include "g2flow/errors.hpp"
#include "g2flow/seeds.hpp"

namespace g2flow {

const char* to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::ALC: return "ALC";
    case VerdictKind::AC: return "AC";
    case VerdictKind::Incomplete: return "Incomplete";
    case VerdictKind::Indeterminate: return "Indeterminate";
  }
  return "?";
}

nlohmann::json Verdict::to_json() const {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  nlohmann::json j;
  j["kind"] = to_string(kind);
  j["ell"] = num(ell);
  j["ell_alt"] = num(ell_alt);
  j["b_exponent"] = num(b_exponent);
  j["rate"] = num(rate);
  j["reason"] = reason;
  j["event"] = event ? nlohmann::json(to_string(*event)) : nlohmann::json(nullptr);
  j["budget_used"] = budget_used;
  nlohmann::json mon = nlohmann::json::array();
  for (const auto& m : monitors)
    mon.push_back({{"t", m.t}, {"a", m.state.a}, {"b", m.state.b}, {"da", m.state.da},
                   {"db", m.state.db}, {"mean_curvature", m.mean_curvature}, {"chambers", m.chambers}});
  j["monitors"] = mon;
  return j;
}

RatioMonitors monitor_ratios(const U1State& s, double alpha, const ModelParams& mp) {
  const double lambda = s.da / s.db;
  const FValue f = eval_F(s.a, s.b, mp);
  RatioMonitors r;
  r.alpha = alpha;
  r.P = std::pow(s.b, 1 + alpha) / s.a;
  r.Q = std::pow(s.b, alpha) / lambda;
  r.R = (1 + alpha) * s.a - s.b * lambda;
  r.S = alpha * (2 * f.F + s.a * f.Fa) - (2 * s.b * f.Fb - s.a * f.Fa);
  return r;
}

namespace {

struct Richardson {
  double value;
  double change;  // between the last two extrapolants
};

// E_k sampled at t_k = t_0 2^k with corrections in powers of 1/t.
Richardson extrapolate(const std::vector<double>& e) {
  const std::size_t n = e.size();
  if (n == 1) return {e[0], std::abs(e[0])};
  std::vector<double> r1;
  for (std::size_t k = 0; k + 1 < n; ++k) r1.push_back(2 * e[k + 1] - e[k]);
  if (r1.size() == 1) return {r1[0], std::abs(r1[0] - e[n - 1])};
  std::vector<double> r2;
  for (std::size_t k = 0; k + 1 < r1.size(); ++k) r2.push_back((4 * r1[k + 1] - r1[k]) / 3);
  if (r2.size() == 1) return {r2[0], std::abs(r2[0] - r1.back())};
  return {r2.back(), std::abs(r2.back() - r2[r2.size() - 2])};
}

struct AlcTail {
  std::vector<double> t, a, b;
  AlcEstimate estimate(double* change = nullptr) const {
    std::vector<double> e1, e2;
    for (std::size_t k = 0; k < t.size(); ++k) {
      e1.push_back(6 * b[k] / (t[k] * t[k]));
      e2.push_back(std::cbrt(2 * b[k] * b[k] * b[k] / (3 * a[k] * a[k])));
    }
    const Richardson r1 = extrapolate(e1), r2 = extrapolate(e2);
    if (change) *change = std::max(r1.change / std::abs(r1.value), r2.change / std::abs(r2.value));
    const std::size_t n = t.size();
    const double expo = n >= 2 ? std::log(b[n - 1] / b[n - 2]) / std::log(t[n - 1] / t[n - 2]) : Verdict::nan;
    return {r1.value, r2.value, expo};
  }
};

// Cubic Hermite interpolation of (a, b) on an arc-length trajectory.
U1State state_at(const Trajectory& tr, double t) {
  const auto& s = tr.samples;
  auto it = std::lower_bound(s.begin(), s.end(), t,
                             [](const TrajectorySample& x, double v) { return x.t < v; });
  if (it == s.begin()) return s.front().state;
  if (it == s.end()) return s.back().state;
  const auto& p1 = *it;
  const auto& p0 = *(it - 1);
  const double h = p1.t - p0.t, u = (t - p0.t) / h;
  const double h00 = 2 * u * u * u - 3 * u * u + 1, h10 = u * u * u - 2 * u * u + u;
  const double h01 = -2 * u * u * u + 3 * u * u, h11 = u * u * u - u * u;
  U1State r = p0.state;
  r.a = h00 * p0.state.a + h10 * h * p0.state.da + h01 * p1.state.a + h11 * h * p1.state.da;
  r.b = h00 * p0.state.b + h10 * h * p0.state.db + h01 * p1.state.b + h11 * h * p1.state.db;
  return r;
}

bool all_strict(const Trajectory& seg, const ModelParams& mp, double cushion) {
  for (const auto& s : seg.samples) {
    const auto m = chamber_margins(Chamber::alc_strict, s.state, mp, cushion);
    if (*std::min_element(m.begin(), m.end()) <= 0) return false;
  }
  return true;
}

double max_ratio_dev(const Trajectory& seg) {
  double r = 0;
  for (const auto& s : seg.samples) r = std::max(r, std::abs(s.state.b / s.state.a - 1));
  return r;
}

double cone_deviation(const U1State& s) {
  return std::abs(s.da * s.da * s.da / (27 * kConeC * s.a * s.a) - 1);
}

MonitorSample monitor(double t, const U1State& s, const ModelParams& mp, double cushion) {
  MonitorSample m{t, s, Verdict::nan, {}};
  try {
    m.mean_curvature = mean_curvature(s, mp);
    m.chambers = chamber_membership(s, mp, cushion).names();
  } catch (const DomainError&) {
  }
  return m;
}

}  // namespace

AlcEstimate extract_alc_ell(const Trajectory& traj) {
  if (traj.samples.size() < 2) throw ConvergenceError("extract_alc_ell: trajectory too short");
  const Trajectory tr = traj.param == Param::arc_length_t ? traj : reparametrize(traj, Param::arc_length_t);
  const double t_end = tr.samples.back().t, t_begin = tr.samples.front().t;
  AlcTail tail;
  std::vector<double> ts;
  for (double t = t_end; t >= t_begin && ts.size() < 6; t *= 0.5) ts.push_back(t);
  std::reverse(ts.begin(), ts.end());
  for (double t : ts) {
    const U1State s = state_at(tr, t);
    tail.t.push_back(t);
    tail.a.push_back(s.a);
    tail.b.push_back(s.b);
  }
  return tail.estimate();
}

Classification classify(const U1State& seed, double t0, const ModelParams& mp,
                        const ClassifyOptions& opt) {
  Classification out;
  Verdict& v = out.verdict;
  out.trajectory.param = Param::arc_length_t;
  out.trajectory.params = mp;

  const double len = std::cbrt(mp.scale());
  const double t_max = opt.t_max * len;
  const double nominal = (mp.p == 0 && mp.q == 0) ? -nu_inf() : -3.0;

  std::vector<StopEvent> stops{StopEvent::f_vanishes(), StopEvent::death_chamber(opt.cushion),
                               StopEvent::blow_up()};
  if (opt.decision_only) stops.push_back(StopEvent::alc_chamber(opt.cushion));

  U1State cur = seed;
  // States within rounding of the a = b locus are put on it; that locus is invariant.
  if (std::abs(cur.a - cur.b) <= 1e-12 * std::abs(cur.a) &&
      std::abs(cur.da - cur.db) <= 1e-12 * std::abs(cur.da)) {
    cur.b = cur.a;
    cur.db = cur.da;
  }
  double t = t0;
  bool alc = false;
  AlcTail tail;
  int ac_hits = 0;
  double prev_delta = -1, prev_t = 0;

  auto finish_alc = [&](const char* note) {
    double change = 0;
    const AlcEstimate e = tail.estimate(&change);
    v.ell = e.ell;
    v.ell_alt = e.ell_alt;
    v.b_exponent = e.b_exponent;
    if (std::abs(e.ell - e.ell_alt) > opt.ell_tol * std::abs(e.ell) || tail.t.size() < 3) {
      v.kind = VerdictKind::Indeterminate;
      v.reason = "ALC estimators disagree";
    } else {
      v.kind = VerdictKind::ALC;
      v.reason = note;
    }
  };

  for (;;) {
    if (t >= t_max) {
      if (alc && tail.t.size() >= 3) {
        finish_alc("budget reached during extraction");
      } else {
        v.kind = VerdictKind::Indeterminate;
        v.reason = "arc-length budget exhausted";
      }
      break;
    }
    Budget b;
    b.span = std::max(t, 1e-6 * len);
    Trajectory seg = integrate(arc_seed(cur, t), mp, stops, b, opt.integ);
    if (opt.keep_trajectory) {
      auto& S = out.trajectory.samples;
      S.insert(S.end(), seg.samples.begin() + (S.empty() ? 0 : 1), seg.samples.end());
    }
    const auto ev = seg.terminal_event();
    const auto& last = seg.back();
    v.budget_used = last.t;
    v.monitors.push_back(monitor(last.t, last.state, mp, opt.cushion));

    if (ev && *ev != EventKind::budget_exhausted) {
      if (opt.keep_trajectory) out.trajectory.events.push_back(seg.events.back());
      if (*ev == EventKind::blow_up && alc) {
        finish_alc("extraction ended at blow-up threshold");
        break;
      }
      v.event = *ev;
      if (*ev == EventKind::enters_alc_chamber) {
        v.kind = VerdictKind::ALC;
        v.reason = "entered alc_chamber (decision only)";
        break;
      }
      v.kind = VerdictKind::Incomplete;
      v.reason = *ev == EventKind::enters_death_chamber ? "death_quadrant" : to_string(*ev);
      if (*ev == EventKind::enters_death_chamber && opt.confirm_blowup) {
        Budget bb;
        bb.span = t_max;
        Trajectory rest = integrate(arc_seed(last.state, last.t), mp,
                                    {StopEvent::f_vanishes(), StopEvent::blow_up()}, bb, opt.integ);
        v.event = rest.terminal_event();
        v.budget_used = rest.back().t;
        v.monitors.push_back(monitor(rest.back().t, rest.back().state, mp, opt.cushion));
        if (opt.keep_trajectory) {
          auto& S = out.trajectory.samples;
          S.insert(S.end(), rest.samples.begin() + 1, rest.samples.end());
          out.trajectory.events.push_back(rest.events.back());
        }
      }
      break;
    }

    if (!alc && all_strict(seg, mp, opt.cushion)) alc = true;
    if (alc) {
      tail.t.push_back(last.t);
      tail.a.push_back(last.state.a);
      tail.b.push_back(last.state.b);
      if (tail.t.size() >= 5) {
        double change = 0;
        tail.estimate(&change);
        if (change <= opt.ell_converge) {
          finish_alc("converged");
          break;
        }
      }
    } else if (max_ratio_dev(seg) <= 1e-4) {
      const double delta = cone_deviation(last.state);
      if (delta < 1e-12) {
        if (++ac_hits >= 2) {
          v.kind = VerdictKind::AC;
          v.rate = nominal;
          v.reason = "cone to machine precision";
          break;
        }
      } else if (delta <= 1e-3 && prev_delta > 0) {
        const double slope = std::log(delta / prev_delta) / std::log(last.t / prev_t);
        if (std::abs(slope - nominal) <= 0.5) {
          if (++ac_hits >= 2) {
            v.kind = VerdictKind::AC;
            v.rate = slope;
            v.reason = "b/a -> 1 at the conical rate";
            break;
          }
        } else {
          ac_hits = 0;
        }
      }
      prev_delta = delta;
      prev_t = last.t;
    } else {
      ac_hits = 0;
      prev_delta = -1;
    }
    cur = last.state;
    t = last.t;
  }
  return out;
}

}  // namespace g2flow
