#include "g2flow/shooter.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "g2flow/classifier.hpp"
#include "g2flow/errors.hpp"
#include "g2flow/seeds.hpp"

namespace g2flow {

const char* to_string(GammaHit h) {
  switch (h) {
    case GammaHit::gamma1: return "gamma1";
    case GammaHit::gamma2: return "gamma2";
    case GammaHit::corner: return "corner";
    case GammaHit::none: return "none";
  }
  return "?";
}

nlohmann::json ClosureResult::to_json() const {
  return {{"beta", beta},           {"kappa_fit", kappa_fit}, {"kappa_expected", kappa_expected},
          {"residual", residual},   {"fit_rms", fit_rms},     {"a_min", a_min},
          {"a_max", a_max},         {"samples", samples}};
}

nlohmann::json ShootResult::to_json() const {
  nlohmann::json h = nlohmann::json::array();
  for (const auto& e : history) h.push_back({{"value", e.value}, {"outcome", e.outcome}});
  nlohmann::json j{{"critical_value", critical_value},
                   {"bracket", {lo, hi}},
                   {"iterations", iterations},
                   {"history", h}};
  j["closure"] = closure ? closure->to_json() : nlohmann::json(nullptr);
  return j;
}

double ac_natural_c(const ModelParams& mp) {
  const double s = std::max(std::abs(mp.p), std::abs(mp.q));
  if (s == 0) return 1.0;
  return std::pow(s / kConeC, nu_inf() / 3.0);
}

double ac_T_switch(const ModelParams& mp, double c) {
  const double s = std::max({std::abs(mp.p), std::abs(mp.q), std::abs(mp.p - mp.q)});
  const double t_floor = s > 0 ? std::cbrt(20.0 * s / kConeC) : 1.0;
  const double t_c = std::pow(std::abs(c) / 1e-4, 1.0 / nu_inf());
  return std::max({t_floor, t_c, 1.0});
}

namespace {

U1SeedResult ac_seed(const ModelParams& mp, double c, double T) {
  double order = 15;
  U1SeedResult r = seed_ac_end(mp, c, T, order);
  while (r.tail > 1e-15 && order < 45) {
    order += 6;
    r = seed_ac_end(mp, c, T, order);
  }
  return r;
}

// b and db/da at a, by cubic Hermite on an a-parametrized trajectory with decreasing a.
bool b_at(const Trajectory& tr, double a, double& b) {
  const auto& s = tr.samples;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double a0 = s[i - 1].param, a1 = s[i].param;
    if ((a0 - a) * (a1 - a) > 0) continue;
    const double h = a1 - a0, u = (a - a0) / h;
    const double h00 = 2 * u * u * u - 3 * u * u + 1, h10 = u * u * u - 2 * u * u + u;
    const double h01 = -2 * u * u * u + 3 * u * u, h11 = u * u * u - u * u;
    b = h00 * s[i - 1].state.b + h10 * h * s[i - 1].state.db + h01 * s[i].state.b +
        h11 * h * s[i].state.db;
    return true;
  }
  return false;
}

}  // namespace

BackwardRun extend_ac_backward(const GammaCurve& g, double c, const AcShootOptions& opt) {
  g.validate();
  const ModelParams mp = g.params();
  BackwardRun run;
  run.c = c;
  run.T_switch = opt.T_switch > 0 ? opt.T_switch : ac_T_switch(mp, c);
  const U1SeedResult seed = ac_seed(mp, c, run.T_switch);
  if (!chamber_membership(seed.state, mp, 0.0).ac_backward)
    throw RegionExitError("extend_ac_backward: AC seed is not in the backward region");
  const U1Seed s = a_param_seed(seed.state, run.T_switch, mp);
  Budget budget;
  budget.direction = -1;
  budget.span = s.state.a;
  run.traj = integrate(s, mp,
                       {StopEvent::corner(g, 1e-10), StopEvent::gamma1(g), StopEvent::gamma2(g),
                        StopEvent::f_vanishes()},
                       budget, opt.integ);
  for (const auto& smp : run.traj.samples) {
    const U1State& st = smp.state;
    if (!(st.b > st.a) || !(st.db > 0) || !(st.db < 1.0))
      throw RegionExitError("extend_ac_backward: left the region b > a, da > db > 0 at a = " +
                            std::to_string(st.a));
  }
  const auto ev = run.traj.terminal_event();
  if (ev == EventKind::hits_gamma1) run.hit = GammaHit::gamma1;
  else if (ev == EventKind::hits_gamma2) run.hit = GammaHit::gamma2;
  else if (ev == EventKind::hits_corner) run.hit = GammaHit::corner;
  else run.hit = GammaHit::none;
  return run;
}

ClosureResult closure_extract_beta(const Trajectory& traj, int m, int n, double r0, double a_min,
                                   double a_max, double tol) {
  const double b0 = double(m * n) * r0 * r0 * r0;
  struct Pt {
    double a, da, b;
  };
  std::vector<Pt> pts;
  for (const auto& s : traj.samples) {
    if (!(s.state.a > 0)) continue;
    U1State arc;
    try {
      arc = to_arc_length(s.state, traj.params);
    } catch (const DomainError&) {
      continue;
    }
    pts.push_back({arc.a, arc.da, arc.b});
  }
  if (pts.empty()) throw ClosureError("closure_extract_beta: no usable samples");
  std::sort(pts.begin(), pts.end(), [](const Pt& x, const Pt& y) { return x.a < y.a; });
  const double r3 = r0 * r0 * r0;
  const double a_lo = std::max({a_min, pts.front().a, 0.02 * r3});
  if (a_max <= 0) a_max = std::max(0.4 * r3, 4 * a_lo);
  std::vector<Pt> w;
  for (const auto& p : pts)
    if (p.a >= a_lo && p.a <= a_max) w.push_back(p);
  ClosureResult r;
  r.a_min = a_lo;
  r.a_max = a_max;
  r.samples = int(w.size());
  if (w.size() < 8) throw ClosureError("closure_extract_beta: too few samples near the corner");

  const int k = 4;
  Eigen::MatrixXd A(long(w.size()), k);
  Eigen::VectorXd y1(long(w.size())), y2(long(w.size()));
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double u = w[i].a / a_max;
    for (int j = 0; j < k; ++j) A(long(i), j) = std::pow(u, 2 * j);
    y1[long(i)] = w[i].da;
    y2[long(i)] = w[i].b - b0;
  }
  const auto qr = A.colPivHouseholderQr();
  const Eigen::VectorXd c1 = qr.solve(y1);
  const Eigen::VectorXd c2 = qr.solve(y2);
  r.fit_rms = std::sqrt((A * c1 - y1).squaredNorm() / double(w.size())) / std::abs(c1[0]);
  r.beta = c1[0] / (r0 * r0);
  // the constant term absorbs the small miss of the corner
  r.kappa_fit = c2[1] / (a_max * a_max);
  r.kappa_expected = std::sqrt(double(m * n)) * (m + n) / (2 * std::pow(r.beta, 3) * std::pow(r0, 3));
  r.residual = std::abs(r.kappa_fit - r.kappa_expected) / r.kappa_expected;
  if (!(r.residual <= tol) || !(r.beta > 0)) {
    std::ostringstream os;
    os << "closure_extract_beta: residual " << r.residual << " exceeds " << tol;
    throw ClosureError(os.str());
  }
  return r;
}

ShootResult find_c_ac(const GammaCurve& g, const AcShootOptions& opt) {
  g.validate();
  const ModelParams mp = g.params();
  const double c_nat = ac_natural_c(mp);
  ShootResult res;
  std::ostringstream table;

  auto shoot = [&](double c) {
    BackwardRun run = extend_ac_backward(g, c, opt);
    res.history.push_back({c, to_string(run.hit)});
    table << c << " " << to_string(run.hit) << "\n";
    return run;
  };

  // Scan for a gamma1 -> gamma2 transition.
  std::optional<BackwardRun> lo, hi;
  int klo = opt.scan_lo, khi = opt.scan_hi;
  std::vector<std::pair<int, GammaHit>> scan;
  for (int k = klo; k <= khi; ++k) scan.emplace_back(k, shoot(c_nat * std::ldexp(1.0, k)).hit);
  auto find_pair = [&]() -> std::optional<int> {
    for (std::size_t i = 0; i + 1 < scan.size(); ++i)
      if (scan[i].second == GammaHit::gamma1 && scan[i + 1].second == GammaHit::gamma2)
        return scan[i].first;
    return std::nullopt;
  };
  while (!find_pair()) {
    const bool all1 = std::all_of(scan.begin(), scan.end(), [](auto& e) { return e.second == GammaHit::gamma1; });
    const bool all2 = std::all_of(scan.begin(), scan.end(), [](auto& e) { return e.second == GammaHit::gamma2; });
    if (all1 && khi < opt.scan_limit) {
      ++khi;
      scan.emplace_back(khi, shoot(c_nat * std::ldexp(1.0, khi)).hit);
    } else if (all2 && klo > -opt.scan_limit) {
      --klo;
      scan.insert(scan.begin(), {klo, shoot(c_nat * std::ldexp(1.0, klo)).hit});
    } else {
      throw BracketError("find_c_ac: no gamma1/gamma2 transition in the scan", table.str());
    }
  }
  const int k0 = *find_pair();
  double clo = c_nat * std::ldexp(1.0, k0), chi = 2 * clo;
  lo = shoot(clo);
  hi = shoot(chi);
  while (chi / clo - 1 > opt.tol) {
    const double mid = std::sqrt(clo * chi);
    if (mid <= clo || mid >= chi) break;
    BackwardRun r = shoot(mid);
    ++res.iterations;
    if (r.hit == GammaHit::gamma1) {
      clo = mid;
      lo = std::move(r);
    } else if (r.hit == GammaHit::gamma2) {
      chi = mid;
      hi = std::move(r);
    } else {
      clo = chi = mid;
      lo = hi = std::move(r);
      break;
    }
  }
  res.lo = clo;
  res.hi = chi;
  res.critical_value = std::sqrt(clo * chi);

  // Closure on the part of the gamma1 trajectory shared with the gamma2 one.
  AcShootOptions dense = opt;
  dense.integ.max_step = std::min(opt.integ.max_step, 0.01 * g.r0 * g.r0 * g.r0);
  lo = extend_ac_backward(g, clo, dense);
  if (chi != clo) hi = extend_ac_backward(g, chi, dense);
  const double b0 = g.b0();
  double a_cut = 0;
  for (const auto& smp : lo->traj.samples) {
    double bh;
    if (!b_at(hi->traj, smp.param, bh)) continue;
    if (std::abs(bh - smp.state.b) > 1e-8 * b0) {
      a_cut = smp.param;
      break;
    }
  }
  res.closure = closure_extract_beta(lo->traj, g.m, g.n, g.r0, 2 * a_cut);
  return res;
}

std::string kmn_forward_decision(int m, int n, double r0, double beta, const IntegratorOptions& integ) {
  const U1SeedResult seed = seed_kmn(m, n, r0, beta);
  ClassifyOptions co;
  co.decision_only = true;
  co.integ = integ;
  return to_string(classify(seed.state, seed.t, seed.params, co).verdict.kind);
}

ShootResult find_beta_ac(int m, int n, double r0, const BetaShootOptions& opt) {
  ShootResult res;
  std::ostringstream table;
  auto decide = [&](double beta) {
    const std::string d = kmn_forward_decision(m, n, r0, beta, opt.integ);
    res.history.push_back({beta, d});
    table << beta << " " << d << "\n";
    return d;
  };
  std::optional<int> k0;
  std::string prev;
  for (int k = opt.scan_lo; k <= opt.scan_hi; ++k) {
    const std::string d = decide(std::ldexp(1.0, k));
    if (k > opt.scan_lo && prev == "Incomplete" && d == "ALC") {
      k0 = k - 1;
      break;
    }
    prev = d;
  }
  if (!k0) throw BracketError("find_beta_ac: no Incomplete/ALC transition in the scan", table.str());
  double lo = std::ldexp(1.0, *k0), hi = 2 * lo;
  while (hi / lo - 1 > opt.tol) {
    const double mid = std::sqrt(lo * hi);
    const std::string d = decide(mid);
    ++res.iterations;
    if (d == "ALC") hi = mid;
    else if (d == "Incomplete") lo = mid;
    else throw BracketError("find_beta_ac: undecided trajectory at beta = " + std::to_string(mid), table.str());
  }
  res.lo = lo;
  res.hi = hi;
  res.critical_value = std::sqrt(lo * hi);
  return res;
}

}  // namespace g2flow
