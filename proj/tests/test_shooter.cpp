#include <doctest.h>

#include <cmath>
#include <utility>

#include "g2flow/errors.hpp"
#include "g2flow/seeds.hpp"
#include "g2flow/shooter.hpp"

using namespace g2flow;

namespace {

const GammaCurve g12{1, 2, 1.0, 1.5};

U1State at(double a, double b) {
  U1State s;
  s.a = a;
  s.b = b;
  s.da = s.db = 1;
  return s;
}

// Coarse c_ac(1,2,1), shared by the cases below.
const ShootResult& coarse_c12() {
  static const ShootResult r = [] {
    AcShootOptions o;
    o.tol = 1e-9;
    return find_c_ac(g12, o);
  }();
  return r;
}

// Linear interpolation of (b, db) at a on an a-parametrized run with decreasing a.
std::pair<double, double> b_mu_at(const Trajectory& tr, double a) {
  const auto& v = tr.samples;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i].param <= a && a <= v[i - 1].param) {
      const double w = (a - v[i].param) / (v[i - 1].param - v[i].param);
      return {v[i].state.b + w * (v[i - 1].state.b - v[i].state.b),
              v[i].state.db + w * (v[i - 1].state.db - v[i].state.db)};
    }
  }
  return {NAN, NAN};
}

}  // namespace

TEST_CASE("gamma_hit_test: worked values") {
  const GammaDistances c = gamma_hit_test(at(0, 2), g12);
  CHECK(c.gamma1 == 0.0);
  CHECK(c.corner);
  CHECK(gamma_hit_test(at(0.7, 2), g12).gamma1 == 0.0);
  CHECK_FALSE(gamma_hit_test(at(0.7, 2), g12).corner);
  const GammaDistances d = gamma_hit_test(at(1, 3), g12);
  CHECK(d.gamma2 == doctest::Approx(1.5 - 5 / std::sqrt(28.0)).epsilon(1e-15));
  CHECK(d.gamma1 == doctest::Approx(1.0));
  GammaCurve bad = g12;
  bad.k = 2.5;
  CHECK_THROWS_AS(bad.validate(), ConstraintError);
  bad = g12;
  bad.n = 4;
  bad.m = 2;
  CHECK_THROWS_AS(bad.validate(), ConstraintError);
}

TEST_CASE("extend_ac_backward: small c hits gamma1, large c hits gamma2") {
  const double cn = ac_natural_c(g12.params());
  const BackwardRun lo = extend_ac_backward(g12, cn * 1e-3);
  CHECK(lo.hit == GammaHit::gamma1);
  const BackwardRun hi = extend_ac_backward(g12, cn * 1e3);
  CHECK(hi.hit == GammaHit::gamma2);
  // mu = db/da decreases backward
  for (const BackwardRun* r : {&lo, &hi}) {
    REQUIRE(r->traj.samples.size() > 10);
    for (std::size_t i = 1; i < r->traj.samples.size(); ++i) {
      CHECK(r->traj.samples[i].param < r->traj.samples[i - 1].param);
      CHECK(r->traj.samples[i].state.db <= r->traj.samples[i - 1].state.db * (1 + 1e-12));
    }
  }
}

TEST_CASE("closure_extract_beta: forward K_{1,2} run recovers beta") {
  const U1SeedResult s = seed_kmn(1, 2, 1, 1.0, 0.005);
  Budget b;
  // beta = 1 is below beta_ac; da collapses shortly after a = 0.5
  b.span = 0.45;
  IntegratorOptions o;
  o.max_step = 0.005;
  const Trajectory tr = integrate(arc_seed(s.state, s.t), s.params, {}, b, o);
  // kappa ~ beta^-3 is large here, so the window stays close to the corner
  const ClosureResult c = closure_extract_beta(tr, 1, 2, 1, 0.0, 0.1);
  CHECK(c.beta == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(c.residual <= 1e-4);
  const ClosureResult j = closure_extract_beta(tr, 1, 2, 1, 0.0, 0.1);
  CHECK(j.to_json().at("beta").get<double>() == c.beta);
}

TEST_CASE("closure_extract_beta: a run ending on gamma2 is not a closure") {
  const BackwardRun hi = extend_ac_backward(g12, ac_natural_c(g12.params()) * 1e3);
  REQUIRE(hi.hit == GammaHit::gamma2);
  CHECK_THROWS_AS(closure_extract_beta(hi.traj, 1, 2, 1), ClosureError);
}

TEST_CASE("find_c_ac: bracket and cross-validation with the forward shooter") {
  const ShootResult& r = coarse_c12();
  CHECK(r.critical_value > 0);
  CHECK(r.lo <= r.hi);  // a corner hit closes the bracket
  CHECK((r.hi - r.lo) / r.critical_value <= 1e-9);
  CHECK(extend_ac_backward(g12, r.lo).hit != GammaHit::gamma2);
  CHECK(extend_ac_backward(g12, r.hi).hit != GammaHit::gamma1);
  REQUIRE(r.closure.has_value());
  BetaShootOptions bo;
  bo.tol = 1e-7;
  const ShootResult f = find_beta_ac(1, 2, 1, bo);
  CHECK(std::abs(f.critical_value - r.closure->beta) / f.critical_value <= 1e-3);
  CHECK(kmn_forward_decision(1, 2, 1, 2 * f.critical_value) == "ALC");
  CHECK(kmn_forward_decision(1, 2, 1, 0.5 * f.critical_value) == "Incomplete");
  // scan history: gamma1 below, gamma2 above
  for (const auto& e : r.history) {
    if (e.value < r.lo) CHECK(e.outcome != "gamma2");
    if (e.value > r.hi) CHECK(e.outcome != "gamma1");
  }
}

TEST_CASE("find_c_ac: deterministic") {
  AcShootOptions o;
  o.tol = 1e-9;
  const ShootResult r = find_c_ac(g12, o);
  CHECK(r.critical_value == coarse_c12().critical_value);
  CHECK(r.iterations == coarse_c12().iterations);
}

TEST_CASE("find_c_ac: scaling in r0") {
  const double lam = 2;
  AcShootOptions o;
  o.tol = 1e-9;
  const ShootResult r2 = find_c_ac(GammaCurve{1, 2, lam, 1.5}, o);
  CHECK(r2.critical_value / coarse_c12().critical_value == doctest::Approx(std::pow(lam, nu_inf())).epsilon(1e-6));
  REQUIRE(r2.closure.has_value());
  CHECK(r2.closure->beta == doctest::Approx(coarse_c12().closure->beta).epsilon(1e-4));
}

TEST_CASE("find_beta_ac: C7 case") {
  BetaShootOptions bo;
  bo.tol = 1e-6;
  const ShootResult f = find_beta_ac(1, 1, 1, bo);
  CHECK(f.critical_value > 0);
  CHECK(kmn_forward_decision(1, 1, 1, 1.5 * f.critical_value) == "ALC");
  CHECK(kmn_forward_decision(1, 1, 1, 0.7 * f.critical_value) == "Incomplete");
}

TEST_CASE("extend_ac_backward: runs ordered at the AC end never cross") {
  const double cc = coarse_c12().critical_value;
  AcShootOptions o;
  o.integ.max_step = 0.01;
  const BackwardRun hi = extend_ac_backward(g12, 2 * cc, o);
  const BackwardRun lo = extend_ac_backward(g12, 0.5 * cc, o);
  const double a_end = std::max(hi.traj.back().param, lo.traj.back().param);
  const double a_start = std::min(hi.traj.samples.front().param, lo.traj.samples.front().param);
  REQUIRE(a_end < a_start);
  int checked = 0;
  for (int i = 0; i <= 200; ++i) {
    const double a = a_end + (a_start - a_end) * i / 200.0;
    const auto [bh, mh] = b_mu_at(hi.traj, a);
    const auto [bl, ml] = b_mu_at(lo.traj, a);
    if (std::isnan(bh) || std::isnan(bl)) continue;
    ++checked;
    CHECK(bh > bl);
    CHECK(mh < ml);
  }
  CHECK(checked > 150);
}
