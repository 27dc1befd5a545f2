#include <doctest.h>

#include <cmath>
#include <random>

#include "g2flow/classifier.hpp"
#include "g2flow/errors.hpp"
#include "g2flow/seeds.hpp"

using namespace g2flow;

namespace {

U1State b7_state(double a3, double t = 0.1) {
  const double a1 = (1 / 64.0 - a3) / 2;
  return restrict_to_u1(seed_delta_su2(1, {a1, a1, a3}, t).state);
}

}  // namespace

TEST_CASE("chambers: seed examples") {
  const ModelParams b7 = ModelParams::delta_su2(1);
  const ChamberSet c1 = chamber_membership(b7_state(0.002), b7);
  CHECK(c1.alc_chamber);
  CHECK(c1.alc_strict);
  CHECK_FALSE(c1.death_quadrant);

  const U1SeedResult cs = seed_cs_end(-1, 0.1);
  const ChamberSet c2 = chamber_membership(cs.state, cs.params);
  CHECK(c2.death_quadrant);
  CHECK_FALSE(c2.alc_chamber);

  const ModelParams mp = ModelParams::plain(-1, 4);
  const ChamberSet c3 = chamber_membership(seed_ac_end(mp, 1e8, 50).state, mp);
  CHECK(c3.ac_backward);
  CHECK_FALSE(c3.alc_chamber);

  U1State bad;
  bad.a = 1;
  bad.b = 1;
  bad.da = -1;
  bad.db = 1;
  CHECK_THROWS_AS(chamber_membership(bad, mp), DomainError);
}

TEST_CASE("monitor_ratios: alpha = 0 identities") {
  const ModelParams mp = ModelParams::plain(-1, 4);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.1, 3);
  int n = 0;
  while (n < 200) {
    U1State s;
    s.b = 4 + 3 * U(rng);
    s.a = U(rng) * s.b;
    s.da = U(rng);
    s.db = U(rng);
    if (!(eval_F(s.a, s.b, mp).F > 0)) continue;
    ++n;
    const RatioMonitors r = monitor_ratios(s, 0, mp);
    const double lam = s.da / s.db;
    CHECK(r.R == doctest::Approx(s.a - s.b * lam).epsilon(1e-12));
    CHECK((r.R < 0) == (s.a * s.db - s.da * s.b < 0));
    const double bb = s.b * s.b + mp.p * mp.q;
    CHECK(r.S == doctest::Approx(-8 * (s.a - s.b) * (s.a + s.b) * bb).epsilon(1e-10));
    CHECK(r.P == doctest::Approx(s.b / s.a));
    CHECK(r.Q == doctest::Approx(1 / lam));
  }
}

TEST_CASE("extract_alc_ell: exact model") {
  Trajectory tr;
  const double ell = 2;
  for (double t = 1; t <= 1e6; t *= 1.1) {
    TrajectorySample s;
    s.param = s.t = t;
    s.state.a = t * t * t / 18;
    s.state.b = ell * t * t / 6;
    s.state.da = t * t / 6;
    s.state.db = ell * t / 3;
    tr.samples.push_back(s);
  }
  const AlcEstimate e = extract_alc_ell(tr);
  CHECK(e.ell == doctest::Approx(2).epsilon(1e-6));
  CHECK(e.ell_alt == doctest::Approx(2).epsilon(1e-6));
  CHECK(e.b_exponent == doctest::Approx(2).epsilon(1e-6));
}

TEST_CASE("classify: B7 with alpha3 < alpha1 is ALC") {
  const ModelParams mp = ModelParams::delta_su2(1);
  ClassifyOptions o;
  o.keep_trajectory = true;
  const Classification c = classify(b7_state(0.002), 0.1, mp, o);
  CHECK(c.verdict.kind == VerdictKind::ALC);
  CHECK(std::isfinite(c.verdict.ell));
  CHECK(c.verdict.ell == doctest::Approx(c.verdict.ell_alt).epsilon(0.01));
  CHECK(c.verdict.b_exponent == doctest::Approx(2).epsilon(0.02));
  // a^2/b^3 stays consistent with the ALC model on the tail
  const U1State& s = c.trajectory.back().state;
  CHECK(s.a * s.a / (s.b * s.b * s.b) == doctest::Approx(2 / (3 * std::pow(c.verdict.ell, 3))).epsilon(0.02));
  // mean curvature positive once in the chamber
  bool inside = false;
  for (const auto& smp : c.trajectory.samples) {
    if (!inside && chamber_membership(smp.state, mp).alc_chamber) inside = true;
    if (inside && smp.t > 10) CHECK(mean_curvature(smp.state, mp) > 0);
  }
  CHECK(inside);
}

TEST_CASE("classify: ell decreases along an alpha3 ladder") {
  double prev = std::numeric_limits<double>::infinity();
  for (double a3 : {0.004, 0.002, 0.001, 0.0005}) {
    const Classification c = classify(b7_state(a3), 0.1, ModelParams::delta_su2(1));
    REQUIRE(c.verdict.kind == VerdictKind::ALC);
    CHECK(c.verdict.ell < prev);
    prev = c.verdict.ell;
  }
}

TEST_CASE("classify: D7 with alpha = 1 is AC") {
  const FullSeedResult s = seed_su2_factor(1, {1, 1, 1}, 0.05);
  const Classification c = classify(restrict_to_u1(s.state), s.t, s.params);
  CHECK(c.verdict.kind == VerdictKind::AC);
  CHECK(c.verdict.rate == doctest::Approx(-3).epsilon(0.1));
}

TEST_CASE("classify: CS end") {
  const U1SeedResult p = seed_cs_end(1, 0.1);
  const Classification cp = classify(p.state, p.t, p.params);
  CHECK(cp.verdict.kind == VerdictKind::ALC);
  CHECK(cp.verdict.ell > 0);
  const U1SeedResult m = seed_cs_end(-1, 0.1);
  const Classification cm = classify(m.state, m.t, m.params);
  CHECK(cm.verdict.kind == VerdictKind::Incomplete);
  REQUIRE(cm.verdict.event.has_value());
  const U1SeedResult z = seed_cs_end(0, 0.1);
  CHECK(classify(z.state, z.t, z.params).verdict.kind == VerdictKind::AC);
}

TEST_CASE("classify: decision_only stops at the first chamber entry") {
  const ModelParams mp = ModelParams::delta_su2(1);
  ClassifyOptions o;
  o.decision_only = true;
  const Classification c = classify(b7_state(0.002), 0.1, mp, o);
  CHECK(c.verdict.kind == VerdictKind::ALC);
  CHECK(std::isnan(c.verdict.ell));
  CHECK(c.verdict.budget_used < 1e3);
}

TEST_CASE("Verdict: json round fields") {
  Verdict v;
  v.kind = VerdictKind::Incomplete;
  v.reason = "F vanished";
  v.event = EventKind::F_vanishes;
  const auto j = v.to_json();
  CHECK(j.at("kind") == "Incomplete");
  CHECK(j.at("event") == "F_vanishes");
}
