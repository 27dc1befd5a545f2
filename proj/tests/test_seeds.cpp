#include <doctest.h>

#include <cmath>

#include "g2flow/errors.hpp"
#include "g2flow/flow.hpp"
#include "g2flow/seeds.hpp"

using namespace g2flow;

namespace {

double parallel_defect(const Eigen::Vector4d& u, const Eigen::Vector4d& v) {
  return 1 - std::abs(u.dot(v)) / (u.norm() * v.norm());
}

U1State advance(const U1SeedResult& s, double t_end) {
  Budget b;
  b.span = t_end - s.t;
  return integrate(arc_seed(s.state, s.t), s.params, {}, b).back().state;
}

}  // namespace

TEST_CASE("cone eigen-decomposition") {
  const ConeEigen ce = cs_linearization_eigen();
  const double v = nu0();
  CHECK(v * nu_inf() == doctest::Approx(24.0).epsilon(1e-14));
  CHECK(nu_inf() - v == doctest::Approx(7.0).epsilon(1e-14));
  const Eigen::Vector4d e1(4, 4, 3, 3), e6(2, 2, -1, -1);
  const Eigen::Vector4d e_inf(4 + v, -8 - 2 * v, 3, -6), e_0(3 + v, -6 - 2 * v, -3, 6);
  CHECK((ce.L * e1 + e1).norm() <= 1e-12);
  CHECK((ce.L * e6 + 6 * e6).norm() <= 1e-12);
  CHECK(parallel_defect(ce.eigenvectors[0], e1) <= 1e-10);
  CHECK(parallel_defect(ce.eigenvectors[1], e6) <= 1e-10);
  CHECK(parallel_defect(ce.eigenvectors[2], e_inf) <= 1e-10);
  CHECK(parallel_defect(ce.eigenvectors[3], e_0) <= 1e-10);
}

TEST_CASE("B7 seed: equal alpha lies on the quartic") {
  const double al = 1 / 192.0;
  const FullSeedResult s = seed_delta_su2(1, {al, al, al}, 0.1);
  CHECK(s.t == doctest::Approx(0.1));
  const double x = s.state.x[0], y = s.state.y[0];
  CHECK(std::abs(su2cubed_curve_residual(x, y, s.params)) <= 1e-10 * (4 * x * x * x + 3 * y * y * y * y));
  CHECK(std::abs(s.hamiltonian) <= 1e-10);
  CHECK(s.state.y[0] == s.state.y[2]);
}

TEST_CASE("B7 seed: sign of alpha1 - alpha3 fixes the U(1) ordering") {
  const double a3 = 0.002, a1 = (1 / 64.0 - a3) / 2;
  const U1State u = restrict_to_u1(seed_delta_su2(1, {a1, a1, a3}, 0.1).state);
  CHECK(u.a > u.b);
  CHECK(u.da > u.db);
  const double b3 = 0.01, b1 = (1 / 64.0 - b3) / 2;
  const U1State w = restrict_to_u1(seed_delta_su2(1, {b1, b1, b3}, 0.1).state);
  CHECK(w.a < w.b);
  CHECK(w.da < w.db);
}

TEST_CASE("B7 seed: constraint and residual order") {
  CHECK_THROWS_AS(seed_delta_su2(1, {0.01, 0.01, 0.01}), ConstraintError);
  CHECK_THROWS_AS(seed_delta_su2(-1, {-1 / 192.0, -1 / 192.0, -1 / 192.0}), ConstraintError);
  const double a3 = 0.002, a1 = (1 / 64.0 - a3) / 2;
  const FullSeedResult s = seed_delta_su2(1, {a1, a1, a3}, 0.1, 4);
  const double r1 = series_residual(s.problem, s.series, 0.4);
  const double r2 = series_residual(s.problem, s.series, 0.2);
  CHECK(std::log2(r1 / r2) > s.series.truncation_order);
}

TEST_CASE("D7 seed: t^4 coefficient at alpha = 1") {
  // a1 = t^2 / 4 + t^4 / 192 + O(t^6)
  auto coef = [](double t) {
    const FullSeedResult s = seed_su2_factor(1, {1, 1, 1}, t);
    return (s.state.y[0] - t * t / 4) / (t * t * t * t);
  };
  const double c1 = coef(0.02), c2 = coef(0.01);
  CHECK(c2 == doctest::Approx(1 / 192.0).epsilon(1e-3));
  CHECK(std::abs(c2 - 1 / 192.0) < std::abs(c1 - 1 / 192.0));
  const FullSeedResult s = seed_su2_factor(1, {1, 1, 1}, 0.05);
  CHECK(std::abs(s.hamiltonian) <= 1e-10);
}

TEST_CASE("D7 seed: ordering follows alpha1 - alpha3") {
  const double r = std::sqrt(2.0);
  const U1State u = restrict_to_u1(seed_su2_factor(1, {r, r, 0.5}, 0.05).state);
  CHECK(u.a > u.b);
  CHECK(u.da > u.db);
  // alpha3 = 1: a db - b da starts at t^7
  const U1State w = restrict_to_u1(seed_su2_factor(1, {1, 1, 1}, 0.05).state);
  CHECK(std::abs(w.da * w.b - w.a * w.db) <= 1e-6 * w.da * w.b);
  CHECK_THROWS_AS(seed_su2_factor(1, {1, 1, 2}), ConstraintError);
  CHECK_THROWS_AS(seed_su2_factor(1, {-1, -1, 1}), ConstraintError);
}

TEST_CASE("K_{m,n} seed: quadratic coefficient of b") {
  auto coef = [](double t) {
    const U1SeedResult s = seed_kmn(1, 2, 1, 1, t);
    return (s.state.b - 2) / (s.t * s.t);
  };
  const double target = 3 * std::sqrt(2.0) / 2;
  const double c1 = coef(0.02), c2 = coef(0.01);
  CHECK(c2 == doctest::Approx(target).epsilon(1e-3));
  CHECK(std::abs(c2 - target) < std::abs(c1 - target));
  // a = beta t + O(t^3)
  const U1SeedResult s = seed_kmn(1, 2, 1, 2.5, 0.01);
  CHECK(s.state.a / s.t == doctest::Approx(2.5).epsilon(1e-3));
  CHECK(std::abs(s.hamiltonian) <= 1e-10);
  CHECK_THROWS_AS(seed_kmn(2, 4, 1, 1), ConstraintError);
  CHECK_THROWS_AS(seed_kmn(1, 2, 1, 0), ConstraintError);
  CHECK_THROWS_AS(seed_kmn(1, 2, 1, -1), ConstraintError);
}

TEST_CASE("K_{m,n} seed: handoff stability") {
  const double t0 = kmn_default_t_switch(1, 3.0);
  const U1State u = advance(seed_kmn(1, 2, 1, 3.0, t0), 2.0);
  const U1State v = advance(seed_kmn(1, 2, 1, 3.0, t0 / 2), 2.0);
  CHECK(v.a == doctest::Approx(u.a).epsilon(1e-7));
  CHECK(v.b == doctest::Approx(u.b).epsilon(1e-7));
  CHECK(v.da == doctest::Approx(u.da).epsilon(1e-7));
  CHECK(v.db == doctest::Approx(u.db).epsilon(1e-7));
}

TEST_CASE("K_{1,1} seed: alpha = 0 matches the U(1) family") {
  const FullSeedResult f = seed_k11(1, 0, 1, 0.05);
  const U1SeedResult u = seed_kmn(1, 1, 1, 1, 0.05);
  CHECK(f.t == doctest::Approx(u.t));
  const U1State r = restrict_to_u1(f.state);
  CHECK(r.a == doctest::Approx(u.state.a).epsilon(1e-12));
  CHECK(r.b == doctest::Approx(u.state.b).epsilon(1e-12));
  CHECK(r.da == doctest::Approx(u.state.da).epsilon(1e-10));
  CHECK(r.db == doctest::Approx(u.state.db).epsilon(1e-10));
  CHECK(f.state.y[0] == f.state.y[1]);
  const FullSeedResult g = seed_k11(1, 0.3, 1, 0.05);
  CHECK(g.state.y[0] != g.state.y[1]);
  CHECK(std::abs(g.hamiltonian) <= 1e-10);
  CHECK_THROWS_AS(seed_k11(1, 1.0, 1), ConstraintError);
}

TEST_CASE("CS seed") {
  const U1SeedResult s0 = seed_cs_end(0, 0.1);
  const double t = s0.t;
  CHECK(s0.state.a == doctest::Approx(kConeC * t * t * t).epsilon(1e-14));
  CHECK(s0.state.b == s0.state.a);
  CHECK(s0.state.da == doctest::Approx(s0.state.db).epsilon(1e-14));
  const U1SeedResult s1 = seed_cs_end(1, 0.1);
  CHECK(s1.state.a > s1.state.b);
  CHECK(s1.state.da > s1.state.db);
  CHECK(s1.tail <= 1e-10);
  CHECK(std::abs(s1.hamiltonian) <= 1e-10);
  const U1SeedResult sm = seed_cs_end(-1, 0.1);
  CHECK(sm.state.a * sm.state.db - sm.state.da * sm.state.b > 0);
  // da/a - db/b ~ (3/2) c nu0 t^(nu0 - 1)
  const U1SeedResult sl = seed_cs_end(-1e-3, 0.01);
  CHECK((sl.state.da / sl.state.a - sl.state.db / sl.state.b) ==
        doctest::Approx(1.5 * -1e-3 * nu0() * std::pow(sl.t, nu0() - 1)).epsilon(2e-2));
  // leading relative split: a/(C t^3) - 1 = c/2 t^nu0, b/(C t^3) - 1 = -c t^nu0
  const U1SeedResult ss = seed_cs_end(1e-3, 0.01);
  const double tn = std::pow(ss.t, nu0()), ct = kConeC * std::pow(ss.t, 3);
  CHECK((ss.state.a / ct - 1) / tn == doctest::Approx(0.5e-3).epsilon(1e-2));
  CHECK((ss.state.b / ct - 1) / tn == doctest::Approx(-1e-3).epsilon(1e-2));
}

TEST_CASE("AC seed") {
  const U1SeedResult c0 = seed_ac_end(ModelParams::plain(0, 0), 0, 50);
  CHECK(c0.state.a == doctest::Approx(kConeC * 50 * 50 * 50).epsilon(1e-14));
  CHECK(c0.state.b == c0.state.a);
  const ModelParams mp = ModelParams::plain(-1, 4);
  // c T^-nu_inf has to clear the chamber cushion
  const U1SeedResult s = seed_ac_end(mp, 1e8, 50);
  CHECK(s.state.b > s.state.a);
  CHECK(s.state.da > s.state.db);
  CHECK(s.state.db > 0);
  CHECK(chamber_membership(s.state, mp).ac_backward);
  CHECK(std::abs(hamiltonian(s.state, mp)) <= 1e-10 * std::sqrt(eval_F(s.state.a, s.state.b, mp).F));
  // b - a ~ C c T^{3 - nu_inf}
  const double lead = kConeC * 1e8 * std::pow(s.t, 3 - nu_inf());
  CHECK((s.state.b - s.state.a) == doctest::Approx(lead).epsilon(1e-3));
}
