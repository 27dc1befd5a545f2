#include "g2flow/regions.hpp"

#include <algorithm>
#include <cmath>

#include "g2flow/errors.hpp"

namespace g2flow {

namespace {

double rel(double hi, double lo) {
  const double den = std::abs(hi) + std::abs(lo);
  if (den == 0.0) return 0.0;
  return (hi - lo) / den;
}

}  // namespace

const char* to_string(Chamber c) {
  switch (c) {
    case Chamber::alc_chamber: return "alc_chamber";
    case Chamber::alc_strict: return "alc_strict";
    case Chamber::death_quadrant: return "death_quadrant";
    case Chamber::ac_backward: return "ac_backward";
  }
  return "?";
}

bool ChamberSet::contains(Chamber c) const {
  switch (c) {
    case Chamber::alc_chamber: return alc_chamber;
    case Chamber::alc_strict: return alc_strict;
    case Chamber::death_quadrant: return death_quadrant;
    case Chamber::ac_backward: return ac_backward;
  }
  return false;
}

std::vector<std::string> ChamberSet::names() const {
  std::vector<std::string> v;
  for (Chamber c : {Chamber::alc_chamber, Chamber::alc_strict, Chamber::death_quadrant,
                    Chamber::ac_backward})
    if (contains(c)) v.emplace_back(to_string(c));
  return v;
}

bool alc_strict_admissible(const ModelParams& mp) {
  return mp.q >= mp.p || (mp.q == -mp.p && mp.q <= 0);
}

std::vector<double> chamber_margins(Chamber c, const U1State& s, const ModelParams& mp,
                                    double cushion) {
  const double floor = mp.b_floor();
  const double above_floor = floor > 0 ? rel(s.b, floor) : (s.b > 0 ? 1.0 : -1.0);
  switch (c) {
    case Chamber::alc_chamber:
      return {rel(s.da, s.db) - cushion, rel(s.a, s.b) - cushion, above_floor - cushion};
    case Chamber::alc_strict: {
      if (!alc_strict_admissible(mp)) return {-1.0};
      auto v = chamber_margins(Chamber::alc_chamber, s, mp, cushion);
      v.push_back(rel(s.da * s.b, s.a * s.db) - cushion);
      return v;
    }
    case Chamber::death_quadrant:
      return {s.da > 0 ? 1.0 : -1.0, rel(s.b, s.a) - cushion,
              rel(s.a * s.db, s.da * s.b) - cushion, above_floor - cushion};
    case Chamber::ac_backward: {
      const double F = eval_F(s.a, s.b, mp).F;
      return {rel(s.b, s.a) - cushion, rel(s.da, s.db) - cushion, s.db > 0 ? 1.0 : -1.0,
              F > 0 ? 1.0 : -1.0};
    }
  }
  return {-1.0};
}

ChamberSet chamber_membership(const U1State& s, const ModelParams& mp, double cushion) {
  if (!(s.da > 0) || !(s.db > 0) || !(eval_F(s.a, s.b, mp).F > 0))
    throw DomainError("chamber_membership: state off the principal-orbit locus");
  auto inside = [&](Chamber c) {
    for (double v : chamber_margins(c, s, mp, cushion))
      if (!(v > 0)) return false;
    return true;
  };
  ChamberSet r;
  r.alc_chamber = inside(Chamber::alc_chamber);
  r.alc_strict = inside(Chamber::alc_strict);
  r.death_quadrant = inside(Chamber::death_quadrant);
  r.ac_backward = inside(Chamber::ac_backward);
  return r;
}

double GammaCurve::b0() const { return double(m) * n * r0 * r0 * r0; }

double GammaCurve::gamma1(double, double b) const { return b - b0(); }

double GammaCurve::gamma2(double a, double b) const {
  const double r3 = r0 * r0 * r0;
  const double b0v = b0();
  const double den = std::sqrt((b + m * m * r3) * (b + n * n * r3));
  return k * a - (b - b0v) * (b + b0v) / den;
}

ModelParams GammaCurve::params() const { return ModelParams::kmn(m, n, r0); }

void GammaCurve::validate() const {
  params();
  if (!(k > 1.0 && k < 2.0)) throw ConstraintError("gamma curve: k must lie in (1,2)");
}

GammaDistances gamma_hit_test(const U1State& s, const GammaCurve& g, double eps_corner_rel) {
  GammaDistances d;
  d.gamma1 = g.gamma1(s.a, s.b);
  d.gamma2 = g.gamma2(s.a, s.b);
  const double eps = eps_corner_rel * g.r0 * g.r0 * g.r0;
  d.corner = std::abs(s.a) <= eps && std::abs(d.gamma1) <= eps;
  return d;
}

}  // namespace g2flow
