#pragma once

#include <string>
#include <vector>

#include "g2flow/invariants.hpp"

namespace g2flow {

enum class Chamber { alc_chamber, alc_strict, death_quadrant, ac_backward };

const char* to_string(Chamber c);

struct ChamberSet {
  bool alc_chamber = false;
  bool alc_strict = false;
  bool death_quadrant = false;
  bool ac_backward = false;

  bool contains(Chamber c) const;
  std::vector<std::string> names() const;
};

// Signed margins; the state is strictly inside a chamber iff every margin is > 0.
// Margins are relative quantities with the cushion already subtracted.
std::vector<double> chamber_margins(Chamber c, const U1State& s, const ModelParams& mp,
                                    double cushion);

// Whether the alc_strict chamber is admissible for these constants (q >= p, or q = -p <= 0).
bool alc_strict_admissible(const ModelParams& mp);

ChamberSet chamber_membership(const U1State& s, const ModelParams& mp, double cushion = 1e-9);

struct GammaCurve {
  int m = 1;
  int n = 2;
  double r0 = 1.0;
  double k = 1.5;

  double b0() const;  // m n r0^3
  // b - m n r0^3
  double gamma1(double a, double b) const;
  // k a - (b^2 - m^2 n^2 r0^6) / sqrt((b + m^2 r0^3)(b + n^2 r0^3))
  double gamma2(double a, double b) const;
  ModelParams params() const;
  void validate() const;
};

struct GammaDistances {
  double gamma1;
  double gamma2;
  bool corner;
};

GammaDistances gamma_hit_test(const U1State& s, const GammaCurve& g, double eps_corner_rel = 1e-5);

}  // namespace g2flow
