#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <optional>

#include "g2flow/invariants.hpp"
#include "g2flow/singular_ivp.hpp"

namespace g2flow {

// a = b = kConeC t^3 is the G2 cone.
inline const double kConeC = std::sqrt(3.0) / 54.0;
double nu0();     // (sqrt(145) - 7) / 2
double nu_inf();  // (sqrt(145) + 7) / 2

struct ConeEigen {
  Eigen::Matrix4d L;
  // Ordered as -1, -6, -nu_inf, nu0.
  std::array<double, 4> eigenvalues;
  std::array<Eigen::Vector4d, 4> eigenvectors;
};

// Linearization of the cone-frame system at the cone, computed from the series engine,
// and its eigen-decomposition.
ConeEigen cs_linearization_eigen();

struct FullSeedResult {
  ModelParams params;
  SingularProblem problem;
  SeriesSolution series;
  double t = 0;
  FullState state;
  double hamiltonian = 0;
};

struct U1SeedResult {
  ModelParams params;
  SingularProblem problem;
  SeriesSolution series;
  double t = 0;  // arc length
  U1State state;
  double hamiltonian = 0;
  double tail = 0;
};

SingularProblem problem_delta_su2(double r0, const Vec3& alpha);
SingularProblem problem_su2_factor(double r0, const Vec3& alpha);
SingularProblem problem_kmn(int m, int n, double r0, double beta);
SingularProblem problem_k11(double r0, double alpha, double beta);
SingularProblem problem_cs();
SingularProblem problem_ac(const ModelParams& mp);

FullSeedResult seed_delta_su2(double r0, const Vec3& alpha, double t_switch = 0.0,
                              double order = 10);
FullSeedResult seed_su2_factor(double r0, const Vec3& alpha, double t_switch = 0.0,
                               double order = 10);
// U(1)-symmetric K_{m,n} seed (a_1 = a_2); (m, n) = (1, 1) allowed.
U1SeedResult seed_kmn(int m, int n, double r0, double beta, double t_switch = 0.0,
                      double order = 10);
// K_{1,1} seed on the full system; alpha = 0 reproduces seed_kmn(1, 1, ...).
FullSeedResult seed_k11(double r0, double alpha, double beta, double t_switch = 0.0,
                        double order = 10);
double kmn_default_t_switch(double r0, double beta);

// CS end: the truncation grows and t_switch shrinks until the tail is below tail_tol.
U1SeedResult seed_cs_end(double c, double t_switch = 0.1, double tail_tol = 1e-10);
// AC end with unit cone; T_switch is the arc-length parameter of the returned state.
U1SeedResult seed_ac_end(const ModelParams& mp, double c, double T_switch = 50.0,
                         double order = 15);

// Cone-frame variables (X1, X2, Y1, Y2) at arc length t to a U1State and back.
U1State cone_frame_to_state(const std::vector<double>& z, double t);
std::vector<double> state_to_cone_frame(const U1State& s, double t);

}  // namespace g2flow
