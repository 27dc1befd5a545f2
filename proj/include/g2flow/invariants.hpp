#pragma once

#include <array>

namespace g2flow {

using Vec3 = std::array<double, 3>;

enum class Family { none, delta_su2, su2_factor, kmn };

struct ModelParams {
  double p = 0.0;
  double q = 0.0;
  Family family = Family::none;
  int m = 0;
  int n = 0;
  double r0 = 0.0;

  static ModelParams plain(double p, double q);
  static ModelParams delta_su2(double r0);
  static ModelParams su2_factor(double r0);
  static ModelParams kmn(int m, int n, double r0);

  // max(p, -q, sqrt(-pq)); the floor for b in the chamber conditions.
  double b_floor() const;
  // Characteristic size of a, b: r0^3 for tagged families, else max(|p|,|q|,1).
  double scale() const;
  // Throws ConstraintError if the family invariants do not hold.
  void validate() const;
};

struct FullState {
  Vec3 x{};  // x_i = da_j da_k
  Vec3 y{};  // y_i = a_i
};

enum class Param { arc_length_t, a_equals_s };

struct U1State {
  double a = 0.0;
  double b = 0.0;
  double da = 0.0;
  double db = 0.0;
  Param param = Param::arc_length_t;
};

struct MetricCoeffs {
  Vec3 A{};
  Vec3 B{};
  Vec3 C{};
};

struct FValue {
  double F;
  double Fa;
  double Fb;
};

double eval_lambda(const Vec3& y, const ModelParams& mp);
// Product form V*V1*V2*V3, valid only when q = -p.
double eval_lambda_factored(const Vec3& y, const ModelParams& mp);

FValue eval_F(double a, double b, const ModelParams& mp);

double hamiltonian(const FullState& s, const ModelParams& mp);
// sqrt(F) - 2 da^2 db, the restriction of H to the U(1)-symmetric locus.
double hamiltonian(const U1State& s, const ModelParams& mp);

// da_i = sqrt(x_j x_k / x_i)
Vec3 derivatives_from_x(const Vec3& x);

double mean_curvature(const FullState& s, const ModelParams& mp);
double mean_curvature(const U1State& s, const ModelParams& mp);

MetricCoeffs metric_from_halfflat(const FullState& s, const ModelParams& mp);

struct HalfFlatRecovery {
  FullState state;
  // True when p + q = 0 and the sign of a_i - a_j - a_k + p had to be chosen.
  bool sign_branch_ambiguous = false;
};
HalfFlatRecovery halfflat_from_metric(const MetricCoeffs& g, const ModelParams& mp);

double lagrangian_density(const Vec3& y, const Vec3& dy, const ModelParams& mp);

double su2cubed_curve_residual(double x, double y, const ModelParams& mp);

// U(1)-symmetric embedding: a_1 = a_2 = a, a_3 = b.
FullState embed(const U1State& s);
// Inverse of embed; uses a = y_1, b = y_3 and arc-length derivatives.
U1State restrict_to_u1(const FullState& s);

// Converts an a-parametrized state to arc length using 2 da^2 db = sqrt(F).
U1State to_arc_length(const U1State& s, const ModelParams& mp);

}  // namespace g2flow
