#include "g2flow/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "g2flow/errors.hpp"

namespace g2flow {

namespace {

constexpr double kCushion = 1e-14;

double cube(double v) { return v * v * v; }

// Scale of Lambda used for the boundary cushion.
double lambda_scale(const Vec3& y, const ModelParams& mp) {
  const double s = y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + std::abs(mp.p * mp.q);
  return s * s;
}

double checked_sqrt_neg_lambda(const Vec3& y, const ModelParams& mp) {
  const double lam = eval_lambda(y, mp);
  if (lam >= -kCushion * lambda_scale(y, mp))
    throw DomainError("Lambda(y) >= 0: state is not on the stable-form locus");
  return std::sqrt(-lam);
}

}  // namespace

ModelParams ModelParams::plain(double p, double q) {
  ModelParams mp;
  mp.p = p;
  mp.q = q;
  return mp;
}

ModelParams ModelParams::delta_su2(double r0) {
  ModelParams mp;
  mp.family = Family::delta_su2;
  mp.r0 = r0;
  mp.p = cube(r0);
  mp.q = -cube(r0);
  mp.validate();
  return mp;
}

ModelParams ModelParams::su2_factor(double r0) {
  ModelParams mp;
  mp.family = Family::su2_factor;
  mp.r0 = r0;
  mp.p = -cube(r0);
  mp.q = 0.0;
  mp.validate();
  return mp;
}

ModelParams ModelParams::kmn(int m, int n, double r0) {
  ModelParams mp;
  mp.family = Family::kmn;
  mp.m = m;
  mp.n = n;
  mp.r0 = r0;
  mp.p = -double(m) * m * cube(r0);
  mp.q = double(n) * n * cube(r0);
  mp.validate();
  return mp;
}

double ModelParams::b_floor() const {
  double f = std::max(p, -q);
  if (p * q <= 0.0) f = std::max(f, std::sqrt(-p * q));
  return f;
}

double ModelParams::scale() const {
  if (family != Family::none) return cube(std::abs(r0));
  return std::max({std::abs(p), std::abs(q), 1.0});
}

void ModelParams::validate() const {
  switch (family) {
    case Family::none:
      return;
    case Family::delta_su2:
    case Family::su2_factor:
      if (!(r0 > 0.0)) throw ConstraintError("r0 must be positive");
      break;
    case Family::kmn:
      if (m <= 0 || n <= 0) throw ConstraintError("m, n must be positive integers");
      if (std::gcd(m, n) != 1) throw ConstraintError("m and n must be coprime");
      if (!(r0 > 0.0)) throw ConstraintError("r0 must be positive");
      break;
  }
  if (p * q > 0.0) throw ConstraintError("pq must be <= 0 for a tagged family");
}

double eval_lambda(const Vec3& y, const ModelParams& mp) {
  const double a1 = y[0], a2 = y[1], a3 = y[2];
  const double s = a1 + a2 + a3;
  // Heron form of sum a^4 - 2 sum a_i^2 a_j^2.
  const double quartic = -s * (s - 2 * a1) * (s - 2 * a2) * (s - 2 * a3);
  const double pq = mp.p * mp.q;
  const double sq = a1 * a1 + a2 * a2 + a3 * a3;
  return quartic + 4 * (mp.p - mp.q) * a1 * a2 * a3 + pq * (2 * sq + pq);
}

double eval_lambda_factored(const Vec3& y, const ModelParams& mp) {
  const double h = 0.5 * (mp.p - mp.q);
  const double v = y[0] + y[1] + y[2] + h;
  const double v1 = y[0] - y[1] - y[2] + h;
  const double v2 = y[1] - y[2] - y[0] + h;
  const double v3 = y[2] - y[0] - y[1] + h;
  return v * v1 * v2 * v3;
}

FValue eval_F(double a, double b, const ModelParams& mp) {
  const double p = mp.p, q = mp.q;
  const double bp = b - p, bq = b + q, w = b * b + p * q;
  FValue r;
  r.F = 4 * a * a * bp * bq - w * w;
  r.Fa = 8 * a * bp * bq;
  r.Fb = 4 * a * a * (2 * b + q - p) - 4 * b * w;
  return r;
}

double hamiltonian(const FullState& s, const ModelParams& mp) {
  double lam = eval_lambda(s.y, mp);
  if (lam > 0.0) {
    if (lam > kCushion * lambda_scale(s.y, mp))
      throw DomainError("hamiltonian: Lambda(y) > 0");
    lam = 0.0;
  }
  const double prod = s.x[0] * s.x[1] * s.x[2];
  if (s.x[0] * s.x[1] < 0 || s.x[1] * s.x[2] < 0 || s.x[0] * s.x[2] < 0 || prod < 0)
    throw DomainError("hamiltonian: x1 x2 x3 < 0");
  return std::sqrt(-lam) - 2 * std::sqrt(prod);
}

double hamiltonian(const U1State& s, const ModelParams& mp) {
  const double F = eval_F(s.a, s.b, mp).F;
  if (F < 0) throw DomainError("hamiltonian: F(a,b) < 0");
  return std::sqrt(F) - 2 * s.da * s.da * s.db;
}

Vec3 derivatives_from_x(const Vec3& x) {
  if (!(x[0] > 0 && x[1] > 0 && x[2] > 0))
    throw DomainError("x_i must be positive on principal orbits");
  return {std::sqrt(x[1] * x[2] / x[0]), std::sqrt(x[2] * x[0] / x[1]),
          std::sqrt(x[0] * x[1] / x[2])};
}

double mean_curvature(const FullState& s, const ModelParams& mp) {
  const Vec3 d = derivatives_from_x(s.x);
  checked_sqrt_neg_lambda(s.y, mp);
  const double p = mp.p, q = mp.q;
  double num = 0.0;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    const double ai = s.y[i], aj = s.y[j], ak = s.y[k];
    num += d[i] * (ai * (-ai * ai + aj * aj + ak * ak - p * q) - (p - q) * aj * ak);
  }
  const double prod = d[0] * d[1] * d[2];
  return num / (2 * prod * prod);
}

double mean_curvature(const U1State& s, const ModelParams& mp) {
  const FValue f = eval_F(s.a, s.b, mp);
  if (!(f.F > 0)) throw DomainError("mean_curvature: F(a,b) <= 0");
  return (s.da * f.Fa + s.db * f.Fb) / (2 * f.F);
}

MetricCoeffs metric_from_halfflat(const FullState& s, const ModelParams& mp) {
  const Vec3 d = derivatives_from_x(s.x);
  const double root = checked_sqrt_neg_lambda(s.y, mp);
  const double p = mp.p, q = mp.q;
  MetricCoeffs g;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    const double ai = s.y[i], aj = s.y[j], ak = s.y[k];
    const double w = 2 * d[i] / root;
    g.A[i] = w * (aj * ak - p * ai);
    g.B[i] = w * (aj * ak + q * ai);
    g.C[i] = w * (ai * ai - aj * aj - ak * ak - p * q);
  }
  for (int i = 0; i < 3; ++i) {
    if (!(g.A[i] > 0) || !(4 * g.A[i] * g.B[i] - g.C[i] * g.C[i] > 0))
      throw PositivityError("metric block " + std::to_string(i + 1) + " is not positive definite");
  }
  return g;
}

HalfFlatRecovery halfflat_from_metric(const MetricCoeffs& g, const ModelParams& mp) {
  Vec3 det{};
  for (int i = 0; i < 3; ++i) {
    det[i] = 4 * g.A[i] * g.B[i] - g.C[i] * g.C[i];
    if (!(det[i] > 0)) throw DomainError("halfflat_from_metric: 4AB - C^2 <= 0");
  }
  HalfFlatRecovery out;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    out.state.x[i] = 0.25 * std::sqrt(det[j] * det[k]);
  }
  const double p = mp.p, q = mp.q;
  const double sum = p + q;
  const double tol = 1e-14 * std::max({std::abs(p), std::abs(q), 1.0});
  if (std::abs(sum) > tol) {
    for (int i = 0; i < 3; ++i) out.state.y[i] = out.state.x[i] * (g.B[i] - g.A[i]) / sum;
    return out;
  }
  // q = -p: V_i = a_i - a_j - a_k + p is fixed up to sign; take V_i <= 0.
  Vec3 v{};
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    const double r = (g.A[i] + g.B[i] - g.C[i]) * (g.A[j] + g.B[j] + g.C[j]) *
                     (g.A[k] + g.B[k] + g.C[k]);
    if (r < 0) throw DomainError("halfflat_from_metric: negative radicand in p+q=0 branch");
    v[i] = -0.5 * std::sqrt(r);
  }
  for (int k = 0; k < 3; ++k) {
    const int i = (k + 1) % 3, j = (k + 2) % 3;
    out.state.y[k] = p - 0.5 * (v[i] + v[j]);
  }
  out.sign_branch_ambiguous = true;
  return out;
}

double lagrangian_density(const Vec3& y, const Vec3& dy, const ModelParams& mp) {
  const double r = -dy[0] * dy[1] * dy[2] * eval_lambda(y, mp);
  if (r < 0) {
    if (r < -kCushion * lambda_scale(y, mp) * std::abs(dy[0] * dy[1] * dy[2]))
      throw DomainError("lagrangian_density: negative radicand");
    return 0.0;
  }
  return std::cbrt(r);
}

double su2cubed_curve_residual(double x, double y, const ModelParams& mp) {
  const double p = mp.p, q = mp.q;
  const double rhs = ((3 * y - 4 * (p - q)) * y - 6 * p * q) * y * y - p * p * q * q;
  return 4 * x * x * x - rhs;
}

FullState embed(const U1State& s) {
  FullState f;
  f.x = {s.da * s.db, s.da * s.db, s.da * s.da};
  f.y = {s.a, s.a, s.b};
  return f;
}

U1State restrict_to_u1(const FullState& s) {
  const Vec3 d = derivatives_from_x(s.x);
  U1State u;
  u.a = s.y[0];
  u.b = s.y[2];
  u.da = d[0];
  u.db = d[2];
  u.param = Param::arc_length_t;
  return u;
}

U1State to_arc_length(const U1State& s, const ModelParams& mp) {
  if (s.param == Param::arc_length_t) return s;
  const double F = eval_F(s.a, s.b, mp).F;
  if (!(F > 0)) throw DomainError("to_arc_length: F <= 0");
  const double mu = s.db / s.da;
  if (!(mu > 0)) throw DomainError("to_arc_length: db/da <= 0");
  U1State r = s;
  r.da = std::cbrt(std::sqrt(F) / (2 * mu));
  r.db = mu * r.da;
  r.param = Param::arc_length_t;
  return r;
}

}  // namespace g2flow
