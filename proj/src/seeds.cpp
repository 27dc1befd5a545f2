#include "g2flow/seeds.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <tuple>

#include "g2flow/errors.hpp"

namespace g2flow {

namespace {

template <class T>
T lambda_t(const T& a1, const T& a2, const T& a3, double p, double q) {
  if (q == -p) {
    const double h = (p - q) / 2;
    return (a1 + a2 + a3 + h) * (a1 - a2 - a3 + h) * (a2 - a3 - a1 + h) * (a3 - a1 - a2 + h);
  }
  const T s = a1 + a2 + a3;
  const T heron = -(s * (s - 2.0 * a1) * (s - 2.0 * a2) * (s - 2.0 * a3));
  return heron + 4.0 * (p - q) * a1 * a2 * a3 + p * q * (2.0 * (a1 * a1 + a2 * a2 + a3 * a3) + p * q);
}

// N_i with dx_i = 2 N_i / sqrt(-Lambda)
template <class T>
T n_t(const T& yi, const T& yj, const T& yk, double p, double q) {
  return yi * (yj * yj + yk * yk - yi * yi - p * q) - (p - q) * yj * yk;
}

// z = (X1, X2, X3, Y1, Y2, Y3); x_i = t^2 xi_i, xi_i = r0^2/4 + tau X_i,
// y_i = r0^3 + tau r0/4 + tau^2 Y_i, tau = t^2.
template <class T>
std::vector<T> phi_delta_su2(const std::vector<T>& z, const T& tau, double r0) {
  using std::sqrt;
  const double p = r0 * r0 * r0, q = -p;
  std::vector<T> xi, y;
  for (int i = 0; i < 3; ++i) {
    xi.push_back(tau * z[i] + r0 * r0 / 4);
    y.push_back(tau * tau * z[3 + i] + tau * (r0 / 4) + r0 * r0 * r0);
  }
  const T lam = lambda_t(y[0], y[1], y[2], p, q);
  const T S = sqrt(divide_by_tau(-lam, 3, tau));
  const T rx = sqrt(xi[0] * xi[1] * xi[2]);
  std::vector<T> out(6);
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    const T N = n_t(y[i], y[j], y[k], p, q);
    out[i] = divide_by_tau(2.0 * N / S - tau * tau * (r0 * r0 / 2), 3, tau) - 4.0 * z[i];
    out[3 + i] = divide_by_tau(xi[j] * xi[k] / rx - r0 / 2, 1, tau) - 4.0 * z[3 + i];
  }
  return out;
}

// x_i = t^2 X_i, y_i = t^2 Y_i, tau = t^2.
template <class T>
std::vector<T> phi_su2_factor(const std::vector<T>& z, const T& tau, double r0) {
  using std::sqrt;
  const double p = -r0 * r0 * r0, q = 0.0;
  std::vector<T> y;
  for (int i = 0; i < 3; ++i) y.push_back(tau * z[3 + i]);
  const T lam = lambda_t(y[0], y[1], y[2], p, q);
  const T S = sqrt(divide_by_tau(-lam, 3, tau));
  const T rx = sqrt(z[0] * z[1] * z[2]);
  std::vector<T> out(6);
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    const T N = n_t(y[i], y[j], y[k], p, q);
    out[i] = 2.0 * divide_by_tau(N, 2, tau) / S - 2.0 * z[i];
    out[3 + i] = z[j] * z[k] / rx - 2.0 * z[3 + i];
  }
  return out;
}

// z = (X1, X3, Y1, Y3): a = t Y1, b = mn r0^3 + t^2 Y3, da db = t X1, da^2 = r0^4 beta^2 + t^2 X3.
template <class T>
std::vector<T> phi_kmn(const std::vector<T>& z, const T& tau, int m, int n, double r0, double beta) {
  using std::sqrt;
  const double r3 = r0 * r0 * r0;
  const double p = -double(m * m) * r3, q = double(n * n) * r3, b0 = double(m * n) * r3;
  const T a = tau * z[2];
  const T b = tau * tau * z[3] + b0;
  const T x2 = tau * tau * z[1] + r0 * r0 * r0 * r0 * beta * beta;
  const T bp = b - p, bq = b + q, w = b * b + p * q;
  const T F = 4.0 * a * a * bp * bq - w * w;
  const T Fa = 8.0 * a * bp * bq;
  const T Fb = 4.0 * a * a * (2.0 * b + (q - p)) - 4.0 * b * w;
  const T sG = sqrt(divide_by_tau(F, 2, tau));
  const T sx2 = sqrt(x2);
  std::vector<T> out(4);
  out[0] = divide_by_tau(Fa, 1, tau) / (4.0 * sG) - z[0];
  out[1] = divide_by_tau(Fb, 2, tau) / (2.0 * sG) - 2.0 * z[1];
  out[2] = sx2 - z[2];
  out[3] = z[0] / sx2 - 2.0 * z[3];
  return out;
}

// z = (X1, X2, X3, Y1, Y2, Y3): x1 = t X1, x2 = t X2, x3 = r0^4 beta^2 + t^2 X3,
// y1 = r0^3 alpha + t Y1, y2 = -r0^3 alpha + t Y2, y3 = r0^3 + t^2 Y3.
template <class T>
std::vector<T> phi_k11(const std::vector<T>& z, const T& tau, double r0, double alpha, double beta) {
  using std::sqrt;
  const double r3 = r0 * r0 * r0;
  const double p = -r3, q = r3;
  const T x3 = tau * tau * z[2] + r0 * r0 * r0 * r0 * beta * beta;
  const T y1 = tau * z[3] + r3 * alpha;
  const T y2 = tau * z[4] - r3 * alpha;
  const T y3 = tau * tau * z[5] + r3;
  const T lam = lambda_t(y1, y2, y3, p, q);
  const T S = sqrt(divide_by_tau(-lam, 2, tau));
  const T rx = sqrt(z[0] * z[1] * x3);
  std::vector<T> out(6);
  out[0] = 2.0 * divide_by_tau(n_t(y1, y2, y3, p, q), 1, tau) / S - z[0];
  out[1] = 2.0 * divide_by_tau(n_t(y2, y3, y1, p, q), 1, tau) / S - z[1];
  out[2] = 2.0 * divide_by_tau(n_t(y3, y1, y2, p, q), 2, tau) / S - 2.0 * z[2];
  out[3] = z[1] * x3 / rx - z[3];
  out[4] = z[0] * x3 / rx - z[4];
  out[5] = z[0] * z[1] / rx - 2.0 * z[5];
  return out;
}

// t dz/dt in the cone frame, sigma = t^-3, P = p/C, Q = q/C.
template <class T, class S>
std::vector<T> phi_cone(const std::vector<T>& z, const S& sigma, double P, double Q) {
  using std::sqrt;
  const double r3 = std::sqrt(3.0);
  const T A = z[2] + 1.0, B = z[3] + 1.0;
  const T bm = B - P * sigma, bp = B + Q * sigma;
  const T w = B * B + (P * Q) * sigma * sigma;
  const T G = 4.0 * A * A * bm * bp - w * w;
  const T sG = sqrt(G);
  const T s2 = sqrt(z[1] + 1.0);
  std::vector<T> out(4);
  out[0] = (4.0 * r3) * A * bm * bp / sG - 4.0 - 4.0 * z[0];
  out[1] = r3 * (4.0 * A * A * (2.0 * B + (Q - P) * sigma) - 4.0 * B * w) / sG - 4.0 - 4.0 * z[1];
  out[2] = 3.0 * s2 - 3.0 - 3.0 * z[2];
  out[3] = 3.0 * (z[0] + 1.0) / s2 - 3.0 - 3.0 * z[3];
  return out;
}

template <class T>
std::vector<T> negate(std::vector<T> v) {
  for (auto& x : v) x = -x;
  return v;
}

void check_positive(double v, const char* what) {
  if (!(v > 0)) throw ConstraintError(std::string(what) + " must be positive");
}

}  // namespace

double nu0() { return (std::sqrt(145.0) - 7.0) / 2.0; }
double nu_inf() { return (std::sqrt(145.0) + 7.0) / 2.0; }

// ---- problems --------------------------------------------------------------

SingularProblem problem_delta_su2(double r0, const Vec3& al) {
  check_positive(r0, "r0");
  if (std::abs(64 * r0 * (al[0] + al[1] + al[2]) - 1.0) > 1e-12)
    throw ConstraintError("delta_su2: 64 r0 (alpha1 + alpha2 + alpha3) must equal 1");
  SingularProblem pb;
  pb.dim = 6;
  pb.weights = {2.0};
  pb.caps = {-1};
  pb.time_generator = 0;
  pb.margin = 6;
  pb.phi = [r0](const std::vector<Series>& z, const Series& tau) { return phi_delta_su2(z, tau, r0); };
  pb.phi_scalar = [r0](const std::vector<long double>& z, long double tau) {
    return phi_delta_su2(z, tau, r0);
  };
  pb.y0 = {2 * r0 * (al[1] + al[2]), 2 * r0 * (al[2] + al[0]), 2 * r0 * (al[0] + al[1]),
           al[0], al[1], al[2]};
  return pb;
}

SingularProblem problem_su2_factor(double r0, const Vec3& al) {
  check_positive(r0, "r0");
  for (double a : al) check_positive(a, "alpha_i");
  if (std::abs(al[0] * al[1] * al[2] - 1.0) > 1e-12)
    throw ConstraintError("su2_factor: alpha1 alpha2 alpha3 must equal 1");
  SingularProblem pb;
  pb.dim = 6;
  pb.weights = {2.0};
  pb.caps = {-1};
  pb.time_generator = 0;
  pb.margin = 3;
  pb.phi = [r0](const std::vector<Series>& z, const Series& tau) { return phi_su2_factor(z, tau, r0); };
  pb.phi_scalar = [r0](const std::vector<long double>& z, long double tau) {
    return phi_su2_factor(z, tau, r0);
  };
  pb.y0 = {r0 * r0 * al[1] * al[2] / 4, r0 * r0 * al[2] * al[0] / 4, r0 * r0 * al[0] * al[1] / 4,
           r0 * al[0] / 4, r0 * al[1] / 4, r0 * al[2] / 4};
  return pb;
}

SingularProblem problem_kmn(int m, int n, double r0, double beta) {
  if (m <= 0 || n <= 0 || std::gcd(m, n) != 1) throw ConstraintError("kmn: m, n must be coprime positive integers");
  check_positive(r0, "r0");
  check_positive(beta, "beta");
  SingularProblem pb;
  pb.dim = 4;
  pb.weights = {1.0};
  pb.caps = {-1};
  pb.time_generator = 0;
  pb.margin = 2;
  pb.phi = [=](const std::vector<Series>& z, const Series& tau) { return phi_kmn(z, tau, m, n, r0, beta); };
  pb.phi_scalar = [=](const std::vector<long double>& z, long double tau) {
    return phi_kmn(z, tau, m, n, r0, beta);
  };
  const double smn = std::sqrt(double(m * n));
  pb.y0 = {smn * (m + n) * r0 * r0 * r0,
           r0 * r0 * beta * (m + n) / (2 * smn) - r0 * r0 * double(m * m * n * n) / (2 * beta * beta),
           r0 * r0 * beta, smn * (m + n) * r0 / (2 * beta)};
  return pb;
}

SingularProblem problem_k11(double r0, double alpha, double beta) {
  check_positive(r0, "r0");
  check_positive(beta, "beta");
  if (!(std::abs(alpha) < 1)) throw ConstraintError("k11: |alpha| must be < 1");
  SingularProblem pb;
  pb.dim = 6;
  pb.weights = {1.0};
  pb.caps = {-1};
  pb.time_generator = 0;
  pb.margin = 2;
  pb.phi = [=](const std::vector<Series>& z, const Series& tau) { return phi_k11(z, tau, r0, alpha, beta); };
  pb.phi_scalar = [=](const std::vector<long double>& z, long double tau) {
    return phi_k11(z, tau, r0, alpha, beta);
  };
  const double r3 = r0 * r0 * r0, sa = std::sqrt(1 - alpha * alpha);
  pb.y0 = {2 * r3 * sa, 2 * r3 * sa, beta * r0 * r0 / sa - r0 * r0 * (1 - alpha * alpha) / (2 * beta * beta),
           r0 * r0 * beta, r0 * r0 * beta, r0 * sa / beta};
  return pb;
}

SingularProblem problem_cs() {
  SingularProblem pb;
  pb.dim = 4;
  pb.weights = {nu0()};
  pb.caps = {-1};
  pb.time_generator = -1;
  pb.margin = 0;
  pb.phi = [](const std::vector<Series>& z, const Series&) { return phi_cone(z, 0.0, 0.0, 0.0); };
  pb.phi_scalar = [](const std::vector<long double>& z, long double) {
    return phi_cone(z, 0.0L, 0.0, 0.0);
  };
  pb.y0 = {0, 0, 0, 0};
  const double v = nu0();
  pb.free.push_back({0, {-(3 + v) / 6, (6 + 2 * v) / 6, 0.5, -1.0}});
  return pb;
}

SingularProblem problem_ac(const ModelParams& mp) {
  const double P = mp.p / kConeC, Q = mp.q / kConeC;
  SingularProblem pb;
  pb.dim = 4;
  pb.weights = {3.0, nu_inf()};
  pb.caps = {-1, -1};
  pb.time_generator = 0;
  pb.margin = 0;
  pb.direction = "from_infinity_backward";
  pb.phi = [P, Q](const std::vector<Series>& z, const Series& tau) { return negate(phi_cone(z, tau, P, Q)); };
  pb.phi_scalar = [P, Q](const std::vector<long double>& z, long double tau) {
    return negate(phi_cone(z, tau, P, Q));
  };
  pb.y0 = {0, 0, 0, 0};
  const double v = nu0();
  pb.free.push_back({1, {-(4 + v) / 9, (8 + 2 * v) / 9, -1.0 / 3, 2.0 / 3}});
  // s^6 resonance: (6 + L) y = Q on the image of 6 + L; the kernel component is fixed by
  // the vanishing of the s^6 coefficient of the Hamiltonian.
  pb.repairs[{2, 0}] = [P, Q](const RepairContext& ctx) -> Eigen::VectorXd {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(ctx.M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd w = svd.matrixU().col(ctx.M.cols() - 1);
    // Q is assembled from terms of size P^2 + Q^2 that cancel
    const double obstruction = std::abs(w.dot(ctx.Q)) / std::max({1.0, ctx.Q.norm(), P * P + Q * Q});
    if (obstruction > 1e-10)
      throw ResonanceError("ac series: obstruction at s^6 does not vanish", ctx.h, 0);
    const Eigen::VectorXd yp = ctx.M.completeOrthogonalDecomposition().solve(ctx.Q);
    Eigen::VectorXd kern(4);
    kern << 2, 2, -1, -1;
    // H = C^2 t^6 (sqrt(G) - sqrt(3) (1 + X1) sqrt(1 + X2))
    auto h_coef = [&](const Eigen::VectorXd& y) {
      const auto z = ctx.series_with(y);
      const auto& lat = z[0].lattice();
      const Series tau = Series::monomial(lat, {1, 0});
      const Series A = z[2] + 1.0, B = z[3] + 1.0;
      const Series wq = B * B + (P * Q) * tau * tau;
      const Series G = 4.0 * A * A * (B - P * tau) * (B + Q * tau) - wq * wq;
      const Series h = sqrt(G) - std::sqrt(3.0) * (z[0] + 1.0) * sqrt(z[1] + 1.0);
      return h[std::size_t(lat->find(ctx.h))];
    };
    const double h0 = h_coef(yp);
    const double h1 = h_coef(yp + kern);
    if (h1 == h0) throw ResonanceError("ac series: Hamiltonian does not fix the kernel", ctx.h, 0);
    return yp + (-h0 / (h1 - h0)) * kern;
  };
  return pb;
}

ConeEigen cs_linearization_eigen() {
  const Eigen::MatrixXd L = linearization(problem_cs());
  ConeEigen out;
  out.L = L;
  Eigen::EigenSolver<Eigen::Matrix4d> es(out.L);
  const std::array<double, 4> target{-1.0, -6.0, -nu_inf(), nu0()};
  for (int k = 0; k < 4; ++k) {
    long best = 0;
    for (long e = 1; e < 4; ++e)
      if (std::abs(es.eigenvalues()[e] - target[std::size_t(k)]) <
          std::abs(es.eigenvalues()[best] - target[std::size_t(k)]))
        best = e;
    out.eigenvalues[std::size_t(k)] = es.eigenvalues()[best].real();
    Eigen::Vector4d v = es.eigenvectors().col(best).real();
    out.eigenvectors[std::size_t(k)] = v / v.norm();
  }
  return out;
}

namespace {

// Halves t until the top band of the series is below tol (relative to 1 + |z|).
double shrink_for_tail(const SeriesSolution& sol, double t, double tol) {
  for (int i = 0; i < 40; ++i) {
    double zmax = 1;
    for (double v : sol.value(t)) zmax = std::max(zmax, std::abs(v));
    if (sol.tail_estimate(t) <= tol * zmax) return t;
    t *= 0.5;
  }
  return t;
}

constexpr double kSeedTail = 1e-13;

}  // namespace

FullSeedResult seed_delta_su2(double r0, const Vec3& alpha, double t_switch, double order) {
  FullSeedResult r;
  r.problem = problem_delta_su2(r0, alpha);
  r.params = ModelParams::delta_su2(r0);
  r.series = solve_singular_ivp(r.problem, {}, order);
  const double t = shrink_for_tail(r.series, t_switch > 0 ? t_switch : 0.1 * r0, kSeedTail);
  const auto z = r.series.value(t);
  const double t2 = t * t, t4 = t2 * t2;
  for (int i = 0; i < 3; ++i) {
    r.state.x[i] = r0 * r0 * t2 / 4 + t4 * z[i];
    r.state.y[i] = r0 * r0 * r0 + r0 * t2 / 4 + t4 * z[3 + i];
  }
  r.t = t;
  r.hamiltonian = hamiltonian(r.state, r.params);
  return r;
}

FullSeedResult seed_su2_factor(double r0, const Vec3& alpha, double t_switch, double order) {
  FullSeedResult r;
  r.problem = problem_su2_factor(r0, alpha);
  r.params = ModelParams::su2_factor(r0);
  r.series = solve_singular_ivp(r.problem, {}, order);
  const double t = shrink_for_tail(r.series, t_switch > 0 ? t_switch : 0.1 * r0, kSeedTail);
  const auto z = r.series.value(t);
  for (int i = 0; i < 3; ++i) {
    r.state.x[i] = t * t * z[i];
    r.state.y[i] = t * t * z[3 + i];
  }
  r.t = t;
  r.hamiltonian = hamiltonian(r.state, r.params);
  return r;
}

double kmn_default_t_switch(double r0, double beta) {
  return 0.1 * r0 * std::min({1.0, std::sqrt(beta), 1.0 / beta});
}

U1SeedResult seed_kmn(int m, int n, double r0, double beta, double t_switch, double order) {
  U1SeedResult r;
  r.problem = problem_kmn(m, n, r0, beta);
  r.params = ModelParams::kmn(m, n, r0);
  r.series = solve_singular_ivp(r.problem, {}, order);
  const double t = shrink_for_tail(
      r.series, t_switch > 0 ? t_switch : kmn_default_t_switch(r0, beta), kSeedTail);
  const auto z = r.series.value(t);
  const double b0 = double(m * n) * r0 * r0 * r0;
  r.state.a = t * z[2];
  r.state.b = b0 + t * t * z[3];
  r.state.da = std::sqrt(r0 * r0 * r0 * r0 * beta * beta + t * t * z[1]);
  r.state.db = t * z[0] / r.state.da;
  r.state.param = Param::arc_length_t;
  r.t = t;
  r.tail = r.series.tail_estimate(t);
  r.hamiltonian = hamiltonian(r.state, r.params);
  return r;
}

FullSeedResult seed_k11(double r0, double alpha, double beta, double t_switch, double order) {
  FullSeedResult r;
  r.problem = problem_k11(r0, alpha, beta);
  r.params = ModelParams::kmn(1, 1, r0);
  r.series = solve_singular_ivp(r.problem, {}, order);
  const double t = shrink_for_tail(
      r.series, t_switch > 0 ? t_switch : kmn_default_t_switch(r0, beta), kSeedTail);
  const auto z = r.series.value(t);
  const double r3 = r0 * r0 * r0;
  r.state.x = {t * z[0], t * z[1], r0 * r0 * r0 * r0 * beta * beta + t * t * z[2]};
  r.state.y = {r3 * alpha + t * z[3], -r3 * alpha + t * z[4], r3 + t * t * z[5]};
  r.t = t;
  r.hamiltonian = hamiltonian(r.state, r.params);
  return r;
}

U1State cone_frame_to_state(const std::vector<double>& z, double t) {
  U1State s;
  const double t2 = t * t, t3 = t2 * t, t4 = t2 * t2;
  s.a = kConeC * t3 * (1 + z[2]);
  s.b = kConeC * t3 * (1 + z[3]);
  s.da = t2 * std::sqrt((1 + z[1]) / 108.0);
  s.db = t4 * (1 + z[0]) / 108.0 / s.da;
  s.param = Param::arc_length_t;
  return s;
}

std::vector<double> state_to_cone_frame(const U1State& s, double t) {
  const double t2 = t * t, t3 = t2 * t, t4 = t2 * t2;
  return {108.0 * s.da * s.db / t4 - 1, 108.0 * s.da * s.da / t4 - 1, s.a / (kConeC * t3) - 1,
          s.b / (kConeC * t3) - 1};
}

namespace {

std::mutex g_cache_mutex;
std::map<int, SeriesSolution> g_cs_cache;
std::map<std::tuple<double, double, double>, SeriesSolution> g_ac_cache;

SeriesSolution cs_base(int k) {
  std::lock_guard<std::mutex> lock(g_cache_mutex);
  auto it = g_cs_cache.find(k);
  if (it == g_cs_cache.end())
    it = g_cs_cache.emplace(k, solve_singular_ivp(problem_cs(), {1.0}, k * nu0() + 1e-9)).first;
  return it->second;
}

SeriesSolution ac_base(const ModelParams& mp, double order) {
  std::lock_guard<std::mutex> lock(g_cache_mutex);
  const auto key = std::make_tuple(mp.p, mp.q, order);
  auto it = g_ac_cache.find(key);
  if (it == g_ac_cache.end())
    it = g_ac_cache.emplace(key, solve_singular_ivp(problem_ac(mp), {1.0}, order)).first;
  return it->second;
}

}  // namespace

U1SeedResult seed_cs_end(double c, double t_switch, double tail_tol) {
  if (!(t_switch > 0)) throw SeedError("seed_cs_end: t_switch must be positive");
  U1SeedResult r;
  r.problem = problem_cs();
  r.params = ModelParams::plain(0, 0);
  double t = t_switch;
  for (int halvings = 0; halvings < 30; ++halvings, t *= 0.5) {
    for (int k = 4; k <= 12; ++k) {
      SeriesSolution sol = cs_base(k).rescale_free({c});
      const double tail = sol.tail_estimate(t);
      if (tail <= tail_tol) {
        r.series = std::move(sol);
        r.t = t;
        r.tail = tail;
        r.state = cone_frame_to_state(r.series.value(t), t);
        r.hamiltonian = hamiltonian(r.state, r.params);
        return r;
      }
    }
  }
  throw SeedError("seed_cs_end: series tail does not fall below tolerance");
}

U1SeedResult seed_ac_end(const ModelParams& mp, double c, double T_switch, double order) {
  if (!(T_switch > 0)) throw SeedError("seed_ac_end: T_switch must be positive");
  U1SeedResult r;
  r.problem = problem_ac(mp);
  r.params = mp;
  r.series = ac_base(mp, order).rescale_free({c});
  const double s = 1.0 / T_switch;
  r.t = T_switch;
  r.tail = r.series.tail_estimate(s);
  r.state = cone_frame_to_state(r.series.value(s), T_switch);
  r.hamiltonian = hamiltonian(r.state, mp);
  return r;
}

}  // namespace g2flow
