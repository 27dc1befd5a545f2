#include "g2flow/singular_ivp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "g2flow/errors.hpp"

namespace g2flow {

namespace {

constexpr double kResonanceGap = 1e-8;

std::string index_string(const std::vector<int>& h) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < h.size(); ++i) os << (i ? "," : "") << h[i];
  os << ")";
  return os.str();
}

Series time_monomial(const LatticePtr& lat, int g) {
  if (g < 0) return Series(lat);
  std::vector<int> h(lat->generators(), 0);
  h[std::size_t(g)] = 1;
  return Series::monomial(lat, h);
}

}  // namespace

Eigen::MatrixXd linearization(const SingularProblem& pb) {
  // Generators: time (if any) and eps (weight 0, cap 1).
  std::vector<double> w;
  std::vector<int> caps;
  int tg = -1;
  double max_order = 0;
  if (pb.time_generator >= 0) {
    w.push_back(pb.weights[std::size_t(pb.time_generator)]);
    caps.push_back(-1);
    tg = 0;
    max_order = pb.margin * w[0];
  }
  w.push_back(0.0);
  caps.push_back(1);
  const std::size_t eg = w.size() - 1;
  auto lat = std::make_shared<const Lattice>(w, caps, max_order);
  const Series tau = time_monomial(lat, tg);
  std::vector<int> he(lat->generators(), 0);
  he[eg] = 1;
  const long ie = lat->find(he);

  Eigen::MatrixXd L(pb.dim, pb.dim);
  for (std::size_t k = 0; k < pb.dim; ++k) {
    std::vector<Series> z;
    for (std::size_t d = 0; d < pb.dim; ++d) z.emplace_back(lat, pb.y0[d]);
    z[k][std::size_t(ie)] = 1.0;
    const auto out = pb.phi(z, tau);
    for (std::size_t d = 0; d < pb.dim; ++d) L(long(d), long(k)) = out[d][std::size_t(ie)];
  }
  return L;
}

SeriesSolution solve_singular_ivp(const SingularProblem& pb, const std::vector<double>& u,
                                  double order) {
  if (u.size() != pb.free.size()) throw SeedError("solve_singular_ivp: free coefficient count");
  const double tw = pb.time_generator >= 0 ? pb.weights[std::size_t(pb.time_generator)] : 0.0;
  auto lat = std::make_shared<const Lattice>(pb.weights, pb.caps, order + pb.margin * tw);
  const Series tau = time_monomial(lat, pb.time_generator);
  const std::size_t n = pb.dim;

  std::vector<Series> z;
  for (std::size_t d = 0; d < n; ++d) z.emplace_back(lat, pb.y0[d]);

  {
    const auto r0 = pb.phi(z, tau);
    double res = 0, sc = 1;
    for (std::size_t d = 0; d < n; ++d) {
      res = std::max(res, std::abs(r0[d].constant()));
      sc = std::max(sc, std::abs(pb.y0[d]));
    }
    if (res > 1e-9 * sc) throw SeedError("solve_singular_ivp: Phi(y0, 0) != 0");
  }

  const Eigen::MatrixXd L = linearization(pb);
  const Eigen::VectorXcd eig = Eigen::EigenSolver<Eigen::MatrixXd>(L).eigenvalues();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(long(n), long(n));

  SeriesSolution sol;
  sol.lattice = lat;
  sol.dim = n;
  sol.truncation_order = order;
  sol.time_generator = pb.time_generator;
  sol.free_values = u;
  sol.direction = pb.direction;

  std::size_t i = 1;
  while (i < lat->size() && lat->order(i) <= order + 1e-9) {
    const double w = lat->order(i);
    std::size_t j = i;
    while (j < lat->size() && std::abs(lat->order(j) - w) < 1e-9) ++j;
    const auto phi = pb.phi(z, tau);
    const Eigen::MatrixXd M = w * I - L;
    double gap = 1e300;
    for (long e = 0; e < eig.size(); ++e) gap = std::min(gap, std::abs(std::complex<double>(w) - eig[e]));

    for (std::size_t k = i; k < j; ++k) {
      const auto& h = lat->index(k);
      Eigen::VectorXd Q = Eigen::VectorXd::Zero(long(n));
      for (std::size_t d = 0; d < n; ++d) Q[long(d)] = phi[d][k];
      Eigen::VectorXd y;

      const FreeMode* fm = nullptr;
      std::size_t fm_idx = 0;
      for (std::size_t f = 0; f < pb.free.size(); ++f) {
        std::vector<int> e(lat->generators(), 0);
        e[pb.free[f].generator] = 1;
        if (e == h) {
          fm = &pb.free[f];
          fm_idx = f;
        }
      }
      if (fm) {
        y = M.completeOrthogonalDecomposition().solve(Q);
        for (std::size_t d = 0; d < n; ++d) y[long(d)] += u[fm_idx] * fm->eigenvector[d];
      } else if (gap > kResonanceGap) {
        y = M.partialPivLu().solve(Q);
      } else {
        const auto it = pb.repairs.find(h);
        if (it == pb.repairs.end()) {
          long comp = 0;
          Eigen::VectorXd::Index r;
          M.colwise().norm().minCoeff(&r);
          comp = long(r);
          throw ResonanceError("solve_singular_ivp: resonance at " + index_string(h), h, int(comp));
        }
        auto with = [&, k](const Eigen::VectorXd& yh) {
          std::vector<Series> zz = z;
          for (std::size_t d = 0; d < n; ++d) zz[d][k] = yh[long(d)];
          return zz;
        };
        RepairContext ctx{h, w, M, Q, with};
        y = it->second(ctx);
        sol.repairs.push_back(index_string(h));
      }
      for (std::size_t d = 0; d < n; ++d) z[d][k] = y[long(d)];
    }
    i = j;
  }

  sol.coeffs.assign(lat->size(), std::vector<double>(n, 0.0));
  for (std::size_t k = 0; k < lat->size(); ++k) {
    if (lat->order(k) > order + 1e-9) continue;
    for (std::size_t d = 0; d < n; ++d) sol.coeffs[k][d] = z[d][k];
  }
  return sol;
}

namespace {

std::vector<long double> evaluate(const SeriesSolution& s, long double x, bool deriv) {
  std::vector<long double> acc(s.dim, 0.0L);
  for (std::size_t k = deriv ? 1 : 0; k < s.lattice->size(); ++k) {
    const double w = s.lattice->order(k);
    if (w > s.truncation_order + 1e-9) continue;
    long double m = std::pow(x, (long double)w);
    if (deriv) m *= w;
    for (std::size_t d = 0; d < s.dim; ++d) acc[d] += s.coeffs[k][d] * m;
  }
  return acc;
}

}  // namespace

std::vector<double> SeriesSolution::value(double x) const {
  const auto v = evaluate(*this, x, false);
  return std::vector<double>(v.begin(), v.end());
}

std::vector<double> SeriesSolution::x_derivative(double x) const {
  const auto v = evaluate(*this, x, true);
  return std::vector<double>(v.begin(), v.end());
}

double SeriesSolution::tail_estimate(double x) const {
  const double band = lattice->min_weight();
  double t = 0;
  for (std::size_t k = 1; k < lattice->size(); ++k) {
    const double w = lattice->order(k);
    if (w > truncation_order + 1e-9 || w <= truncation_order - band + 1e-9) continue;
    double c = 0;
    for (double v : coeffs[k]) c = std::max(c, std::abs(v));
    t += c * std::pow(x, w);
  }
  return t;
}

SeriesSolution SeriesSolution::rescale_free(const std::vector<double>& factors) const {
  SeriesSolution out = *this;
  for (std::size_t k = 0; k < lattice->size(); ++k) {
    double f = 1.0;
    const auto& h = lattice->index(k);
    for (std::size_t g = 0; g < h.size(); ++g) {
      if (int(g) == time_generator) continue;
      if (h[g] == 0) continue;
      const std::size_t slot = g - ((time_generator >= 0 && int(g) > time_generator) ? 1 : 0);
      if (slot < factors.size()) f *= std::pow(factors[slot], h[g]);
    }
    for (double& v : out.coeffs[k]) v *= f;
  }
  for (std::size_t s = 0; s < out.free_values.size() && s < factors.size(); ++s)
    out.free_values[s] *= factors[s];
  return out;
}

const std::vector<double>& SeriesSolution::coefficient(const std::vector<int>& h) const {
  const long k = lattice->find(h);
  if (k < 0) throw SeedError("SeriesSolution: multi-index outside the lattice");
  return coeffs[std::size_t(k)];
}

nlohmann::json SeriesSolution::to_json() const {
  nlohmann::json j;
  std::vector<double> w;
  for (std::size_t g = 0; g < lattice->generators(); ++g) w.push_back(lattice->weight(g));
  j["exponents"] = w;
  j["time_generator"] = time_generator;
  j["truncation_order"] = truncation_order;
  j["direction"] = direction;
  j["free_values"] = free_values;
  j["repairs"] = repairs;
  nlohmann::json terms = nlohmann::json::array();
  for (std::size_t k = 0; k < lattice->size(); ++k) {
    if (lattice->order(k) > truncation_order + 1e-9) continue;
    terms.push_back({{"h", lattice->index(k)}, {"order", lattice->order(k)}, {"coef", coeffs[k]}});
  }
  j["coefficients"] = terms;
  return j;
}

double series_residual(const SingularProblem& pb, const SeriesSolution& sol, double x) {
  const auto z = evaluate(sol, x, false);
  const auto dz = evaluate(sol, x, true);
  const long double tau =
      pb.time_generator >= 0
          ? std::pow((long double)x, (long double)pb.weights[std::size_t(pb.time_generator)])
          : 0.0L;
  const auto phi = pb.phi_scalar(z, tau);
  long double r = 0;
  for (std::size_t d = 0; d < pb.dim; ++d) r = std::max(r, std::abs(dz[d] - phi[d]));
  return double(r);
}

}  // namespace g2flow
