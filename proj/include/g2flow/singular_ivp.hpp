#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "g2flow/series.hpp"

namespace g2flow {

// System x dz/dx = Phi(z, tau) near x = 0, tau = x^w a time monomial (optional).
struct FreeMode {
  std::size_t generator = 0;
  std::vector<double> eigenvector;
};

struct RepairContext {
  const std::vector<int>& h;
  double order;
  const Eigen::MatrixXd& M;  // order * I - L
  const Eigen::VectorXd& Q;
  // Current solution with the coefficient at h replaced by yh.
  std::function<std::vector<Series>(const Eigen::VectorXd& yh)> series_with;
};

using RepairRule = std::function<Eigen::VectorXd(const RepairContext&)>;

using SeriesPhi = std::function<std::vector<Series>(const std::vector<Series>&, const Series&)>;
using ScalarPhi =
    std::function<std::vector<long double>(const std::vector<long double>&, long double)>;

struct SingularProblem {
  std::size_t dim = 0;
  std::vector<double> weights;  // generator weights in units of x
  std::vector<int> caps;
  int time_generator = -1;
  int margin = 0;  // extra tau-orders carried for divisions by tau
  SeriesPhi phi;
  ScalarPhi phi_scalar;
  std::vector<double> y0;
  std::vector<FreeMode> free;
  std::map<std::vector<int>, RepairRule> repairs;
  std::string direction = "from_zero_forward";
};

struct SeriesSolution {
  LatticePtr lattice;
  std::size_t dim = 0;
  std::vector<std::vector<double>> coeffs;  // per lattice index, only order <= truncation
  double truncation_order = 0;
  int time_generator = -1;
  std::vector<double> free_values;
  std::vector<std::string> repairs;
  std::string direction;

  std::vector<double> value(double x) const;
  // x d/dx of the series
  std::vector<double> x_derivative(double x) const;
  // Size of the terms in the top band (order > N - min weight) at x.
  double tail_estimate(double x) const;
  // Multiplies each coefficient by prod f_g^{h_g} over free generators.
  SeriesSolution rescale_free(const std::vector<double>& factors) const;
  const std::vector<double>& coefficient(const std::vector<int>& h) const;
  nlohmann::json to_json() const;
};

// Linearization d_{y0} Phi(., 0), computed exactly with a nilpotent extra generator.
Eigen::MatrixXd linearization(const SingularProblem& pb);

SeriesSolution solve_singular_ivp(const SingularProblem& pb, const std::vector<double>& u,
                                  double order);

// x dz/dx - Phi(z(x), tau(x)) in long double, max norm.
double series_residual(const SingularProblem& pb, const SeriesSolution& sol, double x);

}  // namespace g2flow
