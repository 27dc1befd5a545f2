#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <vector>

namespace g2flow {

// Multi-indices h over a set of generators with weights w_g, kept when h.w <= max_order.
// A generator may carry a cap on its exponent (cap < 0 means none); weight 0 requires a cap.
class Lattice {
 public:
  struct Triple {
    std::size_t i, j, k;
  };

  Lattice(std::vector<double> weights, std::vector<int> caps, double max_order);

  std::size_t size() const { return index_.size(); }
  std::size_t generators() const { return weights_.size(); }
  double weight(std::size_t g) const { return weights_[g]; }
  double max_order() const { return max_order_; }
  const std::vector<int>& index(std::size_t i) const { return index_[i]; }
  double order(std::size_t i) const { return order_[i]; }
  // -1 when h is not in the lattice
  long find(const std::vector<int>& h) const;
  // index of h(i) + k e_g, or -1
  long shift(std::size_t i, std::size_t g, int k) const;
  const std::vector<Triple>& products() const { return products_; }
  // smallest positive weight
  double min_weight() const;

 private:
  std::vector<double> weights_;
  std::vector<int> caps_;
  double max_order_;
  std::vector<std::vector<int>> index_;
  std::vector<double> order_;
  std::map<std::vector<int>, std::size_t> lookup_;
  std::vector<Triple> products_;
};

using LatticePtr = std::shared_ptr<const Lattice>;

// Truncated generalized power series with scalar coefficients on a lattice.
class Series {
 public:
  Series() = default;
  explicit Series(LatticePtr lat, double constant = 0.0);
  static Series monomial(LatticePtr lat, const std::vector<int>& h, double coef = 1.0);

  const LatticePtr& lattice() const { return lat_; }
  std::size_t size() const { return c_.size(); }
  double operator[](std::size_t i) const { return c_[i]; }
  double& operator[](std::size_t i) { return c_[i]; }
  double constant() const { return c_.empty() ? 0.0 : c_[0]; }
  double max_abs() const;

  Series& operator+=(const Series& o);
  Series& operator-=(const Series& o);
  Series& operator*=(const Series& o);
  Series& operator+=(double s);
  Series& operator-=(double s);
  Series& operator*=(double s);
  Series& operator/=(double s);
  Series operator-() const;

 private:
  LatticePtr lat_;
  std::vector<double> c_;
};

Series operator+(Series a, const Series& b);
Series operator-(Series a, const Series& b);
Series operator*(const Series& a, const Series& b);
Series operator+(Series a, double s);
Series operator+(double s, Series a);
Series operator-(Series a, double s);
Series operator-(double s, const Series& a);
Series operator*(Series a, double s);
Series operator*(double s, Series a);
Series operator/(Series a, double s);
Series operator/(const Series& a, const Series& b);
Series operator/(double s, const Series& b);

// Newton iterations; NonAnalyticError when the constant term is 0 (resp. <= 0).
Series reciprocal(const Series& f);
Series sqrt(const Series& f);

// v / tau^k where tau is a monomial e_g. The discarded low coefficients must vanish
// up to 1e-8 * max(1, max|v|); otherwise NonAnalyticError.
Series divide_by_tau(const Series& v, int k, const Series& tau);
long double divide_by_tau(long double v, int k, long double tau);

}  // namespace g2flow
