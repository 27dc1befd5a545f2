#include "g2flow/series.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "g2flow/errors.hpp"

namespace g2flow {

namespace {

constexpr double kOrderSlack = 1e-9;

void enumerate(const std::vector<double>& w, const std::vector<int>& caps, double max_order,
               std::size_t g, std::vector<int>& h, double ord,
               std::vector<std::pair<double, std::vector<int>>>& out) {
  if (g == w.size()) {
    out.emplace_back(ord, h);
    return;
  }
  for (int e = 0;; ++e) {
    const double o = ord + e * w[g];
    if (o > max_order + kOrderSlack) break;
    if (caps[g] >= 0 && e > caps[g]) break;
    h[g] = e;
    enumerate(w, caps, max_order, g + 1, h, o, out);
    if (w[g] <= 0 && caps[g] < 0) throw std::invalid_argument("Lattice: weight 0 needs a cap");
  }
  h[g] = 0;
}

void same_lattice(const Series& a, const Series& b) {
  if (a.lattice() != b.lattice()) throw std::invalid_argument("Series: lattice mismatch");
}

int newton_iterations(const Lattice& L) {
  const double w = L.min_weight();
  const double ratio = w > 0 ? L.max_order() / w : 0.0;
  return int(std::ceil(std::log2(ratio + 2.0))) + 2;
}

}  // namespace

Lattice::Lattice(std::vector<double> weights, std::vector<int> caps, double max_order)
    : weights_(std::move(weights)), caps_(std::move(caps)), max_order_(max_order) {
  if (caps_.size() != weights_.size()) caps_.assign(weights_.size(), -1);
  for (double w : weights_)
    if (w < 0) throw std::invalid_argument("Lattice: negative weight");
  std::vector<std::pair<double, std::vector<int>>> all;
  std::vector<int> h(weights_.size(), 0);
  enumerate(weights_, caps_, max_order_, 0, h, 0.0, all);
  std::stable_sort(all.begin(), all.end(), [](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first < y.first;
    return x.second < y.second;
  });
  for (auto& [o, idx] : all) {
    lookup_[idx] = index_.size();
    order_.push_back(o);
    index_.push_back(idx);
  }
  std::vector<int> s(weights_.size());
  for (std::size_t i = 0; i < index_.size(); ++i)
    for (std::size_t j = 0; j < index_.size(); ++j) {
      if (order_[i] + order_[j] > max_order_ + kOrderSlack) continue;
      for (std::size_t g = 0; g < s.size(); ++g) s[g] = index_[i][g] + index_[j][g];
      const long k = find(s);
      if (k >= 0) products_.push_back({i, j, std::size_t(k)});
    }
}

long Lattice::find(const std::vector<int>& h) const {
  const auto it = lookup_.find(h);
  return it == lookup_.end() ? -1 : long(it->second);
}

long Lattice::shift(std::size_t i, std::size_t g, int k) const {
  std::vector<int> h = index_[i];
  h[g] += k;
  if (h[g] < 0) return -1;
  return find(h);
}

double Lattice::min_weight() const {
  double m = 0;
  for (double w : weights_)
    if (w > 0 && (m == 0 || w < m)) m = w;
  return m;
}

Series::Series(LatticePtr lat, double constant) : lat_(std::move(lat)), c_(lat_->size(), 0.0) {
  c_[0] = constant;
}

Series Series::monomial(LatticePtr lat, const std::vector<int>& h, double coef) {
  Series s(lat);
  const long i = lat->find(h);
  if (i >= 0) s.c_[std::size_t(i)] = coef;
  return s;
}

double Series::max_abs() const {
  double m = 0;
  for (double v : c_) m = std::max(m, std::abs(v));
  return m;
}

Series& Series::operator+=(const Series& o) {
  same_lattice(*this, o);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}
Series& Series::operator-=(const Series& o) {
  same_lattice(*this, o);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}
Series& Series::operator*=(const Series& o) {
  *this = *this * o;
  return *this;
}
Series& Series::operator+=(double s) {
  c_[0] += s;
  return *this;
}
Series& Series::operator-=(double s) {
  c_[0] -= s;
  return *this;
}
Series& Series::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}
Series& Series::operator/=(double s) {
  for (double& v : c_) v /= s;
  return *this;
}
Series Series::operator-() const {
  Series r = *this;
  for (double& v : r.c_) v = -v;
  return r;
}

Series operator+(Series a, const Series& b) { return a += b; }
Series operator-(Series a, const Series& b) { return a -= b; }
Series operator*(const Series& a, const Series& b) {
  same_lattice(a, b);
  Series r(a.lattice());
  for (const auto& t : a.lattice()->products()) {
    const double x = a[t.i];
    if (x == 0.0) continue;
    r[t.k] += x * b[t.j];
  }
  return r;
}
Series operator+(Series a, double s) { return a += s; }
Series operator+(double s, Series a) { return a += s; }
Series operator-(Series a, double s) { return a -= s; }
Series operator-(double s, const Series& a) { return (-a) += s; }
Series operator*(Series a, double s) { return a *= s; }
Series operator*(double s, Series a) { return a *= s; }
Series operator/(Series a, double s) { return a /= s; }
Series operator/(const Series& a, const Series& b) { return a * reciprocal(b); }
Series operator/(double s, const Series& b) { return reciprocal(b) * s; }

Series reciprocal(const Series& f) {
  const double f0 = f.constant();
  if (f0 == 0.0) throw NonAnalyticError("reciprocal: vanishing constant term");
  Series g(f.lattice(), 1.0 / f0);
  const int iters = newton_iterations(*f.lattice());
  for (int k = 0; k < iters; ++k) g = g * (2.0 - f * g);
  return g;
}

Series sqrt(const Series& f) {
  const double f0 = f.constant();
  if (!(f0 > 0.0)) throw NonAnalyticError("sqrt: constant term not positive");
  // r -> 1/sqrt(f)
  Series r(f.lattice(), 1.0 / std::sqrt(f0));
  const int iters = newton_iterations(*f.lattice());
  for (int k = 0; k < iters; ++k) r = r * (3.0 - f * r * r) * 0.5;
  return f * r;
}

Series divide_by_tau(const Series& v, int k, const Series& tau) {
  const Lattice& L = *v.lattice();
  long g = -1;
  for (std::size_t i = 1; i < L.size(); ++i)
    if (tau[i] != 0.0) {
      const auto& h = L.index(i);
      for (std::size_t q = 0; q < h.size(); ++q)
        if (h[q] == 1) g = long(q);
      break;
    }
  if (g < 0) throw NonAnalyticError("divide_by_tau: tau is not a generator monomial");
  const double tol = 1e-8 * std::max(1.0, v.max_abs());
  Series r(v.lattice());
  for (std::size_t i = 0; i < L.size(); ++i) {
    if (L.index(i)[std::size_t(g)] < k && std::abs(v[i]) > tol)
      throw NonAnalyticError("divide_by_tau: numerator not divisible by tau^k");
    const long j = L.shift(i, std::size_t(g), k);
    if (j >= 0) r[i] = v[std::size_t(j)];
  }
  return r;
}

long double divide_by_tau(long double v, int k, long double tau) { return v / std::pow(tau, k); }

}  // namespace g2flow
