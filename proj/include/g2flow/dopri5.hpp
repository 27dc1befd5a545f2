#pragma once

// Dormand-Prince 5(4) with the Hairer-Wanner continuous extension.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>

namespace g2flow {

template <std::size_t N>
class Dopri5 {
 public:
  using State = std::array<double, N>;
  // Returns false when the state lies outside the domain of the vector field.
  using Rhs = std::function<bool(double, const State&, State&)>;

  struct Options {
    double rtol = 1e-11;
    double atol = 1e-14;
    double h_init = 0.0;
    double h_max = std::numeric_limits<double>::infinity();
    double h_min_rel = 1e-14;
  };

  enum class Result { accepted, underflow };

  Dopri5(Rhs f, Options opt) : f_(std::move(f)), opt_(opt) {}

  // dir = +1 forward, -1 backward. Returns false if f is undefined at (t0, y0).
  bool start(double t0, const State& y0, double dir) {
    t_ = t0;
    y_ = y0;
    dir_ = dir >= 0 ? 1.0 : -1.0;
    if (!f_(t_, y_, k1_)) return false;
    h_ = opt_.h_init > 0 ? opt_.h_init : initial_step();
    t_old_ = t_;
    y_old_ = y_;
    return true;
  }

  void set_max_step(double h) { opt_.h_max = h; }

  // Advances by one accepted step, never beyond t_limit (in the direction of travel).
  Result step(double t_limit) {
    for (;;) {
      const double h_prop = h_;
      double h = std::min(h_, opt_.h_max);
      const double room = dir_ * (t_limit - t_);
      bool last = false;
      if (h >= room) {
        h = room;
        last = true;
      }
      const double hmin = opt_.h_min_rel * std::max(std::abs(t_), 1e-300) + 1e-300;
      if (h < hmin && !last) return Result::underflow;
      const double hs = dir_ * h;
      State y1;
      double err = 0.0;
      if (!attempt(hs, y1, err)) {
        h_ = 0.25 * h;
        if (h_ < hmin) return Result::underflow;
        continue;
      }
      if (err <= 1.0) {
        prepare_dense(hs, y1);
        t_old_ = t_;
        y_old_ = y_;
        t_ = last ? t_limit : t_ + hs;
        y_ = y1;
        k1_ = k7_;
        double fac = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        fac = std::clamp(fac, 0.2, 5.0);
        if (reject_streak_ > 0) fac = std::min(fac, 1.0);
        reject_streak_ = 0;
        h_ = std::max(h * fac, hmin);
        if (last) h_ = std::max(h_, h_prop);
        return Result::accepted;
      }
      ++reject_streak_;
      h_ = h * std::max(0.2, 0.9 * std::pow(err, -0.2));
      if (h_ < hmin) return Result::underflow;
    }
  }

  double t() const { return t_; }
  double t_old() const { return t_old_; }
  const State& y() const { return y_; }
  const State& y_old() const { return y_old_; }
  double step_size() const { return h_; }

  // Continuous extension on the last accepted step.
  State dense(double t) const {
    const double hs = t_ - t_old_;
    if (hs == 0.0) return y_;
    const double th = (t - t_old_) / hs;
    const double th1 = 1.0 - th;
    State r;
    for (std::size_t i = 0; i < N; ++i)
      r[i] = rc0_[i] + th * (rc1_[i] + th1 * (rc2_[i] + th * (rc3_[i] + th1 * rc4_[i])));
    return r;
  }

 private:
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                          a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  static constexpr double d1 = -12715105075.0 / 11282082432.0,
                          d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0,
                          d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

  double scale(std::size_t, double a, double b) const {
    return opt_.atol + opt_.rtol * std::max(std::abs(a), std::abs(b));
  }

  double initial_step() {
    State y1, f1;
    double d0 = 0, d1n = 0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = scale(i, y_[i], y_[i]);
      d0 += (y_[i] / sc) * (y_[i] / sc);
      d1n += (k1_[i] / sc) * (k1_[i] / sc);
    }
    d0 = std::sqrt(d0 / N);
    d1n = std::sqrt(d1n / N);
    double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    h0 = std::min(h0, opt_.h_max);
    for (std::size_t i = 0; i < N; ++i) y1[i] = y_[i] + dir_ * h0 * k1_[i];
    if (!f_(t_ + dir_ * h0, y1, f1)) return 0.1 * h0;
    double d2 = 0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = scale(i, y_[i], y_[i]);
      d2 += ((f1[i] - k1_[i]) / sc) * ((f1[i] - k1_[i]) / sc);
    }
    d2 = std::sqrt(d2 / N) / h0;
    const double dm = std::max(d1n, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    return std::min({100 * h0, h1, opt_.h_max});
  }

  bool attempt(double h, State& y1, double& err) {
    State w;
    const double t = t_;
    for (std::size_t i = 0; i < N; ++i) w[i] = y_[i] + h * a21 * k1_[i];
    if (!f_(t + c2 * h, w, k2_)) return false;
    for (std::size_t i = 0; i < N; ++i) w[i] = y_[i] + h * (a31 * k1_[i] + a32 * k2_[i]);
    if (!f_(t + c3 * h, w, k3_)) return false;
    for (std::size_t i = 0; i < N; ++i)
      w[i] = y_[i] + h * (a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]);
    if (!f_(t + c4 * h, w, k4_)) return false;
    for (std::size_t i = 0; i < N; ++i)
      w[i] = y_[i] + h * (a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
    if (!f_(t + c5 * h, w, k5_)) return false;
    for (std::size_t i = 0; i < N; ++i)
      w[i] = y_[i] +
             h * (a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] + a65 * k5_[i]);
    if (!f_(t + h, w, k6_)) return false;
    for (std::size_t i = 0; i < N; ++i)
      y1[i] = y_[i] +
              h * (a71 * k1_[i] + a73 * k3_[i] + a74 * k4_[i] + a75 * k5_[i] + a76 * k6_[i]);
    for (std::size_t i = 0; i < N; ++i)
      if (!std::isfinite(y1[i])) return false;
    if (!f_(t + h, y1, k7_)) return false;
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double e = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] +
                            e6 * k6_[i] + e7 * k7_[i]);
      const double r = e / scale(i, y_[i], y1[i]);
      s += r * r;
    }
    err = std::sqrt(s / N);
    return std::isfinite(err);
  }

  void prepare_dense(double h, const State& y1) {
    for (std::size_t i = 0; i < N; ++i) {
      const double ydiff = y1[i] - y_[i];
      const double bspl = h * k1_[i] - ydiff;
      rc0_[i] = y_[i];
      rc1_[i] = ydiff;
      rc2_[i] = bspl;
      rc3_[i] = ydiff - h * k7_[i] - bspl;
      rc4_[i] = h * (d1 * k1_[i] + d3 * k3_[i] + d4 * k4_[i] + d5 * k5_[i] + d6 * k6_[i] +
                     d7 * k7_[i]);
    }
  }

  Rhs f_;
  Options opt_;
  double t_ = 0, t_old_ = 0, h_ = 0, dir_ = 1;
  int reject_streak_ = 0;
  State y_{}, y_old_{};
  State k1_{}, k2_{}, k3_{}, k4_{}, k5_{}, k6_{}, k7_{};
  State rc0_{}, rc1_{}, rc2_{}, rc3_{}, rc4_{};
};

}  // namespace g2flow
