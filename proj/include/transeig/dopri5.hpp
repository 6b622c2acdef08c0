#pragma once

// Dormand-Prince 5(4) with PI step-size control, generic over Eigen vector types.

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace transeig::ode {

struct Dopri5Options {
  double initial_step = 0.0;  // 0 selects (t1 - t0) / 100
  double min_step_ratio = 1e-13;
  std::size_t max_steps = 1'000'000;
  double safety = 0.9;
  double fac_min = 0.2;
  double fac_max = 5.0;
  double beta = 0.04;  // PI controller weight of the previous error
};

enum class Dopri5Status { ok, step_underflow, too_many_steps };

struct Dopri5Result {
  Dopri5Status status = Dopri5Status::ok;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  double t = 0.0;
  double h = 0.0;
};

namespace detail {
// Butcher tableau.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
}  // namespace detail

/// Integrates y' = rhs(t, y) from t0 to t1 (t1 > t0).
///   err_norm(err_vec, y_old, y_new) -> scaled error, accepted when <= 1;
///   on_accept(t, y, fsal) may rescale y and the stored stage fsal in place
///   (valid for linear homogeneous systems).
template <typename Vec, typename Rhs, typename ErrNorm, typename OnAccept>
Dopri5Result integrate_dopri5(Rhs&& rhs, double t0, double t1, Vec& y, ErrNorm&& err_norm, OnAccept&& on_accept,
                              const Dopri5Options& opt = {}) {
  using namespace detail;
  Dopri5Result res;
  double t = t0;
  double h = opt.initial_step > 0.0 ? opt.initial_step : (t1 - t0) / 100.0;
  const double alpha = 0.2 - 0.75 * opt.beta;
  double err_prev = 1e-4;
  Vec k1 = rhs(t, y);
  Vec k2, k3, k4, k5, k6, k7, y_new, err;
  bool last_rejected = false;
  while (t < t1) {
    if (res.accepted + res.rejected >= opt.max_steps) {
      res.status = Dopri5Status::too_many_steps;
      break;
    }
    if (h < opt.min_step_ratio * std::max(1.0, std::abs(t))) {
      res.status = Dopri5Status::step_underflow;
      break;
    }
    const bool final_step = t + h >= t1;
    if (final_step) h = t1 - t;
    k2 = rhs(t + c2 * h, y + h * (a21 * k1));
    k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    k5 = rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    k6 = rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const double t_new = final_step ? t1 : t + h;
    k7 = rhs(t_new, y_new);
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double e = err_norm(err, y, y_new);
    if (e <= 1.0 && std::isfinite(e)) {
      t = t_new;
      y = y_new;
      k1 = k7;
      ++res.accepted;
      on_accept(t, y, k1);
      double fac = e == 0.0 ? opt.fac_max
                            : opt.safety * std::pow(e, -alpha) * std::pow(std::max(err_prev, 1e-10), opt.beta);
      fac = std::clamp(fac, opt.fac_min, last_rejected ? 1.0 : opt.fac_max);
      err_prev = std::max(e, 1e-4);
      h *= fac;
      last_rejected = false;
    } else {
      ++res.rejected;
      double fac = std::isfinite(e) ? std::max(opt.fac_min, opt.safety * std::pow(e, -alpha)) : opt.fac_min;
      h *= std::min(fac, 1.0);
      last_rejected = true;
    }
  }
  res.t = t;
  res.h = h;
  return res;
}

}  // namespace transeig::ode
