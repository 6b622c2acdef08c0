#include "transeig/bessel.hpp"

#include <cmath>
#include <string>

#include "transeig/errors.hpp"

namespace transeig::special {

namespace {

// Kahan-Babuska summation for complex terms.
class CompensatedSum {
 public:
  void add(cplx t) {
    re_.add(t.real());
    im_.add(t.imag());
  }
  cplx value() const { return {re_.value(), im_.value()}; }

 private:
  struct Part {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
      double t = sum + x;
      comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
      sum = t;
    }
    double value() const { return sum + comp; }
  };
  Part re_;
  Part im_;
};

// Maclaurin series: J_m(x) = sum_k (-1)^k (x/2)^{2k+m} / (k! (k+m)!), m >= 0.
cplx series_j(int m, cplx x) {
  const cplx half = 0.5 * x;
  cplx term = 1.0;
  for (int k = 1; k <= m; ++k) term *= half / static_cast<double>(k);
  const cplx step = -half * half;
  CompensatedSum sum;
  sum.add(term);
  double biggest = std::abs(term);
  for (int k = 1; k < 400; ++k) {
    term *= step / (static_cast<double>(k) * static_cast<double>(k + m));
    sum.add(term);
    double a = std::abs(term);
    biggest = std::max(biggest, a);
    if (a <= 1e-18 * std::abs(sum.value()) || a <= 1e-300 * biggest) break;
  }
  return sum.value();
}

cplx series_j_signed(int m, cplx x) { return m < 0 ? -series_j(-m, x) : series_j(m, x); }

struct Triple {
  cplx below, at, above;  // J_{m-1}, J_m, J_{m+1}
};

// Miller backward recurrence normalized by the generating-function sum
// exp(-+ i x) = J_0 + 2 sum_{n>=1} (-+ i)^n J_n, choosing the sign whose
// modulus is exp(|Im x|) so the normalization has no cancellation.
Triple miller(int m, cplx x) {
  const int start = backward_start_order(m, std::abs(x));
  const bool upper = x.imag() >= 0.0;
  const cplx unit = upper ? cplx(0.0, -1.0) : cplx(0.0, 1.0);
  const cplx target = upper ? std::exp(cplx(0.0, -1.0) * x) : std::exp(cplx(0.0, 1.0) * x);
  const cplx two_over_x = 2.0 / x;

  cplx f_above = 0.0;    // f_{n+1}
  cplx f = 1e-300;       // f_n, n = start
  Triple saved{0.0, 0.0, 0.0};
  cplx norm = 0.0;
  // unit^n, maintained by exact multiplication of +-i (cycle of period 4).
  auto unit_pow = [&](int n) {
    switch (n & 3) {
      case 0: return cplx(1.0, 0.0);
      case 1: return unit;
      case 2: return cplx(-1.0, 0.0);
      default: return -unit;
    }
  };
  for (int n = start; n >= 1; --n) {
    if (n == m + 1) saved.above = f;
    if (n == m) saved.at = f;
    if (n == m - 1) saved.below = f;
    norm += 2.0 * unit_pow(n) * f;
    cplx f_below = static_cast<double>(n) * two_over_x * f - f_above;
    f_above = f;
    f = f_below;
    if (std::abs(f) > 1e250) {
      constexpr double kShrink = 1e-250;
      f *= kShrink;
      f_above *= kShrink;
      norm *= kShrink;
      saved.above *= kShrink;
      saved.at *= kShrink;
      saved.below *= kShrink;
    }
  }
  // f now holds f_0.
  if (m == 0) saved.at = f;
  if (m == 1) saved.below = f;
  norm += f;
  const cplx scale = target / norm;
  Triple out{saved.below * scale, saved.at * scale, saved.above * scale};
  if (m == 0) out.below = -out.above;  // J_{-1} = -J_1
  return out;
}

void check_envelope(int m, cplx x) {
  if (m < 0 || m > kMaxOrder || !(std::abs(x) <= kMaxArgument)) {
    throw DomainError("bessel_j_pair outside envelope: m=" + std::to_string(m) +
                      ", |x|=" + std::to_string(std::abs(x)));
  }
}

}  // namespace

// The cube-root margin covers the transition zone n ~ |x|, where the
// truncation error decays only like exp(-c (n - |x|)^{3/2} / |x|^{1/2}).
int backward_start_order(int m, double abs_x) {
  return m + 15 + static_cast<int>(std::ceil(1.2 * abs_x + 8.0 * std::cbrt(abs_x)));
}

BesselPair bessel_j_pair(int m, cplx x) {
  check_envelope(m, x);
  Triple t{};
  if (std::abs(x) <= kSeriesRadius) {
    t = {series_j_signed(m - 1, x), series_j(m, x), series_j(m + 1, x)};
  } else {
    t = miller(m, x);
  }
  return {t.at, 0.5 * (t.below - t.above)};
}

ScaledBesselPair normalized_bessel_pair(int m, cplx x) {
  check_envelope(m, x);
  if (std::abs(x) <= kSeriesRadius) {
    // S = sum_t c_t y^t, S' = (-x/2) sum_{t>=1} t c_t y^{t-1}, y = -x^2/4, c_t = m!/(t!(t+m)!).
    const cplx y = -0.25 * x * x;
    CompensatedSum s, ds;
    s.add(1.0);
    cplx u = 1.0 / static_cast<double>(m + 1);  // c_1 y^0
    for (int t = 1; t < 400; ++t) {
      s.add(u * y);
      ds.add(static_cast<double>(t) * u);
      double a = std::abs(u) * std::max(1.0, std::abs(y)) * t;
      u *= y / (static_cast<double>(t + 1) * static_cast<double>(t + 1 + m));
      if (a <= 1e-18 * std::max(std::abs(s.value()), std::abs(ds.value()) * std::abs(x))) break;
    }
    return {s.value(), -0.5 * x * ds.value(), 0.0};
  }
  BesselPair j = bessel_j_pair(m, x);
  const cplx log_c = std::lgamma(m + 1.0) + m * std::log(2.0) - static_cast<double>(m) * std::log(x);
  const cplx phase = std::exp(cplx(0.0, log_c.imag()));
  return {phase * j.value, phase * (j.derivative - static_cast<double>(m) / x * j.value), log_c.real()};
}

}  // namespace transeig::special
