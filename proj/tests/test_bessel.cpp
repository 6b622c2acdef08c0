#include <doctest.h>

#include <boost/multiprecision/cpp_complex.hpp>
#include <cmath>
#include <random>

#include "transeig/bessel.hpp"
#include "transeig/errors.hpp"

using namespace transeig;
using special::cplx;

namespace {

namespace mp = boost::multiprecision;
using Big = mp::cpp_complex_50;
using BigReal = mp::cpp_bin_float_50;

// 50-digit power series; adequate for |x| <= 20 where terms peak near e^20.
cplx series_oracle(int m, cplx xd) {
  Big x(xd.real(), xd.imag());
  Big half = x / 2;
  Big term = 1;
  for (int k = 1; k <= m; ++k) term *= half / BigReal(k);
  Big sum = term;
  Big step = -half * half;
  for (int k = 1; k < 500; ++k) {
    term *= step / BigReal(k * (k + m));
    sum += term;
    if (mp::abs(term) < BigReal("1e-45") * mp::abs(sum)) break;
  }
  return {static_cast<double>(sum.real()), static_cast<double>(sum.imag())};
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("series head") {
  auto j0 = special::bessel_j_pair(0, 0.0);
  CHECK(j0.value == cplx(1.0));
  CHECK(j0.derivative == cplx(0.0));
  auto j1 = special::bessel_j_pair(1, 0.0);
  CHECK(j1.value == cplx(0.0));
  CHECK(j1.derivative == cplx(0.5));
  auto j5 = special::bessel_j_pair(5, 0.0);
  CHECK(j5.value == cplx(0.0));
}

TEST_CASE("first zero of J0") {
  // Bisection on the oracle.
  double a = 2.0, b = 3.0;
  for (int it = 0; it < 200; ++it) {
    double c = 0.5 * (a + b);
    if ((series_oracle(0, a).real() > 0) == (series_oracle(0, c).real() > 0)) a = c; else b = c;
  }
  CHECK(std::abs(a - 2.404825557695773) < 1e-14);
  CHECK(std::abs(special::bessel_j(0, 2.404825557695773)) <= 1e-11);
}

TEST_CASE("agrees with the high-precision series inside |x| <= 20") {
  std::mt19937 gen(20240611);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  std::uniform_int_distribution<int> order(0, 30);
  double worst = 0.0, worst_d = 0.0;
  int n = 0;
  while (n < 3000) {
    cplx x(u(gen), u(gen));
    if (std::abs(x) > 20.0) continue;
    int m = order(gen);
    auto j = special::bessel_j_pair(m, x);
    worst = std::max(worst, rel(j.value, series_oracle(m, x)));
    cplx dref = 0.5 * ((m == 0 ? -series_oracle(1, x) : series_oracle(m - 1, x)) - series_oracle(m + 1, x));
    worst_d = std::max(worst_d, rel(j.derivative, dref));
    ++n;
  }
  CHECK(worst <= 1e-11);
  CHECK(worst_d <= 1e-11);
}

TEST_CASE("both branches agree across the switch radius") {
  for (int m : {0, 1, 7, 30}) {
    for (double arg : {0.0, 0.7, 1.9, 3.0}) {
      cplx in = std::polar(11.999, arg), out = std::polar(12.001, arg);
      CHECK(rel(special::bessel_j(m, in), series_oracle(m, in)) < 1e-11);
      CHECK(rel(special::bessel_j(m, out), series_oracle(m, out)) < 1e-11);
    }
  }
}

TEST_CASE("three-term recurrence") {
  double worst = 0.0;
  for (int m = 1; m <= 50; ++m) {
    for (double re = -50.0; re <= 50.0; re += 3.7) {
      for (double im = -10.0; im <= 10.0; im += 2.3) {
        cplx x(re, im);
        if (std::abs(x) > 50.0) continue;
        cplx jm = special::bessel_j(m, x);
        cplx res = x * (special::bessel_j(m - 1, x) + special::bessel_j(m + 1, x)) - 2.0 * m * jm;
        worst = std::max(worst, std::abs(res) / std::max(1.0, std::abs(jm) * std::abs(x)));
      }
    }
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("conjugate symmetry") {
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> u(-60.0, 60.0);
  for (int i = 0; i < 500; ++i) {
    cplx x(u(gen), u(gen) / 3.0);
    int m = static_cast<int>(gen() % 80);
    auto a = special::bessel_j_pair(m, std::conj(x));
    auto b = special::bessel_j_pair(m, x);
    CHECK(rel(a.value, std::conj(b.value)) <= 1e-12);
    CHECK(rel(a.derivative, std::conj(b.derivative)) <= 1e-12);
  }
}

TEST_CASE("normalization identity") {
  // J_0 + 2 sum J_{2k} = 1. The partial sums carry terms of size e^{|Im x|},
  // so off the real axis the attainable absolute accuracy scales with that.
  double worst = 0.0;
  for (double re = -30.0; re <= 30.0; re += 1.3) {
    for (double im = -30.0; im <= 30.0; im += 1.7) {
      cplx x(re, im);
      if (std::abs(x) > 30.0) continue;
      int kmax = special::backward_start_order(0, std::abs(x)) / 2;
      cplx s = special::bessel_j(0, x);
      for (int k = 1; k <= kmax && 2 * k <= special::kMaxOrder; ++k) s += 2.0 * special::bessel_j(2 * k, x);
      worst = std::max(worst, std::abs(s - 1.0) / std::exp(std::abs(im)));
    }
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("normalized pair") {
  for (int m : {0, 1, 4, 25, 200}) {
    for (cplx x : {cplx(0.3, 0.1), cplx(5.0, -2.0), cplx(11.5, 0.0), cplx(40.0, 3.0), cplx(300.0, -25.0)}) {
      auto s = special::normalized_bessel_pair(m, x);
      auto j = special::bessel_j_pair(m, x);
      if (std::abs(j.value) < 1e-280) continue;  // J itself underflows; no double reference
      // S = m! (2/x)^m J, compared in log form to avoid overflow.
      cplx log_c = std::lgamma(m + 1.0) + m * std::log(2.0) - static_cast<double>(m) * std::log(x);
      cplx expect = std::exp(log_c - s.log_scale) * j.value;
      CHECK(rel(s.value, expect) < 1e-11);
      // x S'' + (2m+1) S' + x S = 0 via S' = c (J' - m J / x).
      cplx dexpect = std::exp(log_c - s.log_scale) * (j.derivative - static_cast<double>(m) / x * j.value);
      CHECK(std::abs(s.derivative - dexpect) < 1e-11 * (std::abs(dexpect) + std::abs(s.value)));
    }
  }
  auto zero = special::normalized_bessel_pair(3, 0.0);
  CHECK(zero.value == cplx(1.0));
  CHECK(zero.derivative == cplx(0.0));
}

TEST_CASE("envelope") {
  CHECK_THROWS_AS(special::bessel_j_pair(201, 1.0), DomainError);
  CHECK_THROWS_AS(special::bessel_j_pair(-1, 1.0), DomainError);
  CHECK_THROWS_AS(special::bessel_j_pair(0, cplx(400.0, 400.0)), DomainError);
  CHECK_NOTHROW(special::bessel_j_pair(200, 500.0));
}
