#include <doctest.h>

#include <cmath>
#include <random>

#include "transeig/bessel.hpp"
#include "transeig/errors.hpp"
#include "transeig/radial.hpp"

using namespace transeig;
using radial::BoundaryData;
using radial::cplx;
using radial::RadialProfile;

namespace {

// Projective distance between (u1, s du1) and (u2, s du2); s balances the entries.
double direction_error(cplx u1, cplx d1, cplx u2, cplx d2, double s) {
  d1 *= s;
  d2 *= s;
  double n1 = std::hypot(std::abs(u1), std::abs(d1));
  double n2 = std::hypot(std::abs(u2), std::abs(d2));
  return std::abs(u1 * d2 - u2 * d1) / (n1 * n2);
}

// Ratio of the second pair to the first along the dominant component.
cplx ratio(cplx u1, cplx d1, cplx u2, cplx d2) {
  return std::abs(u1) >= std::abs(d1) ? u2 / u1 : d2 / d1;
}

double balance(const RadialProfile& p, int m, cplx lambda) {
  return p.radius() / (1.0 + m + std::abs(lambda) * std::sqrt(p.max_value()) * p.radius());
}

}  // namespace

TEST_CASE("profile validation and evaluation") {
  RadialProfile p(2.0, {1.0, 0.5, -0.01});
  CHECK(p(0.0) == 1.0);
  CHECK(p(1.0) == doctest::Approx(1.49));
  CHECK(p.derivative(1.0, 1) == doctest::Approx(2 * 0.5 - 4 * 0.01));
  CHECK(p.derivative(2.0, 2) == doctest::Approx(2 * 0.5 - 12 * 0.01 * 4));
  CHECK(p.disk_integral() == doctest::Approx(2 * M_PI * (4.0 / 2 + 0.5 * 16.0 / 4 - 0.01 * 64.0 / 6)));
  CHECK_THROWS_AS(RadialProfile(1.0, {1.0, -2.0}), PreconditionError);
  CHECK_THROWS_AS(RadialProfile(1.0, {1.0, -1.0}), PreconditionError);
  CHECK_THROWS_AS(RadialProfile(0.0, {1.0}), PreconditionError);
  CHECK_THROWS_AS(RadialProfile(1.0, {}), PreconditionError);
  CHECK(RadialProfile::constant(1.0, 4.0).is_constant());
}

TEST_CASE("json round trip") {
  RadialProfile p(1.5, {2.0, 0.25});
  auto q = RadialProfile::from_json(p.to_json());
  CHECK(q.radius() == 1.5);
  CHECK(q.coeffs() == p.coeffs());
  radial::ContactFamily f(p, 0.3, 2);
  auto g = radial::ContactFamily::from_json(f.to_json());
  CHECK(g.order() == 2);
  CHECK(g.amplitude() == 0.3);
  CHECK(g.n1().coeffs() == f.n1().coeffs());
  CHECK_THROWS_AS(RadialProfile::from_json(nlohmann::json{{"radius", 1.0}}), ParseError);
}

TEST_CASE("contact family touches to the requested order") {
  RadialProfile base(1.0, {1.0, 0.2});
  for (int j = 1; j <= 6; ++j) {
    radial::ContactFamily f(base, 0.5, j);
    CHECK(radial::contact_order(f.n1(), f.n2()) == j);
    for (int s = 0; s < j; ++s) CHECK(std::abs(f.n1().derivative(1.0, s) - base.derivative(1.0, s)) < 1e-12);
    CHECK(f.n1()(0.0) == doctest::Approx(1.5));
  }
  CHECK(radial::contact_order(base, base) == -1);
  CHECK(radial::contact_order(RadialProfile::constant(1.0, 4.0), RadialProfile::constant(1.0, 1.0)) == 0);
  CHECK_THROWS_AS(radial::ContactFamily(base, -2.0, 1), PreconditionError);
  CHECK_THROWS_AS(radial::ContactFamily(base, 0.0, 1), PreconditionError);
}

TEST_CASE("seed at lambda = 0 is r^m") {
  RadialProfile p(1.0, {1.0, 0.3});
  for (int m : {0, 1, 5}) {
    double r0 = 0.04;
    BoundaryData s = radial::frobenius_seed(p, m, 0.0, r0);
    CHECK(std::abs(std::exp(s.log_scale) * s.u - std::pow(r0, m)) < 1e-15);
    CHECK(std::abs(std::exp(s.log_scale) * s.du - m * std::pow(r0, m - 1)) < 1e-13);
  }
}

TEST_CASE("seed head coefficient") {
  // u = 1 + b1 r^2 + O(r^4) with b1 = -lambda^2 / 4 for n = 1, m = 0.
  RadialProfile p = RadialProfile::constant(1.0, 1.0);
  cplx lambda(3.0, 1.0);
  double r0 = 1e-3;
  BoundaryData s = radial::frobenius_seed(p, 0, lambda, r0);
  cplx b1 = (s.u - 1.0) / (r0 * r0);
  CHECK(std::abs(b1 + lambda * lambda / 4.0) < 1e-5);
}

TEST_CASE("seed matches the Bessel closed form") {
  for (double n : {1.0, 4.0}) {
    RadialProfile p = RadialProfile::constant(1.0, n);
    for (int m : {0, 1, 3, 20, 100}) {
      for (cplx lambda : {cplx(2.0, 0.0), cplx(15.0, -4.0), cplx(40.0, 12.0)}) {
        double r0 = radial::default_seed_radius(p, lambda);
        BoundaryData s = radial::frobenius_seed(p, m, lambda, r0);
        // r^m S(k r) normalization; compare (u, u') after removing the common r0^m.
        cplx k = lambda * std::sqrt(n);
        auto b = special::normalized_bessel_pair(m, k * r0);
        cplx u = b.value, du = m / r0 * b.value + k * b.derivative;
        CHECK(b.log_scale == 0.0);
        CHECK(std::abs(s.log_scale - m * std::log(r0)) < 1e-14);
        CHECK(std::abs(s.u - u) <= 1e-11 * std::abs(u));
        CHECK(std::abs(s.du - du) <= 1e-11 * (std::abs(du) + std::abs(u) / r0));
      }
    }
  }
}

TEST_CASE("seed precondition") {
  RadialProfile p = RadialProfile::constant(1.0, 1.0);
  CHECK_THROWS_AS(radial::frobenius_seed(p, 0, 1.0, 0.2), PreconditionError);
  CHECK_THROWS_AS(radial::frobenius_seed(p, 0, 1.0, 0.0), PreconditionError);
}

TEST_CASE("integration agrees with the Bessel oracle for constant index") {
  std::mt19937 gen(99);
  std::uniform_real_distribution<double> ure(-60.0, 60.0), uim(-12.0, 12.0), un(0.5, 4.0);
  double worst = 0.0;
  double worst_ratio_arg = 0.0;
  int trials = 0;
  while (trials < 60) {
    cplx lambda(ure(gen), uim(gen));
    if (std::abs(lambda) > 60.0 || std::abs(lambda) < 0.1) continue;
    double n = un(gen);
    if (std::abs(lambda) * std::sqrt(n) > 60.0) n = 1.0;
    int m = static_cast<int>(gen() % 101);
    RadialProfile p = RadialProfile::constant(1.0, n);
    BoundaryData a = radial::regular_solution(p, m, lambda);
    BoundaryData b = radial::constant_index_solution(p, m, lambda);
    worst = std::max(worst, direction_error(a.u, a.du, b.u, b.du, balance(p, m, lambda)));
    worst_ratio_arg = std::max(worst_ratio_arg, std::abs(std::arg(ratio(a.u, a.du, b.u, b.du))));
    ++trials;
  }
  CHECK(worst <= 1e-9);
  CHECK(worst_ratio_arg <= 1e-8);
}

TEST_CASE("real lambda matches J_m and its derivative") {
  for (double n : {1.0, 2.5}) {
    RadialProfile p = RadialProfile::constant(1.3, n);
    for (int m : {0, 2, 17}) {
      for (double lambda : {0.7, 9.0, 33.0}) {
        BoundaryData a = radial::regular_solution(p, m, lambda);
        double k = lambda * std::sqrt(n);
        auto j = special::bessel_j_pair(m, k * p.radius());
        CHECK(direction_error(a.u, a.du, j.value, k * j.derivative, balance(p, m, lambda)) <= 1e-9);
      }
    }
  }
}

TEST_CASE("closed form derivatives at the origin") {
  RadialProfile p = RadialProfile::constant(1.0, 2.0);
  BoundaryData a = radial::constant_index_solution(p, 2, 0.0);
  CHECK(a.u == cplx(1.0));
  CHECK(std::abs(a.du - 2.0) < 1e-15);
  CHECK(std::abs(a.u_lambda) < 1e-15);
}

TEST_CASE("variable index agrees with the Frobenius series") {
  // The same polynomial on a ten times larger radius makes R = 1 a legal seed point.
  std::vector<double> c{1.0, 0.5, 0.02};
  RadialProfile p(1.0, c), big(10.0, c);
  for (int m : {0, 3, 12}) {
    for (cplx lambda : {cplx(1.5, 0.0), cplx(4.0, 2.0), cplx(-6.0, -1.0)}) {
      BoundaryData a = radial::regular_solution(p, m, lambda);
      BoundaryData s = radial::frobenius_seed(big, m, lambda, 1.0);
      CHECK(direction_error(a.u, a.du, s.u, s.du, balance(p, m, lambda)) <= 1e-10);
      cplx scale = std::exp(a.log_scale - s.log_scale);
      CHECK(std::abs(scale * a.u - s.u) <= 1e-9 * std::abs(s.u));
      CHECK(std::abs(scale * a.u_lambda - s.u_lambda) <= 1e-8 * std::abs(s.u_lambda));
    }
  }
}

TEST_CASE("evenness and conjugation") {
  RadialProfile p(1.0, {1.5, -0.4, 0.1});
  for (int m : {0, 4, 30}) {
    for (cplx lambda : {cplx(7.3, 0.4), cplx(25.0, -6.0), cplx(2.0, 11.0)}) {
      BoundaryData a = radial::regular_solution(p, m, lambda);
      BoundaryData neg = radial::regular_solution(p, m, -lambda);
      BoundaryData cj = radial::regular_solution(p, m, std::conj(lambda));
      double s = balance(p, m, lambda);
      CHECK(direction_error(a.u, a.du, neg.u, neg.du, s) <= 1e-12);
      CHECK(std::abs(a.log_scale - neg.log_scale) <= 1e-12 * std::max(1.0, std::abs(a.log_scale)));
      CHECK(direction_error(std::conj(a.u), std::conj(a.du), cj.u, cj.du, s) <= 1e-12);
      CHECK(std::abs(std::arg(ratio(std::conj(a.u), std::conj(a.du), cj.u, cj.du))) <= 1e-12);
    }
  }
}

TEST_CASE("overflow threshold does not change the direction") {
  RadialProfile p(1.0, {2.0, 1.0});
  radial::SolverOptions lo, hi;
  lo.overflow_threshold = 1e50;
  hi.overflow_threshold = 1e100;
  for (int m : {0, 60, 200}) {
    for (cplx lambda : {cplx(30.0, 25.0), cplx(150.0, 30.0), cplx(5.0, 0.0)}) {
      BoundaryData a = radial::regular_solution(p, m, lambda, lo);
      BoundaryData b = radial::regular_solution(p, m, lambda, hi);
      CHECK(direction_error(a.u, a.du, b.u, b.du, balance(p, m, lambda)) <= 1e-12);
      cplx scale = std::exp(a.log_scale - b.log_scale);
      CHECK(std::abs(scale * a.u - b.u) <= 1e-12 * std::abs(b.u));
    }
  }
}

TEST_CASE("lambda sensitivity matches finite differences") {
  RadialProfile p(1.0, {1.0, 0.8});
  radial::SolverOptions opt;
  for (int m : {0, 5, 40}) {
    for (cplx lambda : {cplx(3.0, 0.5), cplx(20.0, -3.0), cplx(45.0, 8.0)}) {
      // Fix the seed radius so both evaluations share one discretization path.
      opt.seed_radius = radial::default_seed_radius(p, lambda);
      double h = 1e-6 * (1.0 + std::abs(lambda));
      BoundaryData c = radial::regular_solution(p, m, lambda, opt);
      BoundaryData fp = radial::regular_solution(p, m, lambda + h, opt);
      BoundaryData fm = radial::regular_solution(p, m, lambda - h, opt);
      auto at = [&](const BoundaryData& b, cplx v) { return std::exp(b.log_scale - c.log_scale) * v; };
      cplx du_fd = (at(fp, fp.u) - at(fm, fm.u)) / (2.0 * h);
      cplx ddu_fd = (at(fp, fp.du) - at(fm, fm.du)) / (2.0 * h);
      CHECK(std::abs(c.u_lambda - du_fd) <= 1e-6 * std::abs(c.u_lambda));
      CHECK(std::abs(c.du_lambda - ddu_fd) <= 1e-6 * std::abs(c.du_lambda));
    }
  }
}

TEST_CASE("closed form sensitivities match the integrator") {
  RadialProfile p = RadialProfile::constant(1.0, 3.0);
  for (int m : {0, 7}) {
    for (cplx lambda : {cplx(4.0, 1.0), cplx(30.0, -5.0)}) {
      BoundaryData a = radial::regular_solution(p, m, lambda);
      BoundaryData b = radial::constant_index_solution(p, m, lambda);
      cplx s = std::exp(a.log_scale - b.log_scale);
      CHECK(std::abs(s * a.u - b.u) <= 1e-9 * std::abs(b.u));
      CHECK(std::abs(s * a.du_lambda - b.du_lambda) <= 1e-8 * std::abs(b.du_lambda));
      CHECK(std::abs(s * a.u_lambda - b.u_lambda) <= 1e-8 * std::abs(b.u_lambda));
    }
  }
}

TEST_CASE("envelope") {
  RadialProfile p = RadialProfile::constant(1.0, 1.0);
  CHECK_THROWS_AS(radial::regular_solution(p, 251, 1.0), DomainError);
  CHECK_THROWS_AS(radial::regular_solution(p, 0, cplx(10.0, 31.0)), DomainError);
  CHECK_THROWS_AS(radial::regular_solution(p, 0, 201.0), DomainError);
  CHECK(radial::closed_form_available(p, 200, 400.0));
  CHECK_FALSE(radial::closed_form_available(RadialProfile(1.0, {1.0, 0.1}), 0, 1.0));
}
