#include <doctest.h>

#include <random>

#include "random_symbols.hpp"
#include "transeig/errors.hpp"
#include "transeig/exact.hpp"

using namespace transeig;
using namespace transeig::exact;
using transeig::testing::random_symbol;

namespace {

bool canonical_rational(const BigRational& q) {
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return sgn(q.get_den()) > 0 && g == 1;
}

bool canonical(const SymbolExpr& a) {
  for (const auto& [e, p] : a.terms()) {
    if (p.is_zero()) return false;
    for (const auto& [m, c] : p.terms()) {
      if (c.is_zero() || !canonical_rational(c.re()) || !canonical_rational(c.im())) return false;
      for (const auto& f : m.factors()) {
        if (f.second == 0) return false;
      }
    }
  }
  return true;
}

SymbolExpr rho(int e = 1) { return SymbolExpr::rho_power(e); }

const GaussianRational I = GaussianRational::i();

}  // namespace

TEST_CASE("gaussian rationals") {
  GaussianRational a(make_rational(1, 2), make_rational(-3, 4));
  CHECK(a * a.inverse() == GaussianRational(1));
  CHECK(I * I == GaussianRational(-1));
  CHECK(GaussianRational(make_rational(0), make_rational(-2)).pow(-2) == GaussianRational(make_rational(-1, 4), 0));
  CHECK(GaussianRational::parse(a.to_string()) == a);
  CHECK(a.to_string() == "1/2-3/4*i");
  CHECK_THROWS_AS(GaussianRational(0).inverse(), DivisionByZero);
  CHECK(factorial(5) == GaussianRational(120));
}

TEST_CASE("generator names and parsing") {
  CHECK(Generator::parse("n12") == gen::n(12));
  CHECK(Generator::parse("qs0") == gen::qs(0));
  CHECK(Generator::parse("qf3") == gen::qf(3));
  CHECK(Generator::parse("rho_t") == gen::rho_t());
  CHECK(gen::r(0).name() == "r0");
  CHECK_THROWS_AS(Generator::parse("x1"), ParseError);
  CHECK_THROWS_AS(Generator::parse("n"), ParseError);
  CHECK_THROWS_AS(Generator::parse("q1"), ParseError);
}

TEST_CASE("ring_ops examples") {
  CHECK((rho() + SymbolExpr(1)) * (rho() - SymbolExpr(1)) == rho(2) - SymbolExpr(1));

  std::mt19937 rng(7);
  for (int t = 0; t < 20; ++t) {
    SymbolExpr a = random_symbol(rng);
    CHECK(a + SymbolExpr() == a);
  }

  SymbolExpr zn1 = SymbolExpr(gen::z()) * SymbolExpr(gen::n(1)) * rho(-1);
  SymbolExpr quarter = SymbolExpr::rho_power(-1, GaussianRational(make_rational(1, 4), 0));
  SymbolExpr expect(MultiPoly(GaussianRational(make_rational(1, 4), 0), Monomial(gen::z()) * Monomial(gen::n(1))), -2);
  CHECK(zn1 * quarter == expect);
}

TEST_CASE("ring axioms hold exactly on random triples") {
  std::mt19937 rng(2024);
  for (int t = 0; t < 60; ++t) {
    SymbolExpr a = random_symbol(rng), b = random_symbol(rng), c = random_symbol(rng);
    CHECK((a + b) + c == a + (b + c));
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * b == b * a);
    CHECK(a + b == b + a);
    CHECK(a * (b + c) == a * b + a * c);
    CHECK((a - a).is_zero());
    CHECK(canonical(a * b));
    CHECK(canonical(a + b));
    CHECK(canonical(a - b));
    CHECK(canonical(-a));
  }
}

TEST_CASE("divide_by_rho_monomial") {
  SymbolExpr zn1_r1 = SymbolExpr(gen::z()) * SymbolExpr(gen::n(1)) - SymbolExpr(gen::r(1));
  SymbolExpr got = divide_by_rho_monomial(zn1_r1, 4, 1);
  CHECK(got == zn1_r1 * SymbolExpr::rho_power(-1, GaussianRational(make_rational(1, 4), 0)));
  CHECK(divide_by_rho_monomial(rho(2), 1, 2) == SymbolExpr(1));

  std::mt19937 rng(11);
  GaussianRational two_i(make_rational(0), make_rational(2));
  for (int t = 0; t < 30; ++t) {
    SymbolExpr x = random_symbol(rng);
    SymbolExpr a = SymbolExpr::rho_power(1, two_i) * x;
    CHECK(divide_by_rho_monomial(a, two_i, 1) == x);
    int d = t % 5 - 2;
    GaussianRational c(make_rational(t + 1, 3), make_rational(-t, 7));
    CHECK(divide_by_rho_monomial(x * SymbolExpr::rho_power(d, c), c, d) == x);
    CHECK(canonical(divide_by_rho_monomial(x, c, d)));
  }
  CHECK_THROWS_AS(divide_by_rho_monomial(rho(), 0, 1), DivisionByZero);
}

TEST_CASE("partial_derivative") {
  SymbolExpr zn1 = SymbolExpr(gen::z()) * SymbolExpr(gen::n(1)) * rho(-1);
  CHECK(partial_derivative(zn1, gen::n(1)) == SymbolExpr(gen::z()) * rho(-1));
  CHECK(partial_derivative(zn1, gen::n(2)).is_zero());

  std::mt19937 rng(99);
  const Generator gens[] = {gen::z(), gen::n(1), gen::r(2), gen::qs(0), gen::psi()};
  for (int t = 0; t < 40; ++t) {
    SymbolExpr a = random_symbol(rng), b = random_symbol(rng);
    const Generator& g = gens[t % 5];
    const Generator& g2 = gens[(t + 2) % 5];
    CHECK(partial_derivative(a * b, g) == partial_derivative(a, g) * b + a * partial_derivative(b, g));
    CHECK(partial_derivative(partial_derivative(a, g), g2) == partial_derivative(partial_derivative(a, g2), g));
    CHECK(canonical(partial_derivative(a, g)));
  }
}

TEST_CASE("substitute_zero") {
  auto all_n = [](const Generator& g) { return g.tag == GenTag::n; };
  SymbolExpr a = SymbolExpr(gen::z()) * SymbolExpr(gen::n(1)) * rho(-1) + SymbolExpr(gen::r(1)) * rho(-1);
  CHECK(substitute_zero(a, all_n) == SymbolExpr(gen::r(1)) * rho(-1));
  SymbolExpr b = SymbolExpr(gen::r(1)) * rho(2) + SymbolExpr(gen::psi());
  CHECK(substitute_zero(b, all_n) == b);

  // Coefficient of the linear n1 term, recovered two ways.
  std::mt19937 rng(5);
  for (int t = 0; t < 30; ++t) {
    SymbolExpr p0 = substitute_zero(random_symbol(rng), std::vector<Generator>{gen::n(1)});
    SymbolExpr p1 = substitute_zero(random_symbol(rng), std::vector<Generator>{gen::n(1)});
    SymbolExpr p2 = substitute_zero(random_symbol(rng), std::vector<Generator>{gen::n(1)});
    SymbolExpr n1(gen::n(1));
    SymbolExpr poly = p0 + p1 * n1 + p2 * n1 * n1;
    CHECK(substitute_zero(partial_derivative(poly, gen::n(1)), std::vector<Generator>{gen::n(1)}) == p1);
  }
}

TEST_CASE("text form is deterministic and parses back") {
  SymbolExpr a = SymbolExpr(gen::z()) * SymbolExpr(gen::n(1)) * rho(-1) * SymbolExpr(GaussianRational(make_rational(1, 4), 0)) -
                 SymbolExpr(gen::r(1)) * rho(-1) * SymbolExpr(GaussianRational(make_rational(1, 4), 0)) + rho(1);
  CHECK(a.to_string() == "(1/1+0/1*i)*rho^1 + (1/4+0/1*i)*z*n1*rho^-1 + (-1/4+0/1*i)*r1*rho^-1");
  std::mt19937 rng(17);
  for (int t = 0; t < 40; ++t) {
    SymbolExpr x = random_symbol(rng);
    CHECK(SymbolExpr::parse(x.to_string()) == x);
  }
  CHECK(SymbolExpr::parse("0").is_zero());
  CHECK_THROWS_AS(SymbolExpr::parse("(1/1+0/1*i)*foo3"), ParseError);
  CHECK(SymbolExpr::parse("(1/2+0/1*i)*rho_t^-1").var() == LaurentVar::rho_t);
}
