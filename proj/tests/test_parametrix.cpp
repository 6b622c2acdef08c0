#include <doctest.h>

#include "transeig/errors.hpp"
#include "transeig/parametrix.hpp"

using namespace transeig;
using namespace transeig::exact;
using namespace transeig::parametrix;

namespace {

SymbolExpr rho(int e = 1, GaussianRational c = 1) { return SymbolExpr::rho_power(e, c); }
SymbolExpr g(const Generator& x) { return SymbolExpr(x); }
GaussianRational q(long a, long b) { return {make_rational(a, b), make_rational(0)}; }
const GaussianRational I = GaussianRational::i();

SymbolExpr zn(unsigned k) { return g(gen::z()) * g(gen::n(k)); }

bool is_rnq(const Generator& x) {
  return x.tag == GenTag::n || x.tag == GenTag::r || x.tag == GenTag::qs || x.tag == GenTag::qf;
}

}  // namespace

TEST_CASE("eikonal_table closed forms") {
  EikonalTable t = eikonal_table(4);
  CHECK(t.at(1) == rho());
  SymbolExpr phi2 = (zn(1) - g(gen::r(1))) * rho(-1, q(1, 4));
  CHECK(t.at(2) == phi2);
  SymbolExpr u1 = zn(1) - g(gen::r(1));
  SymbolExpr phi3 = (zn(2) - g(gen::r(2))) * rho(-1, q(1, 6)) - u1 * u1 * rho(-3, q(1, 24));
  CHECK(t.at(3) == phi3);
  CHECK_THROWS_AS(t.at(5), TableUnderflow);
  CHECK_THROWS_AS(eikonal_table(1), PreconditionError);
}

TEST_CASE("eikonal_residual") {
  EikonalTable t = eikonal_table(6);
  auto res = eikonal_residual(t);
  REQUIRE(res.size() == 6);
  CHECK(res[0] == rho(2) + g(gen::r(0)) - zn(0));
  for (std::size_t K = 1; K < res.size(); ++K) CHECK(res[K].is_zero());

  t.phi[3] += g(gen::qs(0));
  CHECK_THROWS_AS(eikonal_residual(t), RecursionBug);
}

TEST_CASE("phi_delta") {
  EikonalTable t = eikonal_table(5);
  CHECK(phi_delta(0, t) == SymbolExpr(2) * t.at(2) + g(gen::qs(0)) * rho() - g(gen::qf(0)));
  for (int k = 0; k <= 3; ++k) {
    SymbolExpr bare = substitute_zero(phi_delta(k, t),
                                      [](const Generator& x) { return x.tag == GenTag::qs || x.tag == GenTag::qf; });
    CHECK(bare == SymbolExpr((k + 1) * (k + 2)) * t.at(k + 2));
  }
  CHECK(partial_derivative(phi_delta(0, t), gen::n(1)) == g(gen::z()) * rho(-1, q(1, 2)));
  CHECK_THROWS_AS(phi_delta(4, t), TableUnderflow);
}

TEST_CASE("transport_table closed forms") {
  EikonalTable eik = eikonal_table(5);
  TransportTable unit = transport_table(2, eik, {.unit_psi = true});
  SymbolExpr a10 = -(zn(1) - g(gen::r(1))) * rho(-2, q(1, 4)) - g(gen::qs(0)) * SymbolExpr(q(1, 2)) +
                   g(gen::qf(0)) * rho(-1, q(1, 2));
  CHECK(unit.at(1, 0) == a10);
  CHECK(unit.at(0, 1).is_zero());

  TransportTable t = transport_table(2, eik);
  CHECK(partial_derivative(t.at(1, 1), gen::n(2)) == g(gen::z()) * g(gen::psi()) * rho(-3, -I * q(1, 4)));
  CHECK_THROWS_AS(transport_table(4, eik), TableUnderflow);
  CHECK_THROWS_AS(t.at(4, 0), TableUnderflow);
}

TEST_CASE("transport_residual vanishes on the triangle") {
  ParametrixTables t = build_tables(3);
  auto res = transport_residual(t.eikonal, t.transport);
  CHECK(res.size() == 10);  // 4 + 3 + 2 + 1
  for (const auto& r : res) CHECK(r.value.is_zero());

  t.transport.a[{2, 1}] += g(gen::z());
  CHECK_THROWS_AS(transport_residual(t.eikonal, t.transport), RecursionBug);
}

TEST_CASE("dn_symbol") {
  ParametrixTables t = build_tables(3);
  SymbolExpr h1 = substitute_zero(partial_derivative(t.dn, gen::h()), std::vector<Generator>{gen::h()});
  CHECK(h1 == SymbolExpr(-I) * t.transport.at(1, 0));
  CHECK(substitute_zero(t.dn, is_rnq) == rho() * g(gen::psi()));
  CHECK(verify_c_constants(t, 4).passed());
}

TEST_CASE("c_constant") {
  CHECK(c_constant(1) == I * q(1, 4));
  CHECK(c_constant(2) == q(-1, 4));
  CHECK(c_constant(3) == I * q(-3, 8));
  CHECK(c_constant(0) == GaussianRational(0));
}

TEST_CASE("verify_n_dependence") {
  ParametrixTables t = build_tables(3);
  CheckReport rep = verify_n_dependence(t);
  CHECK(rep.passed());
  CHECK(rep.checked > 50);
  CHECK(partial_derivative(t.eikonal.at(2), gen::n(1)) == g(gen::z()) * rho(-1, q(1, 4)));
  CHECK(partial_derivative(t.transport.at(1, 0), gen::n(1)) == g(gen::z()) * g(gen::psi()) * rho(-2, q(-1, 4)));
  CHECK(partial_derivative(t.transport.at(2, 1), gen::n(4)).is_zero());

  t.transport.a[{2, 1}] += g(gen::n(5));
  CheckReport broken = verify_n_dependence(t);
  REQUIRE_FALSE(broken.passed());
  CHECK(broken.failures.front().k == 2);
  CHECK(broken.failures.front().j == 1);
  CHECK(broken.failures.front().l == 5);
}

TEST_CASE("tilde_tables") {
  ParametrixTables t = tilde_tables(3);
  CHECK(t.eikonal.at(2) == (-g(gen::r(1)) * rho(-1, q(1, 4))).with_var(LaurentVar::rho_t));
  for (int k = 1; k <= t.eikonal.order; ++k) {
    for (unsigned l = 0; l < 10; ++l) CHECK(partial_derivative(t.eikonal.at(k), gen::n(l)).is_zero());
  }
  for (int k = 2; k <= t.eikonal.order; ++k) CHECK(substitute_zero(t.eikonal.at(k), is_rnq).is_zero());

  // Dropping n and relabelling rho reproduces the n-free tables term for term.
  ParametrixTables full = build_tables(3);
  for (int k = 1; k <= full.eikonal.order; ++k) {
    SymbolExpr mapped = substitute_zero(full.eikonal.at(k), is_n_generator).with_var(LaurentVar::rho_t);
    CHECK(mapped == t.eikonal.at(k));
    CHECK(mapped.to_string() == t.eikonal.at(k).to_string());
  }
  for (const auto& [kj, a] : full.transport.a) {
    CHECK(substitute_zero(a, is_n_generator).with_var(LaurentVar::rho_t) == t.transport.at(kj.first, kj.second));
  }
  CHECK(eikonal_residual(t.eikonal)[0] == (rho(2) + g(gen::r(0))).with_var(LaurentVar::rho_t));
}

TEST_CASE("degree_report") {
  ParametrixTables t = build_tables(3);
  DegreeReport rep = degree_report(t);
  CHECK(rep.passed());
  CHECK(t.eikonal.at(2).min_exponent() == -1);
  CHECK(t.eikonal.at(3).min_exponent() == -3);
  CHECK(t.transport.at(1, 0).min_exponent() == -2);
}
