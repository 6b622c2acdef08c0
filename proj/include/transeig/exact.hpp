#pragma once

// Exact commutative algebra: Gaussian rationals, polynomials over a fixed
// family of named generators, and Laurent polynomials in a distinguished
// variable (rho, or its n-free counterpart rho_t).

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace transeig::exact {

/// Arbitrary precision rational. GMP keeps results of arithmetic canonical;
/// values built from a raw numerator/denominator pair go through make_rational.
using BigRational = mpq_class;

BigRational make_rational(long num, long den = 1);

class GaussianRational {
 public:
  GaussianRational() = default;
  GaussianRational(long v) : re_(v), im_(0) {}  // NOLINT(google-explicit-constructor)
  GaussianRational(BigRational re, BigRational im);

  static GaussianRational i() { return {BigRational(0), BigRational(1)}; }

  const BigRational& re() const { return re_; }
  const BigRational& im() const { return im_; }
  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }

  GaussianRational conj() const { return {re_, -im_}; }
  GaussianRational inverse() const;
  /// Integer power; negative exponents invert first.
  GaussianRational pow(int e) const;

  GaussianRational& operator+=(const GaussianRational& o);
  GaussianRational& operator-=(const GaussianRational& o);
  GaussianRational& operator*=(const GaussianRational& o);
  GaussianRational& operator/=(const GaussianRational& o);

  friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
  friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
  friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
  friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
  GaussianRational operator-() const { return {-re_, -im_}; }

  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }

  /// "a/b+c/d*i", denominators always written.
  std::string to_string() const;
  static GaussianRational parse(std::string_view text);

 private:
  BigRational re_{0};
  BigRational im_{0};
};

GaussianRational factorial(unsigned k);

enum class GenTag : std::uint8_t { z, h, psi, n, r, qs, qf, rho_t };

/// A formal generator. n/r/qs/qf carry an index; the others use index 0.
struct Generator {
  GenTag tag = GenTag::z;
  unsigned index = 0;

  auto operator<=>(const Generator&) const = default;

  bool is_indexed() const;
  std::string name() const;
  /// Throws ParseError on an unknown tag.
  static Generator parse(std::string_view text);
};

namespace gen {
inline Generator z() { return {GenTag::z, 0}; }
inline Generator h() { return {GenTag::h, 0}; }
inline Generator psi() { return {GenTag::psi, 0}; }
inline Generator rho_t() { return {GenTag::rho_t, 0}; }
inline Generator n(unsigned k) { return {GenTag::n, k}; }
inline Generator r(unsigned k) { return {GenTag::r, k}; }
inline Generator qs(unsigned k) { return {GenTag::qs, k}; }
inline Generator qf(unsigned k) { return {GenTag::qf, k}; }
}  // namespace gen

using GeneratorPredicate = std::function<bool(const Generator&)>;

/// Product of generator powers, sorted by generator, all exponents positive.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(const Generator& g, unsigned e = 1);

  const std::vector<std::pair<Generator, unsigned>>& factors() const { return factors_; }
  unsigned degree_in(const Generator& g) const;
  bool contains_any(const GeneratorPredicate& pred) const;
  bool is_one() const { return factors_.empty(); }

  friend Monomial operator*(const Monomial& a, const Monomial& b);
  /// Lowers the power of g by one; caller checks degree_in(g) > 0.
  Monomial without_one(const Generator& g) const;
  Monomial without(const Generator& g) const;

  auto operator<=>(const Monomial&) const = default;

  std::string to_string() const;

 private:
  std::vector<std::pair<Generator, unsigned>> factors_;
};

/// Polynomial with Gaussian-rational coefficients; zero coefficients are never stored.
class MultiPoly {
 public:
  using Terms = std::map<Monomial, GaussianRational>;

  MultiPoly() = default;
  MultiPoly(const GaussianRational& c);  // NOLINT(google-explicit-constructor)
  MultiPoly(const Generator& g);         // NOLINT(google-explicit-constructor)
  MultiPoly(const GaussianRational& c, const Monomial& m);

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  MultiPoly& operator+=(const MultiPoly& o);
  MultiPoly& operator-=(const MultiPoly& o);
  MultiPoly& operator*=(const GaussianRational& c);
  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
  friend MultiPoly operator*(MultiPoly a, const GaussianRational& c) { return a *= c; }
  MultiPoly operator-() const;
  friend bool operator==(const MultiPoly&, const MultiPoly&) = default;

  MultiPoly derivative(const Generator& g) const;
  MultiPoly drop_terms_with(const GeneratorPredicate& pred) const;
  MultiPoly substitute(const Generator& g, const GaussianRational& value) const;
  bool contains_any(const GeneratorPredicate& pred) const;

  std::string to_string() const;

 private:
  void add_term(const Monomial& m, const GaussianRational& c);
  Terms terms_;
};

/// Which symbol plays the Laurent variable.
enum class LaurentVar : std::uint8_t { rho, rho_t };

/// Laurent polynomial in the distinguished variable with MultiPoly coefficients.
/// The distinguished variable is an independent transcendental: no relation
/// between rho^2 and the other generators is imposed.
class SymbolExpr {
 public:
  using Terms = std::map<int, MultiPoly, std::greater<>>;

  SymbolExpr() = default;
  explicit SymbolExpr(LaurentVar var) : var_(var) {}
  SymbolExpr(const MultiPoly& p, int rho_exp = 0, LaurentVar var = LaurentVar::rho);  // NOLINT
  SymbolExpr(const GaussianRational& c) : SymbolExpr(MultiPoly(c)) {}                 // NOLINT
  SymbolExpr(long c) : SymbolExpr(MultiPoly(GaussianRational(c))) {}                  // NOLINT
  SymbolExpr(const Generator& g) : SymbolExpr(MultiPoly(g)) {}                        // NOLINT

  /// c * var^d.
  static SymbolExpr rho_power(int d, const GaussianRational& c = 1, LaurentVar var = LaurentVar::rho);

  const Terms& terms() const { return terms_; }
  LaurentVar var() const { return var_; }
  bool is_zero() const { return terms_.empty(); }
  /// Smallest / largest exponent of the distinguished variable; 0 for the zero expression.
  int min_exponent() const;
  int max_exponent() const;
  MultiPoly coefficient(int rho_exp) const;
  std::size_t term_count() const;

  SymbolExpr& operator+=(const SymbolExpr& o);
  SymbolExpr& operator-=(const SymbolExpr& o);
  SymbolExpr& operator*=(const SymbolExpr& o);
  friend SymbolExpr operator+(SymbolExpr a, const SymbolExpr& b) { return a += b; }
  friend SymbolExpr operator-(SymbolExpr a, const SymbolExpr& b) { return a -= b; }
  friend SymbolExpr operator*(const SymbolExpr& a, const SymbolExpr& b);
  SymbolExpr operator-() const;
  /// Expressions free of the Laurent variable compare equal regardless of its label.
  friend bool operator==(const SymbolExpr& a, const SymbolExpr& b);

  /// Relabels the distinguished variable without touching coefficients.
  SymbolExpr with_var(LaurentVar var) const;

  std::string to_string() const;
  static SymbolExpr parse(std::string_view text);

 private:
  void check_var(const SymbolExpr& o) const;
  Terms terms_;
  LaurentVar var_ = LaurentVar::rho;
};

/// Returns r with r * (c * var^d) == a. Throws DivisionByZero when c == 0.
SymbolExpr divide_by_rho_monomial(const SymbolExpr& a, const GaussianRational& c, int d);

/// Formal partial derivative; g must not be the distinguished variable.
SymbolExpr partial_derivative(const SymbolExpr& a, const Generator& g);

/// Removes every monomial containing a generator from gens.
SymbolExpr substitute_zero(const SymbolExpr& a, const std::vector<Generator>& gens);
SymbolExpr substitute_zero(const SymbolExpr& a, const GeneratorPredicate& pred);

SymbolExpr substitute_value(const SymbolExpr& a, const Generator& g, const GaussianRational& value);

bool contains_generator(const SymbolExpr& a, const GeneratorPredicate& pred);

inline bool is_n_generator(const Generator& g) { return g.tag == GenTag::n; }

}  // namespace transeig::exact
