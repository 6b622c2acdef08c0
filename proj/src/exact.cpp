#include "transeig/exact.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "transeig/errors.hpp"

namespace transeig::exact {

BigRational make_rational(long num, long den) {
  if (den == 0) throw DivisionByZero("rational with zero denominator");
  BigRational q(num, den);
  q.canonicalize();
  return q;
}

namespace {

std::string rational_text(const BigRational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

BigRational parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw ParseError("empty rational");
  BigRational q;
  if (q.set_str(s, 10) != 0) throw ParseError("bad rational: " + s);
  if (sgn(q.get_den()) == 0) throw DivisionByZero("rational with zero denominator: " + s);
  q.canonicalize();
  return q;
}

}  // namespace

GaussianRational::GaussianRational(BigRational re, BigRational im)
    : re_(std::move(re)), im_(std::move(im)) {
  re_.canonicalize();
  im_.canonicalize();
}

GaussianRational GaussianRational::inverse() const {
  if (is_zero()) throw DivisionByZero("inverse of zero Gaussian rational");
  BigRational norm = re_ * re_ + im_ * im_;
  return {re_ / norm, -im_ / norm};
}

GaussianRational GaussianRational::pow(int e) const {
  GaussianRational base = e < 0 ? inverse() : *this;
  unsigned k = e < 0 ? static_cast<unsigned>(-e) : static_cast<unsigned>(e);
  GaussianRational acc(1);
  while (k != 0) {
    if (k & 1U) acc *= base;
    base *= base;
    k >>= 1U;
  }
  return acc;
}

GaussianRational& GaussianRational::operator+=(const GaussianRational& o) {
  re_ += o.re_;
  im_ += o.im_;
  return *this;
}

GaussianRational& GaussianRational::operator-=(const GaussianRational& o) {
  re_ -= o.re_;
  im_ -= o.im_;
  return *this;
}

GaussianRational& GaussianRational::operator*=(const GaussianRational& o) {
  BigRational re = re_ * o.re_ - im_ * o.im_;
  BigRational im = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

GaussianRational& GaussianRational::operator/=(const GaussianRational& o) {
  return *this *= o.inverse();
}

std::string GaussianRational::to_string() const {
  std::string im = rational_text(im_);
  return rational_text(re_) + (sgn(im_) < 0 ? "" : "+") + im + "*i";
}

GaussianRational GaussianRational::parse(std::string_view text) {
  if (text.size() < 2 || text.substr(text.size() - 2) != "*i") {
    throw ParseError("coefficient must end in *i: " + std::string(text));
  }
  std::string_view body = text.substr(0, text.size() - 2);
  std::size_t split = std::string_view::npos;
  for (std::size_t p = 1; p < body.size(); ++p) {
    if ((body[p] == '+' || body[p] == '-') && body[p - 1] != '/') {
      split = p;
      break;
    }
  }
  if (split == std::string_view::npos) throw ParseError("bad coefficient: " + std::string(text));
  std::string_view im = body.substr(split);
  if (im.front() == '+') im.remove_prefix(1);
  return {parse_rational(body.substr(0, split)), parse_rational(im)};
}

GaussianRational factorial(unsigned k) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), k);
  return {BigRational(f), BigRational(0)};
}

// ---------------------------------------------------------------------------

bool Generator::is_indexed() const {
  return tag == GenTag::n || tag == GenTag::r || tag == GenTag::qs || tag == GenTag::qf;
}

std::string Generator::name() const {
  switch (tag) {
    case GenTag::z: return "z";
    case GenTag::h: return "h";
    case GenTag::psi: return "psi";
    case GenTag::rho_t: return "rho_t";
    case GenTag::n: return "n" + std::to_string(index);
    case GenTag::r: return "r" + std::to_string(index);
    case GenTag::qs: return "qs" + std::to_string(index);
    case GenTag::qf: return "qf" + std::to_string(index);
  }
  return "?";
}

Generator Generator::parse(std::string_view text) {
  if (text == "z") return gen::z();
  if (text == "h") return gen::h();
  if (text == "psi") return gen::psi();
  if (text == "rho_t") return gen::rho_t();
  static constexpr std::pair<std::string_view, GenTag> kIndexed[] = {
      {"qs", GenTag::qs}, {"qf", GenTag::qf}, {"n", GenTag::n}, {"r", GenTag::r}};
  for (const auto& [prefix, tag] : kIndexed) {
    if (text.size() > prefix.size() && text.substr(0, prefix.size()) == prefix) {
      std::string_view digits = text.substr(prefix.size());
      unsigned idx = 0;
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), idx);
      if (ec == std::errc() && ptr == digits.data() + digits.size()) return {tag, idx};
    }
  }
  throw ParseError("unknown generator: " + std::string(text));
}

// ---------------------------------------------------------------------------

Monomial::Monomial(const Generator& g, unsigned e) {
  if (e > 0) factors_.emplace_back(g, e);
}

unsigned Monomial::degree_in(const Generator& g) const {
  for (const auto& [h, e] : factors_) {
    if (h == g) return e;
  }
  return 0;
}

bool Monomial::contains_any(const GeneratorPredicate& pred) const {
  return std::any_of(factors_.begin(), factors_.end(), [&](const auto& f) { return pred(f.first); });
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.factors_.reserve(a.factors_.size() + b.factors_.size());
  auto ia = a.factors_.begin();
  auto ib = b.factors_.begin();
  while (ia != a.factors_.end() || ib != b.factors_.end()) {
    if (ib == b.factors_.end() || (ia != a.factors_.end() && ia->first < ib->first)) {
      out.factors_.push_back(*ia++);
    } else if (ia == a.factors_.end() || ib->first < ia->first) {
      out.factors_.push_back(*ib++);
    } else {
      out.factors_.emplace_back(ia->first, ia->second + ib->second);
      ++ia;
      ++ib;
    }
  }
  return out;
}

Monomial Monomial::without_one(const Generator& g) const {
  Monomial out = *this;
  for (auto it = out.factors_.begin(); it != out.factors_.end(); ++it) {
    if (it->first == g) {
      if (--it->second == 0) out.factors_.erase(it);
      break;
    }
  }
  return out;
}

Monomial Monomial::without(const Generator& g) const {
  Monomial out = *this;
  std::erase_if(out.factors_, [&](const auto& f) { return f.first == g; });
  return out;
}

std::string Monomial::to_string() const {
  std::string s;
  for (const auto& [g, e] : factors_) {
    if (!s.empty()) s += '*';
    s += g.name();
    if (e != 1) s += '^' + std::to_string(e);
  }
  return s;
}

// ---------------------------------------------------------------------------

MultiPoly::MultiPoly(const GaussianRational& c) { add_term(Monomial{}, c); }

MultiPoly::MultiPoly(const Generator& g) { add_term(Monomial(g), 1); }

MultiPoly::MultiPoly(const GaussianRational& c, const Monomial& m) { add_term(m, c); }

void MultiPoly::add_term(const Monomial& m, const GaussianRational& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

MultiPoly& MultiPoly::operator*=(const GaussianRational& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, coef] : terms_) coef *= c;
  return *this;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
  MultiPoly out;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) out.add_term(ma * mb, ca * cb);
  }
  return out;
}

MultiPoly MultiPoly::operator-() const {
  MultiPoly out = *this;
  for (auto& [m, c] : out.terms_) c = -c;
  return out;
}

MultiPoly MultiPoly::derivative(const Generator& g) const {
  MultiPoly out;
  for (const auto& [m, c] : terms_) {
    unsigned e = m.degree_in(g);
    if (e == 0) continue;
    out.add_term(m.without_one(g), c * GaussianRational(static_cast<long>(e)));
  }
  return out;
}

MultiPoly MultiPoly::drop_terms_with(const GeneratorPredicate& pred) const {
  MultiPoly out;
  for (const auto& [m, c] : terms_) {
    if (!m.contains_any(pred)) out.terms_.emplace(m, c);
  }
  return out;
}

MultiPoly MultiPoly::substitute(const Generator& g, const GaussianRational& value) const {
  MultiPoly out;
  for (const auto& [m, c] : terms_) {
    unsigned e = m.degree_in(g);
    out.add_term(m.without(g), e == 0 ? c : c * value.pow(static_cast<int>(e)));
  }
  return out;
}

bool MultiPoly::contains_any(const GeneratorPredicate& pred) const {
  return std::any_of(terms_.begin(), terms_.end(),
                     [&](const auto& t) { return t.first.contains_any(pred); });
}

std::string MultiPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::string s;
  for (const auto& [m, c] : terms_) {
    if (!s.empty()) s += " + ";
    s += '(' + c.to_string() + ')';
    if (!m.is_one()) s += '*' + m.to_string();
  }
  return s;
}

// ---------------------------------------------------------------------------

namespace {

const char* var_name(LaurentVar v) { return v == LaurentVar::rho ? "rho" : "rho_t"; }

}  // namespace

SymbolExpr::SymbolExpr(const MultiPoly& p, int rho_exp, LaurentVar var) : var_(var) {
  if (!p.is_zero()) terms_.emplace(rho_exp, p);
}

SymbolExpr SymbolExpr::rho_power(int d, const GaussianRational& c, LaurentVar var) {
  return SymbolExpr(MultiPoly(c), d, var);
}

int SymbolExpr::min_exponent() const { return terms_.empty() ? 0 : terms_.rbegin()->first; }

int SymbolExpr::max_exponent() const { return terms_.empty() ? 0 : terms_.begin()->first; }

MultiPoly SymbolExpr::coefficient(int rho_exp) const {
  auto it = terms_.find(rho_exp);
  return it == terms_.end() ? MultiPoly{} : it->second;
}

std::size_t SymbolExpr::term_count() const {
  std::size_t n = 0;
  for (const auto& [e, p] : terms_) n += p.size();
  return n;
}

void SymbolExpr::check_var(const SymbolExpr& o) const {
  // Constants are var-agnostic.
  if (var_ != o.var_ && !(is_zero() || o.is_zero())) {
    bool const_a = terms_.size() == 1 && terms_.begin()->first == 0;
    bool const_b = o.terms_.size() == 1 && o.terms_.begin()->first == 0;
    if (!const_a && !const_b) throw PreconditionError("mixing rho and rho_t expressions");
  }
}

SymbolExpr& SymbolExpr::operator+=(const SymbolExpr& o) {
  check_var(o);
  if (is_zero() || (terms_.size() == 1 && terms_.begin()->first == 0)) var_ = o.var_;
  for (const auto& [e, p] : o.terms_) {
    auto [it, inserted] = terms_.try_emplace(e, p);
    if (!inserted) {
      it->second += p;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }
  return *this;
}

SymbolExpr& SymbolExpr::operator-=(const SymbolExpr& o) { return *this += -o; }

SymbolExpr operator*(const SymbolExpr& a, const SymbolExpr& b) {
  a.check_var(b);
  bool a_const = a.terms_.empty() || (a.terms_.size() == 1 && a.terms_.begin()->first == 0);
  SymbolExpr out(a_const ? b.var_ : a.var_);
  for (const auto& [ea, pa] : a.terms_) {
    for (const auto& [eb, pb] : b.terms_) {
      MultiPoly prod = pa * pb;
      if (prod.is_zero()) continue;
      auto [it, inserted] = out.terms_.try_emplace(ea + eb, prod);
      if (!inserted) {
        it->second += prod;
        if (it->second.is_zero()) out.terms_.erase(it);
      }
    }
  }
  return out;
}

SymbolExpr& SymbolExpr::operator*=(const SymbolExpr& o) { return *this = *this * o; }

SymbolExpr SymbolExpr::operator-() const {
  SymbolExpr out = *this;
  for (auto& [e, p] : out.terms_) p = -p;
  return out;
}

bool operator==(const SymbolExpr& a, const SymbolExpr& b) {
  if (a.terms_ != b.terms_) return false;
  if (a.var_ == b.var_) return true;
  return a.terms_.empty() || (a.terms_.size() == 1 && a.terms_.begin()->first == 0);
}

SymbolExpr SymbolExpr::with_var(LaurentVar var) const {
  SymbolExpr out = *this;
  out.var_ = var;
  return out;
}

std::string SymbolExpr::to_string() const {
  if (terms_.empty()) return "0";
  std::string s;
  for (const auto& [e, p] : terms_) {
    for (const auto& [m, c] : p.terms()) {
      if (!s.empty()) s += " + ";
      s += '(' + c.to_string() + ')';
      if (!m.is_one()) s += '*' + m.to_string();
      if (e != 0) s += std::string("*") + var_name(var_) + '^' + std::to_string(e);
    }
  }
  return s;
}

// Grammar: "0" | term (" + " term)*, term = "(" coef ")" ("*" factor)*,
// factor = name ["^" int]. The names rho / rho_t denote the Laurent variable.
SymbolExpr SymbolExpr::parse(std::string_view text) {
  if (text == "0") return {};
  SymbolExpr out;
  bool var_seen = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t next = text.find(" + ", pos);
    std::string_view term = text.substr(pos, next == std::string_view::npos ? text.npos : next - pos);
    if (term.size() < 2 || term.front() != '(') throw ParseError("bad term: " + std::string(term));
    std::size_t close = term.find(')');
    if (close == std::string_view::npos) throw ParseError("unclosed coefficient");
    GaussianRational c = GaussianRational::parse(term.substr(1, close - 1));
    std::string_view rest = term.substr(close + 1);
    Monomial mono;
    int rho_exp = 0;
    while (!rest.empty()) {
      if (rest.front() != '*') throw ParseError("expected '*' in term: " + std::string(term));
      rest.remove_prefix(1);
      std::size_t end = rest.find('*');
      std::string_view factor = rest.substr(0, end);
      rest = end == std::string_view::npos ? std::string_view{} : rest.substr(end);
      std::size_t caret = factor.find('^');
      std::string_view name = factor.substr(0, caret);
      int e = 1;
      if (caret != std::string_view::npos) {
        std::string_view digits = factor.substr(caret + 1);
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), e);
        if (ec != std::errc() || ptr != digits.data() + digits.size()) {
          throw ParseError("bad exponent: " + std::string(factor));
        }
      }
      if (name == "rho" || name == "rho_t") {
        LaurentVar v = name == "rho" ? LaurentVar::rho : LaurentVar::rho_t;
        if (var_seen && v != out.var_) throw ParseError("mixed Laurent variables");
        out.var_ = v;
        var_seen = true;
        rho_exp += e;
      } else {
        if (e <= 0) throw ParseError("non-positive generator exponent: " + std::string(factor));
        mono = mono * Monomial(Generator::parse(name), static_cast<unsigned>(e));
      }
    }
    SymbolExpr t(MultiPoly(c, mono), rho_exp, out.var_);
    out += t;
    if (next == std::string_view::npos) break;
    pos = next + 3;
  }
  return out;
}

// ---------------------------------------------------------------------------

SymbolExpr divide_by_rho_monomial(const SymbolExpr& a, const GaussianRational& c, int d) {
  if (c.is_zero()) throw DivisionByZero("divide_by_rho_monomial with zero constant");
  GaussianRational inv = c.inverse();
  SymbolExpr out(a.var());
  for (const auto& [e, p] : a.terms()) out += SymbolExpr(p * inv, e - d, a.var());
  return out;
}

SymbolExpr partial_derivative(const SymbolExpr& a, const Generator& g) {
  if (a.var() == LaurentVar::rho_t && g.tag == GenTag::rho_t) {
    throw PreconditionError("cannot differentiate with respect to the Laurent variable");
  }
  SymbolExpr out(a.var());
  for (const auto& [e, p] : a.terms()) out += SymbolExpr(p.derivative(g), e, a.var());
  return out;
}

SymbolExpr substitute_zero(const SymbolExpr& a, const GeneratorPredicate& pred) {
  SymbolExpr out(a.var());
  for (const auto& [e, p] : a.terms()) out += SymbolExpr(p.drop_terms_with(pred), e, a.var());
  return out;
}

SymbolExpr substitute_zero(const SymbolExpr& a, const std::vector<Generator>& gens) {
  return substitute_zero(a, [&](const Generator& g) {
    return std::find(gens.begin(), gens.end(), g) != gens.end();
  });
}

SymbolExpr substitute_value(const SymbolExpr& a, const Generator& g, const GaussianRational& value) {
  SymbolExpr out(a.var());
  for (const auto& [e, p] : a.terms()) out += SymbolExpr(p.substitute(g, value), e, a.var());
  return out;
}

bool contains_generator(const SymbolExpr& a, const GeneratorPredicate& pred) {
  return std::any_of(a.terms().begin(), a.terms().end(),
                     [&](const auto& t) { return t.second.contains_any(pred); });
}

}  // namespace transeig::exact
