#include "transeig/parametrix.hpp"

#include "transeig/errors.hpp"

namespace transeig::parametrix {

using exact::Generator;
using exact::MultiPoly;
namespace gen = exact::gen;

namespace {

SymbolExpr scalar(long v) { return SymbolExpr(v); }

GaussianRational two_i(long k) { return GaussianRational(exact::BigRational(0), exact::BigRational(2 * k)); }

const GaussianRational kI = GaussianRational::i();

SymbolExpr n_term(unsigned k, const RecursionOptions& opt) {
  if (opt.drop_n) return {};
  return SymbolExpr(gen::z()) * SymbolExpr(gen::n(k));
}

}  // namespace

const SymbolExpr& EikonalTable::at(int k) const {
  if (k < 1 || k > order) {
    throw TableUnderflow("eikonal table of order " + std::to_string(order) + " has no phi_" +
                         std::to_string(k));
  }
  return phi[static_cast<std::size_t>(k)];
}

const SymbolExpr& TransportTable::at(int k, int j) const {
  auto it = a.find({k, j});
  if (it == a.end()) {
    throw TableUnderflow("transport table has no a_{" + std::to_string(k) + "," + std::to_string(j) + "}");
  }
  return it->second;
}

EikonalTable eikonal_table(int order, const RecursionOptions& options) {
  if (order < 2) throw PreconditionError("eikonal order must be >= 2");
  EikonalTable t;
  t.order = order;
  t.options = options;
  t.var = options.drop_n ? LaurentVar::rho_t : LaurentVar::rho;
  t.phi.resize(static_cast<std::size_t>(order) + 1);
  t.phi[1] = SymbolExpr::rho_power(1, 1, t.var);
  for (int K = 1; K <= order - 1; ++K) {
    SymbolExpr rhs = n_term(static_cast<unsigned>(K), options) - SymbolExpr(gen::r(static_cast<unsigned>(K)));
    for (int k = 1; k <= K - 1; ++k) {
      int j = K - k;
      rhs -= scalar((k + 1) * (j + 1)) * t.phi[k + 1] * t.phi[j + 1];
    }
    t.phi[K + 1] = exact::divide_by_rho_monomial(rhs.with_var(t.var), 2 * (K + 1), 1);
  }
  return t;
}

SymbolExpr phi_delta(int k, const EikonalTable& table) {
  if (k < 0 || k + 2 > table.order) {
    throw TableUnderflow("phi_delta(" + std::to_string(k) + ") needs phi_" + std::to_string(k + 2));
  }
  SymbolExpr out = scalar((k + 1) * (k + 2)) * table.at(k + 2);
  for (int l = 0; l <= k; ++l) {
    int nu = k - l;
    out += SymbolExpr(gen::qs(static_cast<unsigned>(l))) * scalar(nu + 1) * table.at(nu + 1);
  }
  out -= SymbolExpr(gen::qf(static_cast<unsigned>(k)));
  return out;
}

SymbolExpr a_delta(int k, int j_minus_1, const TransportTable& transport) {
  if (j_minus_1 < 0) return {};
  SymbolExpr out = scalar((k + 1) * (k + 2)) * transport.at(k + 2, j_minus_1);
  for (int l = 0; l <= k; ++l) {
    int nu = k - l;
    out += SymbolExpr(gen::qs(static_cast<unsigned>(l))) * scalar(nu + 1) * transport.at(nu + 1, j_minus_1);
  }
  return out;
}

TransportTable transport_table(int s, const EikonalTable& eikonal, const RecursionOptions& options) {
  if (s < 1) throw PreconditionError("transport order s must be >= 1");
  if (eikonal.order < s + 2) {
    throw TableUnderflow("transport_table(" + std::to_string(s) + ") needs eikonal order >= " +
                         std::to_string(s + 2) + ", got " + std::to_string(eikonal.order));
  }
  TransportTable t;
  t.s = s;
  const LaurentVar var = eikonal.var;
  SymbolExpr seed = options.unit_psi ? scalar(1) : SymbolExpr(gen::psi());
  for (int j = 0; j <= s; ++j) t.a[{0, j}] = j == 0 ? seed : SymbolExpr(var);

  std::vector<SymbolExpr> phi_d(static_cast<std::size_t>(s) + 1);
  for (int k = 0; k <= s; ++k) phi_d[static_cast<std::size_t>(k)] = phi_delta(k, eikonal);

  for (int J = 0; J <= s; ++J) {
    for (int K = 0; K <= s - J; ++K) {
      SymbolExpr rhs = -a_delta(K, J - 1, t);
      for (int k1 = 1; k1 <= K; ++k1) {
        int k2 = K - k1;
        rhs -= SymbolExpr(two_i((k1 + 1) * (k2 + 1))) * eikonal.at(k1 + 1) * t.at(k2 + 1, J);
      }
      for (int k1 = 0; k1 <= K; ++k1) {
        int k2 = K - k1;
        rhs -= SymbolExpr(kI) * phi_d[static_cast<std::size_t>(k1)] * t.at(k2, J);
      }
      t.a[{K + 1, J}] = exact::divide_by_rho_monomial(rhs.with_var(var), two_i(K + 1), 1);
    }
  }
  return t;
}

SymbolExpr dn_symbol(const EikonalTable& eikonal, const TransportTable& transport) {
  const LaurentVar var = eikonal.var;
  SymbolExpr out = SymbolExpr::rho_power(1, 1, var) * transport.at(0, 0);
  SymbolExpr hpow(gen::h());
  for (int j = 0; j <= transport.s; ++j) {
    out -= SymbolExpr(kI) * hpow * transport.at(1, j);
    hpow *= SymbolExpr(gen::h());
  }
  return out;
}

ParametrixTables build_tables(int s, const RecursionOptions& options) {
  ParametrixTables t;
  t.s = s;
  t.eikonal = eikonal_table(s + 3, options);
  t.transport = transport_table(s, t.eikonal, options);
  t.dn = dn_symbol(t.eikonal, t.transport);
  return t;
}

ParametrixTables tilde_tables(int s, bool unit_psi) {
  ParametrixTables t = build_tables(s, RecursionOptions{.drop_n = true, .unit_psi = unit_psi});
  auto has_n = [](const SymbolExpr& e) { return exact::contains_generator(e, exact::is_n_generator); };
  for (int k = 1; k <= t.eikonal.order; ++k) {
    if (has_n(t.eikonal.at(k))) throw RecursionBug("n-free eikonal phi_" + std::to_string(k) + " contains n");
  }
  for (const auto& [kj, e] : t.transport.a) {
    if (has_n(e)) {
      throw RecursionBug("n-free transport a_{" + std::to_string(kj.first) + "," + std::to_string(kj.second) +
                         "} contains n");
    }
  }
  if (has_n(t.dn)) throw RecursionBug("n-free DN symbol contains n");
  return t;
}

std::vector<SymbolExpr> eikonal_residual(const EikonalTable& table) {
  std::vector<SymbolExpr> out;
  for (int K = 0; K <= table.order - 1; ++K) {
    SymbolExpr res(table.var);
    for (int k = 0; k <= K; ++k) {
      int j = K - k;
      res += scalar((k + 1) * (j + 1)) * table.at(k + 1) * table.at(j + 1);
    }
    res += SymbolExpr(gen::r(static_cast<unsigned>(K)));
    res -= n_term(static_cast<unsigned>(K), table.options);
    if (K >= 1 && !res.is_zero()) {
      throw RecursionBug("eikonal residual nonzero at K=" + std::to_string(K) + ": " + res.to_string());
    }
    out.push_back(std::move(res));
  }
  return out;
}

std::vector<TransportResidual> transport_residual(const EikonalTable& eikonal,
                                                  const TransportTable& transport) {
  std::vector<TransportResidual> out;
  for (int j = 0; j <= transport.s; ++j) {
    for (int k = 0; k <= transport.s - j; ++k) {
      SymbolExpr lhs(eikonal.var);
      for (int k1 = 0; k1 <= k; ++k1) {
        int k2 = k - k1;
        lhs += SymbolExpr(two_i((k1 + 1) * (k2 + 1))) * eikonal.at(k1 + 1) * transport.at(k2 + 1, j);
        lhs += SymbolExpr(kI) * phi_delta(k1, eikonal) * transport.at(k2, j);
      }
      SymbolExpr rhs = -a_delta(k, j - 1, transport);
      SymbolExpr diff = lhs - rhs;
      if (!diff.is_zero()) {
        throw RecursionBug("transport residual nonzero at (k,j)=(" + std::to_string(k) + "," +
                           std::to_string(j) + ")");
      }
      out.push_back({k, j, std::move(diff)});
    }
  }
  return out;
}

GaussianRational c_constant(int s) {
  if (s < 0) throw PreconditionError("c_constant needs s >= 0");
  if (s == 0) return 0;
  GaussianRational minus_two_i(exact::BigRational(0), exact::BigRational(-2));
  return -kI * exact::factorial(static_cast<unsigned>(s)) * minus_two_i.pow(-s - 1);
}

CheckReport verify_n_dependence(const ParametrixTables& tables) {
  CheckReport rep;
  const EikonalTable& eik = tables.eikonal;
  const LaurentVar var = eik.var;
  const unsigned max_l = static_cast<unsigned>(eik.order + tables.s + 2);

  // phi_{k+1}: d/dn_k = z / (2(k+1) rho), d/dn_l = 0 for l > k.
  for (int k = 1; k + 1 <= eik.order; ++k) {
    const SymbolExpr& phi = eik.at(k + 1);
    SymbolExpr expected = exact::divide_by_rho_monomial(SymbolExpr(gen::z()).with_var(var), 2 * (k + 1), 1);
    ++rep.checked;
    if (exact::partial_derivative(phi, gen::n(static_cast<unsigned>(k))) != expected) {
      rep.failures.push_back({"d phi_{k+1} / d n_k", k + 1, -1, k, "expected " + expected.to_string()});
    }
    for (unsigned l = static_cast<unsigned>(k) + 1; l <= max_l; ++l) {
      ++rep.checked;
      if (!exact::partial_derivative(phi, gen::n(l)).is_zero()) {
        rep.failures.push_back({"d phi_{k+1} / d n_l = 0", k + 1, -1, static_cast<int>(l), ""});
      }
    }
  }

  // a_{k,j}: d/dn_{k+j} = (k+j)!/k! z psi (-2i rho)^{-j-2}, d/dn_l = 0 for l > k+j.
  const GaussianRational minus_two_i(exact::BigRational(0), exact::BigRational(-2));
  const SymbolExpr psi = eik.options.unit_psi ? SymbolExpr(1) : SymbolExpr(gen::psi());
  for (const auto& [kj, a] : tables.transport.a) {
    auto [k, j] = kj;
    if (k < 1) continue;
    GaussianRational c = exact::factorial(static_cast<unsigned>(k + j)) /
                         exact::factorial(static_cast<unsigned>(k)) * minus_two_i.pow(-j - 2);
    SymbolExpr expected = SymbolExpr::rho_power(-j - 2, c, var) * SymbolExpr(gen::z()) * psi;
    if (eik.options.drop_n) expected = SymbolExpr(var);
    ++rep.checked;
    if (exact::partial_derivative(a, gen::n(static_cast<unsigned>(k + j))) != expected) {
      rep.failures.push_back({"d a_{k,j} / d n_{k+j}", k, j, k + j, "expected " + expected.to_string()});
    }
    for (unsigned l = static_cast<unsigned>(k + j) + 1; l <= max_l; ++l) {
      ++rep.checked;
      if (!exact::partial_derivative(a, gen::n(l)).is_zero()) {
        rep.failures.push_back({"d a_{k,j} / d n_l = 0", k, j, static_cast<int>(l), ""});
      }
    }
  }
  return rep;
}

CheckReport verify_c_constants(const ParametrixTables& tables, int max_s) {
  if (max_s > tables.s + 1) throw TableUnderflow("DN symbol too short for requested c_s checks");
  CheckReport rep;
  const LaurentVar var = tables.eikonal.var;
  const SymbolExpr psi = tables.eikonal.options.unit_psi ? SymbolExpr(1) : SymbolExpr(gen::psi());
  for (int s = 1; s <= max_s; ++s) {
    // h^s coefficient: strip h^s, keep only h-free terms.
    SymbolExpr hs = tables.dn;
    for (int p = 0; p < s; ++p) hs = exact::partial_derivative(hs, gen::h());
    hs = exact::substitute_zero(hs, std::vector<Generator>{gen::h()});
    hs = divide_by_rho_monomial(hs, exact::factorial(static_cast<unsigned>(s)), 0);
    SymbolExpr ns_coeff = exact::partial_derivative(hs, gen::n(static_cast<unsigned>(s)));
    SymbolExpr expected = SymbolExpr::rho_power(-s - 1, c_constant(s), var) * SymbolExpr(gen::z()) * psi;
    ++rep.checked;
    if (ns_coeff != expected) {
      rep.failures.push_back({"h^s n_s coefficient = c_s z psi rho^{-s-1}", 1, s - 1, s,
                              "got " + ns_coeff.to_string() + ", expected " + expected.to_string()});
    }
  }
  return rep;
}

DegreeReport degree_report(const ParametrixTables& tables) {
  DegreeReport rep;
  for (int k = 2; k <= tables.eikonal.order; ++k) {
    const SymbolExpr& phi = tables.eikonal.at(k);
    DegreeEntry e{"phi_" + std::to_string(k), phi.min_exponent(), 4 - 3 * k};
    if (!phi.is_zero() && e.min_exponent < e.bound) {
      rep.failures.push_back({"ord(phi_k) >= 4-3k", k, -1, -1, std::to_string(e.min_exponent)});
    }
    rep.entries.push_back(std::move(e));
  }
  for (const auto& [kj, a] : tables.transport.a) {
    auto [k, j] = kj;
    if (k < 1) continue;
    DegreeEntry e{"a_" + std::to_string(k) + "," + std::to_string(j), a.min_exponent(), -3 * k - 4 * j};
    if (!a.is_zero() && e.min_exponent < e.bound) {
      rep.failures.push_back({"ord(a_{k,j}) >= -3k-4j", k, j, -1, std::to_string(e.min_exponent)});
    }
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

}  // namespace transeig::parametrix
