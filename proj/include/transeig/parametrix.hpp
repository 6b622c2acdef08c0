#pragma once

// Boundary-layer parametrix recursions for the semiclassical DN symbol in the
// translation-invariant model: every boundary coefficient (n_k, R_k, q_k, psi)
// is an x'-independent formal constant, so tangential gradients of computed
// symbols vanish and grad(phi_0) = -xi' survives only inside the contractions
//   r_k  = <R_k xi', xi'>,   qf_k = <q_k^flat, xi'>,   qs_k = q_k^sharp.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "transeig/exact.hpp"

namespace transeig::parametrix {

using exact::GaussianRational;
using exact::LaurentVar;
using exact::SymbolExpr;

struct RecursionOptions {
  /// Run the n-free variant: every n_k is replaced by 0 and the Laurent
  /// variable is relabelled rho_t (phi_1 = i sqrt(r_0) plays rho).
  bool drop_n = false;
  /// Seed a_{0,0} = 1 instead of the formal generator psi.
  bool unit_psi = false;
};

struct EikonalTable {
  int order = 0;
  LaurentVar var = LaurentVar::rho;
  /// phi[k] for 1 <= k <= order; phi[0] is a placeholder (phi_0 = -<x', xi'> is not stored).
  std::vector<SymbolExpr> phi;
  RecursionOptions options;

  /// Throws TableUnderflow when k is outside [1, order].
  const SymbolExpr& at(int k) const;
};

struct TransportTable {
  int s = 0;
  /// a[(k, j)], including the seeds a_{0, j}.
  std::map<std::pair<int, int>, SymbolExpr> a;

  bool contains(int k, int j) const { return a.contains({k, j}); }
  /// a_{k,-1} = 0 and entries beyond a computed row are treated as missing (TableUnderflow).
  const SymbolExpr& at(int k, int j) const;
  /// Largest k computed in row j (row j holds 1 <= k <= s - j + 1).
  int row_length(int j) const { return s - j + 1; }
};

struct ParametrixTables {
  int s = 0;
  EikonalTable eikonal;
  TransportTable transport;
  /// rho*psi - i * sum_{j=0}^{s} h^{j+1} a_{1,j}
  SymbolExpr dn;
};

EikonalTable eikonal_table(int order, const RecursionOptions& options = {});

/// phi_k^Delta, the x_1^k coefficient of Delta(phi) in the model.
SymbolExpr phi_delta(int k, const EikonalTable& table);

/// Rows j = 0..s, row j holding k = 1..s-j+1. Needs eikonal order >= s + 2.
TransportTable transport_table(int s, const EikonalTable& eikonal, const RecursionOptions& options = {});

/// a_{k,j-1}^Delta, the x_1^k coefficient of Delta(a_{j-1}) in the model.
SymbolExpr a_delta(int k, int j_minus_1, const TransportTable& transport);

SymbolExpr dn_symbol(const EikonalTable& eikonal, const TransportTable& transport);

/// Eikonal to order s + 3, transport rows 0..s and the DN symbol.
ParametrixTables build_tables(int s, const RecursionOptions& options = {});

inline SymbolExpr dn_symbol(int s) { return build_tables(s).dn; }

/// The n-free tables; throws RecursionBug if any n(k) survives.
ParametrixTables tilde_tables(int s, bool unit_psi = false);

/// K-th entry: sum_{k+j=K}(k+1)(j+1) phi_{k+1} phi_{j+1} + r_K - z n_K for
/// 0 <= K <= order-1. Entry 0 equals rho^2 + r_0 - z n_0 (rho is free);
/// a nonzero entry for K >= 1 throws RecursionBug.
std::vector<SymbolExpr> eikonal_residual(const EikonalTable& table);

struct TransportResidual {
  int k = 0;
  int j = 0;
  SymbolExpr value;
};

/// Both sides of the transport relation re-evaluated for every (k, j) with
/// 0 <= k <= s - j; a nonzero difference throws RecursionBug.
std::vector<TransportResidual> transport_residual(const EikonalTable& eikonal,
                                                  const TransportTable& transport);

/// -i s! (-2i)^{-s-1}; zero for s = 0.
GaussianRational c_constant(int s);

struct IdentityFailure {
  std::string identity;
  int k = -1;
  int j = -1;
  int l = -1;
  std::string detail;
};

struct CheckReport {
  int checked = 0;
  std::vector<IdentityFailure> failures;
  bool passed() const { return failures.empty(); }
};

/// Exact n-dependence identities for phi_{k+1} (1 <= k <= order - 1) and for
/// every transport entry a_{k,j}, k >= 1. Ranges follow the tables passed in.
CheckReport verify_n_dependence(const ParametrixTables& tables);

/// Checks that d/dn_s of the h^s coefficient of the DN symbol is
/// c_s z psi rho^{-s-1} for 1 <= s <= max_s (max_s <= tables.s + 1).
CheckReport verify_c_constants(const ParametrixTables& tables, int max_s);

struct DegreeEntry {
  std::string name;
  int min_exponent = 0;
  int bound = 0;
};

struct DegreeReport {
  std::vector<DegreeEntry> entries;
  std::vector<IdentityFailure> failures;
  bool passed() const { return failures.empty(); }
};

/// Laurent-order shadow of the symbol-class weights:
/// ord(phi_k) >= 4 - 3k (k >= 2) and ord(a_{k,j}) >= -3k - 4j (k >= 1).
DegreeReport degree_report(const ParametrixTables& tables);

}  // namespace transeig::parametrix
