#pragma once

// Regular solutions of u'' + u'/r + (lambda^2 n(r) - m^2/r^2) u = 0 on [0, R]
// for complex lambda and even polynomial refraction index n(r).

#include <complex>
#include <vector>

#include <json.hpp>

namespace transeig::radial {

using cplx = std::complex<double>;

/// n(r) = sum_t coeffs[t] r^{2t}, positive on [0, R].
class RadialProfile {
 public:
  RadialProfile() = default;
  /// Throws PreconditionError unless R > 0, coeffs nonempty and n > 0 on [0, R].
  RadialProfile(double radius, std::vector<double> coeffs);

  static RadialProfile constant(double radius, double value) { return {radius, {value}}; }

  double radius() const { return radius_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  bool is_constant() const;

  double operator()(double r) const;
  /// s-th radial derivative at r.
  double derivative(double r, int s) const;
  /// Max of n over a dense sample of [0, R].
  double max_value() const;
  /// Integral of n over the disk of radius R.
  double disk_integral() const;

  nlohmann::json to_json() const;
  static RadialProfile from_json(const nlohmann::json& j);

 private:
  double radius_ = 1.0;
  std::vector<double> coeffs_{1.0};
};

/// n1(r) = base(r) + amplitude (R^2 - r^2)^order, touching base to order `order` at r = R.
class ContactFamily {
 public:
  ContactFamily(RadialProfile base, double amplitude, int order);

  const RadialProfile& base() const { return base_; }
  double amplitude() const { return amplitude_; }
  int order() const { return order_; }
  const RadialProfile& n1() const { return n1_; }
  const RadialProfile& n2() const { return base_; }

  nlohmann::json to_json() const;
  static ContactFamily from_json(const nlohmann::json& j);

 private:
  RadialProfile base_;
  double amplitude_;
  int order_;
  RadialProfile n1_;
};

/// First s >= 0 with d^s/dr^s (a - b)(R) != 0 (relative tolerance on the
/// polynomial scale), or -1 when the profiles coincide.
int contact_order(const RadialProfile& a, const RadialProfile& b);

/// Solution data at a radius; true values are exp(log_scale) * (u, du, ...).
struct BoundaryData {
  cplx u;
  cplx du;
  double log_scale = 0.0;
  cplx u_lambda;   // d u / d lambda
  cplx du_lambda;  // d u' / d lambda
};

struct SolverOptions {
  double overflow_threshold = 1e100;
  double rtol = 1e-11;
  double atol = 1e-13;
  /// 0 selects min(0.05 R, 0.5 / (|lambda| sqrt(max n) + 1)).
  double seed_radius = 0.0;
  int seed_attempts = 5;
  bool sensitivity = true;
};

double default_seed_radius(const RadialProfile& p, cplx lambda);

/// Frobenius series u = r^m sum_t b_t r^{2t}, b_0 = 1, evaluated at r0;
/// log_scale carries m log r0. Throws SeedError when the tail does not settle.
BoundaryData frobenius_seed(const RadialProfile& p, int m, cplx lambda, double r0);

/// Solution regular at 0 normalized as r^m (1 + O(r^2)), evaluated at r = R.
/// Envelope: |lambda| <= 200, m <= 250, |Im lambda| <= 30.
BoundaryData regular_solution(const RadialProfile& p, int m, cplx lambda, const SolverOptions& opt = {});

/// Same normalization for constant n, from the closed form
/// u = m! (2/(k r))^m J_m(k r) r^m, k = lambda sqrt(n).
BoundaryData constant_index_solution(const RadialProfile& p, int m, cplx lambda);

/// Whether constant_index_solution covers (p, m, lambda).
bool closed_form_available(const RadialProfile& p, int m, cplx lambda);

}  // namespace transeig::radial
