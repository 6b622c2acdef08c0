#pragma once

// Bessel functions of the first kind, integer order, complex argument.

#include <complex>

namespace transeig::special {

using cplx = std::complex<double>;

struct BesselPair {
  cplx value;
  cplx derivative;
};

/// Supported envelope.
inline constexpr int kMaxOrder = 200;
inline constexpr double kMaxArgument = 500.0;
/// Maclaurin series below this modulus, backward recurrence above.
inline constexpr double kSeriesRadius = 12.0;

/// J_m(x) and J_m'(x) = (J_{m-1}(x) - J_{m+1}(x)) / 2.
/// Throws DomainError outside 0 <= m <= 200, |x| <= 500.
BesselPair bessel_j_pair(int m, cplx x);

inline cplx bessel_j(int m, cplx x) { return bessel_j_pair(m, x).value; }

/// Start order of the backward recurrence for J_m(x).
int backward_start_order(int m, double abs_x);

/// S_m(x) = m! (2/x)^m J_m(x), the solution of x S'' + (2m+1) S' + x S = 0
/// with S(0) = 1, and its derivative, returned as exp(log_scale) * (value, derivative).
struct ScaledBesselPair {
  cplx value;
  cplx derivative;
  double log_scale = 0.0;
};

ScaledBesselPair normalized_bessel_pair(int m, cplx x);

}  // namespace transeig::special
