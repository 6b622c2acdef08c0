#pragma once

// Transmission eigenvalues of the disk, one angular mode at a time: zeros of
// W_m(lambda) = u1(R) u2'(R) - u2(R) u1'(R).

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "transeig/radial.hpp"

namespace transeig::roots {

using cplx = std::complex<double>;
using radial::RadialProfile;

struct DiskProblem {
  RadialProfile n1;
  RadialProfile n2;
  /// First r-derivative order at which n1 and n2 differ at R; -1 if identical.
  int contact_order = 0;

  DiskProblem() = default;
  /// Throws PreconditionError on mismatched radii.
  DiskProblem(RadialProfile a, RadialProfile b);
  static DiskProblem from_family(const radial::ContactFamily& f) { return {f.n1(), f.n2()}; }

  double radius() const { return n1.radius(); }
  double max_index() const;

  nlohmann::json to_json() const;
  /// Accepts {"n1": profile, "n2": profile} or a contact family object.
  static DiskProblem from_json(const nlohmann::json& j);
};

struct Box {
  double re_min = 0.5, re_max = 1.0, im_min = -1.0, im_max = 1.0;

  double width() const { return re_max - re_min; }
  double height() const { return im_max - im_min; }
  cplx center() const { return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)}; }
  bool contains(cplx z, double slack = 0.0) const;
  /// Throws PreconditionError unless re_min > 0 and the interior is nonempty.
  void validate() const;
  /// Parses "a:b" pairs as used on the command line.
  static Box from_ranges(const std::string& re, const std::string& im);
};

struct EigenvalueRecord {
  cplx lambda;
  int m = 0;
  int multiplicity = 1;
  double residual = 0.0;
  Box box;
};

enum class Backend {
  automatic,  // Bessel closed form for constant profiles inside its envelope, ODE otherwise
  ode,
};

struct SearchOptions {
  Backend backend = Backend::automatic;
  radial::SolverOptions solver;
  /// Normalized |W| below which a contour sample counts as hitting a zero.
  double floor = 1e-12;
  /// Boundary samples per unit length before adaptive refinement (rounded to a power of two).
  double samples_per_unit = 4.0;
  int min_samples_per_edge = 8;
  /// Adaptive refinement bisects contour segments whose phase step reaches this.
  double max_phase_step = 0.7853981633974483;
  double newton_tol = 1e-8;
  int newton_iterations = 50;
  double bisection_width = 1e-9;
  int jobs = 1;  // 0 selects the hardware concurrency
};

/// Value, lambda-derivative and scale of W_m; the true values are exp(log_scale) * (value, dvalue).
struct WronskianValue {
  cplx value;
  cplx dvalue;
  double log_scale = 0.0;
  /// |W| / (|lambda| |(u1, u1'/lambda)| |(u2, u2'/lambda)|), a scale-free zero test.
  double residual = 0.0;
};

WronskianValue wronskian(const DiskProblem& p, int m, cplx lambda, const SearchOptions& opt = {});

/// Winding number of f around the counterclockwise boundary of b, with adaptive sampling.
/// f returns the value and whether it is above the zero floor.
using ContourFunction = std::function<std::pair<cplx, bool>(cplx)>;
int winding_count(const ContourFunction& f, const Box& b, const SearchOptions& opt = {});

/// Zeros of W_m inside b with multiplicity. Throws BoundaryZeroError if the
/// contour keeps hitting a zero after three 1% jitters of the edges.
int winding_count(const DiskProblem& p, int m, const Box& b, const SearchOptions& opt = {});

/// ceil(1.3 |lambda|max sqrt(max n) R + 10) over the region.
int auto_mode_limit(const DiskProblem& p, const Box& region);

struct UnresolvedBox {
  int m = 0;
  Box box;
  int count = 0;
};

struct SearchResult {
  std::vector<EigenvalueRecord> records;  // sorted by (m, Re, Im)
  std::vector<int> mode_counts;           // winding count of the region per mode
  std::vector<UnresolvedBox> unresolved;
  bool partial() const { return !unresolved.empty(); }
};

SearchResult find_eigenvalues(const DiskProblem& p, const Box& region, int m_max, const SearchOptions& opt = {});

/// m, re_lambda, im_lambda, multiplicity, residual
std::string records_csv(const std::vector<EigenvalueRecord>& records);

}  // namespace transeig::roots
