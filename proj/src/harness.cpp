#include "transeig/harness.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "transeig/bessel.hpp"
#include "transeig/errors.hpp"
#include "transeig/exact.hpp"
#include "transeig/parametrix.hpp"

namespace transeig::harness {

int counting_weight(const EigenvalueRecord& r) { return r.multiplicity * (r.m == 0 ? 1 : 2); }

double weyl_constant(const DiskProblem& p) {
  return (p.n1.disk_integral() + p.n2.disk_integral()) / (4.0 * std::numbers::pi);
}

double kappa(int order) {
  if (order < 1) throw PreconditionError("kappa needs contact order >= 1");
  return 2.0 / (3.0 * order + 2.0);
}

double max_abs_im(const std::vector<EigenvalueRecord>& records, Window re) {
  double best = 0.0;
  for (const auto& r : records) {
    if (re.contains(r.lambda.real())) best = std::max(best, std::abs(r.lambda.imag()));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Weyl counting

int CountingResult::count_at(double r) const {
  int n = 0;
  for (const auto& [x, c] : staircase) {
    if (x <= r) n = c;
  }
  return n;
}

bool CountingResult::monotone() const {
  for (std::size_t q = 1; q < staircase.size(); ++q) {
    if (staircase[q].first < staircase[q - 1].first || staircase[q].second < staircase[q - 1].second) return false;
  }
  return true;
}

CountingResult weyl_count(const DiskProblem& p, double c0, double r_max, const CountingOptions& opt) {
  if (c0 < 0.5) throw PreconditionError("C0 must be >= 0.5");
  if (!(r_max > c0)) throw PreconditionError("rMax must exceed C0");
  CountingResult out;
  out.tau = weyl_constant(p);
  out.c0 = c0;
  out.r_max = r_max;
  const double im = opt.im_max > 0.0 ? opt.im_max : std::min(r_max, 30.0);
  out.region = {0.5, r_max, -im, im};
  out.m_max = opt.m_max >= 0 ? opt.m_max : roots::auto_mode_limit(p, out.region);
  roots::SearchResult res = roots::find_eigenvalues(p, out.region, out.m_max, opt.search);
  out.partial = res.partial();

  std::vector<std::pair<double, int>> events;
  for (const auto& r : res.records) {
    const double a = std::abs(r.lambda);
    if (a < c0 || a > r_max) continue;
    out.records.push_back(r);
    events.emplace_back(a, counting_weight(r));
  }
  std::sort(events.begin(), events.end());
  int n = 0;
  for (std::size_t q = 0; q < events.size(); ++q) {
    n += events[q].second;
    // Merge equal radii so N is a function of r.
    if (q + 1 < events.size() && events[q + 1].first == events[q].first) continue;
    out.staircase.emplace_back(events[q].first, n);
  }
  out.n_at_rmax = n;
  out.staircase.emplace_back(r_max, n);
  out.rel_err_at_rmax = std::abs(n / (r_max * r_max) - out.tau) / out.tau;

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int used = 0;
  for (int k = 0; k < 20; ++k) {
    double r = 0.25 * r_max * std::pow(4.0, k / 19.0);
    double dev = std::abs(out.count_at(r) - out.tau * r * r);
    if (dev <= 0.0 || r < c0) continue;
    double x = std::log(r), y = std::log(dev);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++used;
  }
  if (used >= 2) out.remainder_slope = (used * sxy - sx * sy) / (used * sxx - sx * sx);
  return out;
}

std::string staircase_csv(const CountingResult& r) {
  std::ostringstream os;
  os << "r,N\n" << std::setprecision(16);
  for (const auto& [x, n] : r.staircase) os << x << "," << n << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Strip check

StripReport strip_check(const DiskProblem& p, Window re_window, Window cal_window, const StripOptions& opt) {
  if (p.contact_order != 0) {
    throw PreconditionError("strip_check needs n1 != n2 on the boundary (contact order 0), got contact order " +
                            std::to_string(p.contact_order));
  }
  if (!(re_window.hi > re_window.lo) || !(cal_window.hi > cal_window.lo)) throw PreconditionError("empty window");
  StripReport out;
  out.re_window = re_window;
  out.cal_window = cal_window;
  Box region{std::max(0.5, std::min(re_window.lo, cal_window.lo)), std::max(re_window.hi, cal_window.hi), -opt.im_max,
             opt.im_max};
  out.m_max = opt.m_max >= 0 ? opt.m_max : roots::auto_mode_limit(p, region);
  roots::SearchResult res = roots::find_eigenvalues(p, region, out.m_max, opt.search);
  out.partial = res.partial();
  out.records = res.records;
  bool any = false;
  for (const auto& r : out.records) any = any || cal_window.contains(r.lambda.real());
  if (!any) throw CalibrationError("no eigenvalue in the calibration window");
  out.cal_max_im = max_abs_im(out.records, cal_window);
  out.c = 1.5 * out.cal_max_im;
  for (const auto& r : out.records) {
    if (re_window.contains(r.lambda.real()) && std::abs(r.lambda.imag()) > out.c) out.offenders.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parabolic region scan

RegionScanResult scan_free_region(const radial::ContactFamily& f, double re_max, double im_max, const ScanOptions& opt) {
  return scan_free_region(DiskProblem::from_family(f), re_max, im_max, opt);
}

RegionScanResult scan_free_region(const DiskProblem& p, double re_max, double im_max, const ScanOptions& opt) {
  if (p.contact_order < 1) {
    throw PreconditionError("scan_free_region needs a degenerate pair (contact order >= 1), got contact order " +
                            std::to_string(p.contact_order));
  }
  if (!(re_max > 0.5) || !(im_max > 0.0)) throw PreconditionError("empty scan window");
  RegionScanResult out;
  out.order = p.contact_order;
  out.kappa = kappa(p.contact_order);
  out.exponent = 1.0 - out.kappa;
  out.re_max = re_max;
  out.im_max = im_max;
  out.tau = weyl_constant(p);
  Box region{0.5, re_max, -im_max, im_max};
  out.m_max = opt.m_max >= 0 ? opt.m_max : roots::auto_mode_limit(p, region);
  roots::SearchResult res = roots::find_eigenvalues(p, region, out.m_max, opt.search);
  out.partial = res.partial();
  out.records = res.records;

  auto profile = [&](const EigenvalueRecord& r) {
    return std::abs(r.lambda.imag()) / std::pow(r.lambda.real() + 1.0, out.exponent);
  };
  double cal = 0.0;
  for (const auto& r : out.records) {
    if (r.lambda.real() <= re_max / 3.0) cal = std::max(cal, profile(r));
  }
  out.calibrated_c = 2.0 * cal;
  for (const auto& r : out.records) {
    if (std::abs(r.lambda.imag()) >= out.calibrated_c * std::pow(r.lambda.real() + 1.0, out.exponent)) {
      out.violations.push_back(r);
    }
  }
  for (double lo = 0.0; lo < re_max; lo += 10.0) {
    GrowthBin bin{lo, std::min(lo + 10.0, re_max), 0.0, 0};
    for (const auto& r : out.records) {
      if (r.lambda.real() >= bin.re_lo && r.lambda.real() < bin.re_hi) {
        bin.max_im = std::max(bin.max_im, std::abs(r.lambda.imag()));
        bin.count += counting_weight(r);
      }
    }
    out.growth_witness.push_back(bin);
  }
  out.strip_constant = 1.5 * max_abs_im(out.records, {5.0, 20.0});
  int n = 0;
  for (const auto& r : out.records) {
    if (std::abs(r.lambda) <= re_max) n += counting_weight(r);
  }
  out.rel_err_at_rmax = std::abs(n / (re_max * re_max) - out.tau) / out.tau;
  return out;
}

// ---------------------------------------------------------------------------
// Summaries

namespace {

nlohmann::json record_json(const EigenvalueRecord& r) {
  return {{"m", r.m}, {"re", r.lambda.real()}, {"im", r.lambda.imag()}, {"multiplicity", r.multiplicity}};
}

}  // namespace

nlohmann::json summary_json(const RegionScanResult& r) {
  nlohmann::json growth = nlohmann::json::array();
  for (const auto& b : r.growth_witness) {
    growth.push_back({{"reLo", b.re_lo}, {"reHi", b.re_hi}, {"maxIm", b.max_im}, {"count", b.count}});
  }
  nlohmann::json viol = nlohmann::json::array();
  for (const auto& v : r.violations) viol.push_back(record_json(v));
  return {{"kappa", r.kappa},
          {"exponent", r.exponent},
          {"calibratedC", r.calibrated_c},
          {"nEigenvalues", r.records.size()},
          {"nViolations", r.violations.size()},
          {"violations", viol},
          {"growthWitness", growth},
          {"stripConstant", r.strip_constant},
          {"tau", r.tau},
          {"relErrAtRmax", r.rel_err_at_rmax},
          {"contactOrder", r.order},
          {"reMax", r.re_max},
          {"imMax", r.im_max},
          {"mMax", r.m_max},
          {"partial", r.partial}};
}

nlohmann::json summary_json(const CountingResult& r) {
  return {{"tau", r.tau},
          {"relErrAtRmax", r.rel_err_at_rmax},
          {"nEigenvalues", r.records.size()},
          {"countAtRmax", r.n_at_rmax},
          {"rMax", r.r_max},
          {"c0", r.c0},
          {"remainderSlope", r.remainder_slope},
          {"monotone", r.monotone()},
          {"imMax", r.region.im_max},
          {"mMax", r.m_max},
          {"partial", r.partial}};
}

nlohmann::json summary_json(const StripReport& r) {
  nlohmann::json off = nlohmann::json::array();
  for (const auto& v : r.offenders) off.push_back(record_json(v));
  return {{"c", r.c},
          {"calMaxIm", r.cal_max_im},
          {"calWindow", {r.cal_window.lo, r.cal_window.hi}},
          {"reWindow", {r.re_window.lo, r.re_window.hi}},
          {"nEigenvalues", r.records.size()},
          {"nOffenders", r.offenders.size()},
          {"offenders", off},
          {"mMax", r.m_max},
          {"partial", r.partial}};
}

// ---------------------------------------------------------------------------
// Self test

std::vector<std::pair<std::string, bool>> selftest() {
  std::vector<std::pair<std::string, bool>> out;
  auto run = [&](const std::string& name, auto&& body) {
    bool ok = false;
    try {
      ok = body();
    } catch (const std::exception&) {
      ok = false;
    }
    out.emplace_back(name, ok);
  };
  using exact::GaussianRational;
  using exact::SymbolExpr;

  run("exact: gaussian inverse", [] {
    GaussianRational a(exact::make_rational(1, 2), exact::make_rational(-3, 7));
    return a * a.inverse() == GaussianRational(1);
  });
  run("exact: symbol round trip", [] {
    SymbolExpr e = SymbolExpr::parse("(1/2+3/4*i)*z*n1*rho^-3 + (-1/1+0/1*i)*qs0*rho^2");
    return SymbolExpr::parse(e.to_string()) == e;
  });
  parametrix::ParametrixTables t;
  run("parametrix: tables s=3", [&] {
    t = parametrix::build_tables(3);
    return t.transport.contains(1, 3);
  });
  run("parametrix: eikonal residual", [&] {
    parametrix::eikonal_residual(t.eikonal);
    return true;
  });
  run("parametrix: transport residual", [&] {
    parametrix::transport_residual(t.eikonal, t.transport);
    return true;
  });
  run("parametrix: n-dependence", [&] { return parametrix::verify_n_dependence(t).passed(); });
  run("parametrix: c_s constants", [&] { return parametrix::verify_c_constants(t, 3).passed(); });
  run("parametrix: degree bounds", [&] { return parametrix::degree_report(t).passed(); });
  run("parametrix: c_1 = i/4", [] {
    return parametrix::c_constant(1) == GaussianRational(0, exact::make_rational(1, 4));
  });
  run("bessel: first zero of J0", [] { return std::abs(special::bessel_j(0, 2.404825557695773)) <= 1e-11; });
  run("bessel: real axis", [] {
    for (int m : {0, 3, 17}) {
      for (double x : {0.5, 7.0, 13.0, 44.0}) {
        if (std::abs(special::bessel_j(m, x).real() - std::cyl_bessel_j(m, x)) > 1e-12) return false;
      }
    }
    return true;
  });
  run("bessel: recurrence", [] {
    for (int m = 1; m <= 30; m += 7) {
      for (special::cplx x : {special::cplx(3.0, 1.0), special::cplx(25.0, -6.0)}) {
        special::cplx res = x * (special::bessel_j(m - 1, x) + special::bessel_j(m + 1, x)) -
                            2.0 * m * special::bessel_j(m, x);
        if (std::abs(res) > 1e-10 * std::max(1.0, std::abs(special::bessel_j(m, x)) * std::abs(x))) return false;
      }
    }
    return true;
  });
  run("radial: constant index against Bessel", [] {
    auto p = radial::RadialProfile::constant(1.0, 2.0);
    for (int m : {0, 5, 40}) {
      for (radial::cplx lam : {radial::cplx(3.0, 0.5), radial::cplx(30.0, -8.0)}) {
        auto a = radial::regular_solution(p, m, lam);
        auto b = radial::constant_index_solution(p, m, lam);
        double s = 1.0 / (1.0 + m + std::abs(lam) * std::sqrt(2.0));
        double num = std::abs(a.u * b.du * s - b.u * a.du * s);
        double den = std::hypot(std::abs(a.u), s * std::abs(a.du)) * std::hypot(std::abs(b.u), s * std::abs(b.du));
        if (num > 1e-9 * den) return false;
      }
    }
    return true;
  });
  run("radial: evenness in lambda", [] {
    radial::RadialProfile p(1.0, {1.0, 0.5});
    auto a = radial::regular_solution(p, 3, radial::cplx(6.0, 1.0));
    auto b = radial::regular_solution(p, 3, radial::cplx(-6.0, -1.0));
    return std::abs(a.u * b.du - b.u * a.du) <= 1e-12 * std::abs(a.u) * std::abs(b.du);
  });
  return out;
}

}  // namespace transeig::harness
