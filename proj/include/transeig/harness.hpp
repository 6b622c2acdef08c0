#pragma once

// Experiments on the computed spectrum: Weyl counting, strip checks and
// parabolic eigenvalue-free region scans, with CSV/JSON emission.

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "transeig/roots.hpp"

namespace transeig::harness {

using roots::Box;
using roots::DiskProblem;
using roots::EigenvalueRecord;

/// Counting weight of a record: multiplicity times 2 for the modes +-m (m >= 1).
int counting_weight(const EigenvalueRecord& r);

/// tau = (1/4 pi) * integral over the disk of (n1 + n2).
double weyl_constant(const DiskProblem& p);

struct CountingOptions {
  /// Half-height of the search window; eigenvalues are enumerated in
  /// [0.5, rMax] x [-im_max, im_max]. Non-positive selects min(rMax, 30).
  double im_max = 0.0;
  int m_max = -1;  // -1 selects roots::auto_mode_limit
  roots::SearchOptions search;
};

struct CountingResult {
  std::vector<std::pair<double, int>> staircase;  // (r, N(r)), right-continuous
  double tau = 0.0;
  double r_max = 0.0;
  double c0 = 0.0;
  int n_at_rmax = 0;
  double rel_err_at_rmax = 0.0;
  /// Descriptive log-log slope of |N(r) - tau r^2| on [rMax/4, rMax]; not asserted.
  double remainder_slope = 0.0;
  std::vector<EigenvalueRecord> records;
  Box region;
  int m_max = 0;
  bool partial = false;

  /// N(r) read off the staircase.
  int count_at(double r) const;
  bool monotone() const;
};

/// Eigenvalues with c0 <= |lambda| <= r_max, Re lambda > 0, both signs of Im lambda searched
/// directly so each record counts once with counting_weight.
CountingResult weyl_count(const DiskProblem& p, double c0, double r_max, const CountingOptions& opt = {});

struct Window {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return x >= lo && x <= hi; }
};

struct StripReport {
  Window re_window{20.0, 60.0};
  Window cal_window{5.0, 20.0};
  double cal_max_im = 0.0;
  double c = 0.0;  // 1.5 * cal_max_im
  std::vector<EigenvalueRecord> records;
  std::vector<EigenvalueRecord> offenders;
  int m_max = 0;
  bool partial = false;
  bool passed() const { return offenders.empty() && !partial; }
};

struct StripOptions {
  double im_max = 12.0;
  int m_max = -1;
  roots::SearchOptions search;
};

/// Non-degenerate pairs only (contact order 0). Throws PreconditionError otherwise
/// and CalibrationError when the calibration window holds no eigenvalue.
StripReport strip_check(const DiskProblem& p, Window re_window = {20.0, 60.0}, Window cal_window = {5.0, 20.0},
                        const StripOptions& opt = {});

struct GrowthBin {
  double re_lo = 0.0;
  double re_hi = 0.0;
  double max_im = 0.0;
  int count = 0;
};

struct RegionScanResult {
  std::vector<EigenvalueRecord> records;
  int order = 0;
  double kappa = 0.0;     // 2 / (3j + 2)
  double exponent = 0.0;  // 1 - kappa
  double calibrated_c = 0.0;
  std::vector<EigenvalueRecord> violations;
  std::vector<GrowthBin> growth_witness;  // max |Im lambda| per Re bin of width 10
  /// 1.5 * max |Im lambda| over Re in [5, 20]: the strip constant the strip check would fit.
  double strip_constant = 0.0;
  double tau = 0.0;
  double rel_err_at_rmax = 0.0;
  double re_max = 0.0;
  double im_max = 0.0;
  int m_max = 0;
  bool partial = false;
};

struct ScanOptions {
  int m_max = -1;
  roots::SearchOptions search;
};

double kappa(int order);

/// Contact order j >= 1 only; throws PreconditionError for non-degenerate input.
RegionScanResult scan_free_region(const radial::ContactFamily& f, double re_max, double im_max,
                                  const ScanOptions& opt = {});
/// Same scan for any problem with contact order >= 1.
RegionScanResult scan_free_region(const DiskProblem& p, double re_max, double im_max, const ScanOptions& opt = {});

/// Largest |Im lambda| among records with Re lambda in [lo, hi]; 0 if none.
double max_abs_im(const std::vector<EigenvalueRecord>& records, Window re);

nlohmann::json summary_json(const RegionScanResult& r);
nlohmann::json summary_json(const CountingResult& r);
nlohmann::json summary_json(const StripReport& r);
std::string staircase_csv(const CountingResult& r);

/// Fast internal checks of the symbolic, Bessel and radial layers; (name, passed) pairs.
std::vector<std::pair<std::string, bool>> selftest();

}  // namespace transeig::harness
