#include "transeig/roots.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <iomanip>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>
#include <utility>

#include "transeig/errors.hpp"

namespace transeig::roots {

// ---------------------------------------------------------------------------
// Problem and box plumbing

DiskProblem::DiskProblem(RadialProfile a, RadialProfile b) : n1(std::move(a)), n2(std::move(b)) {
  if (n1.radius() != n2.radius()) throw PreconditionError("n1 and n2 must share the disk radius");
  contact_order = radial::contact_order(n1, n2);
}

double DiskProblem::max_index() const { return std::max(n1.max_value(), n2.max_value()); }

nlohmann::json DiskProblem::to_json() const { return {{"n1", n1.to_json()}, {"n2", n2.to_json()}}; }

DiskProblem DiskProblem::from_json(const nlohmann::json& j) {
  if (j.is_object() && j.contains("base")) return from_family(radial::ContactFamily::from_json(j));
  if (!j.is_object() || !j.contains("n1") || !j.contains("n2")) {
    throw ParseError(R"(problem must look like {"n1": {"radius": R, "coeffs": [...]}, "n2": {...}})"
                     R"( or {"base": {...}, "amplitude": c, "order": j})");
  }
  return {RadialProfile::from_json(j.at("n1")), RadialProfile::from_json(j.at("n2"))};
}

bool Box::contains(cplx z, double slack) const {
  return z.real() >= re_min - slack && z.real() <= re_max + slack && z.imag() >= im_min - slack &&
         z.imag() <= im_max + slack;
}

void Box::validate() const {
  if (!(re_min > 0.0)) throw PreconditionError("box must satisfy re_min > 0");
  if (!(re_max > re_min) || !(im_max > im_min)) throw PreconditionError("box has empty interior");
}

namespace {

std::pair<double, double> parse_range(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos) throw ParseError("range must look like a:b, got '" + s + "'");
  try {
    std::size_t used = 0;
    double a = std::stod(s.substr(0, colon), &used);
    if (used != colon) throw ParseError("bad range '" + s + "'");
    std::string rest = s.substr(colon + 1);
    double b = std::stod(rest, &used);
    if (used != rest.size()) throw ParseError("bad range '" + s + "'");
    return {a, b};
  } catch (const std::logic_error&) {
    throw ParseError("bad range '" + s + "'");
  }
}

}  // namespace

Box Box::from_ranges(const std::string& re, const std::string& im) {
  auto [a, b] = parse_range(re);
  auto [c, d] = parse_range(im);
  return {a, b, c, d};
}

// ---------------------------------------------------------------------------
// Wronskian

namespace {

radial::BoundaryData solve(const RadialProfile& p, int m, cplx lambda, const SearchOptions& opt) {
  if (opt.backend == Backend::automatic && radial::closed_form_available(p, m, lambda)) {
    return radial::constant_index_solution(p, m, lambda);
  }
  return radial::regular_solution(p, m, lambda, opt.solver);
}

}  // namespace

WronskianValue wronskian(const DiskProblem& p, int m, cplx lambda, const SearchOptions& opt) {
  if (lambda == 0.0) throw PreconditionError("wronskian needs lambda != 0");
  const radial::BoundaryData a = solve(p.n1, m, lambda, opt);
  const radial::BoundaryData b = solve(p.n2, m, lambda, opt);
  WronskianValue w;
  w.value = a.u * b.du - b.u * a.du;
  w.dvalue = a.u_lambda * b.du + a.u * b.du_lambda - b.u_lambda * a.du - b.u * a.du_lambda;
  w.log_scale = a.log_scale + b.log_scale;
  const double k = std::abs(lambda);
  const double na = std::hypot(std::abs(a.u), std::abs(a.du) / k);
  const double nb = std::hypot(std::abs(b.u), std::abs(b.du) / k);
  w.residual = std::abs(w.value) / (k * na * nb);
  return w;
}

int auto_mode_limit(const DiskProblem& p, const Box& region) {
  double lam = 0.0;
  for (cplx c : {cplx(region.re_min, region.im_min), cplx(region.re_max, region.im_min),
                 cplx(region.re_min, region.im_max), cplx(region.re_max, region.im_max)}) {
    lam = std::max(lam, std::abs(c));
  }
  return static_cast<int>(std::ceil(1.3 * lam * std::sqrt(p.max_index()) * p.radius() + 10.0));
}

// ---------------------------------------------------------------------------
// Argument principle

namespace {

struct FloorHit {
  cplx where;
};

class Contour {
 public:
  Contour(const ContourFunction& f, const SearchOptions& opt) : f_(f), opt_(opt) {}

  // Total phase increment along the counterclockwise boundary, in units of 2 pi.
  double winding(const Box& b) {
    const cplx corners[4] = {{b.re_min, b.im_min}, {b.re_max, b.im_min}, {b.re_max, b.im_max}, {b.re_min, b.im_max}};
    std::vector<cplx> pts;
    for (int e = 0; e < 4; ++e) append_edge(pts, corners[e], corners[(e + 1) % 4]);
    double total = 0.0;
    cplx z0 = pts.front();
    cplx f0 = eval(z0);
    cplx za = z0, fa = f0;
    for (std::size_t q = 1; q <= pts.size(); ++q) {
      cplx zb = q < pts.size() ? pts[q] : z0;
      cplx fb = q < pts.size() ? eval(zb) : f0;
      total += phase(za, fa, zb, fb, 0);
      za = zb;
      fa = fb;
    }
    return total / (2.0 * std::numbers::pi);
  }

 private:
  // Dyadic grid points strictly between a and b plus a itself; edges are axis-parallel,
  // so grids of boxes sharing an edge line coincide and evaluations are reused.
  void append_edge(std::vector<cplx>& pts, cplx a, cplx b) const {
    const bool horizontal = a.imag() == b.imag();
    const double x0 = horizontal ? a.real() : a.imag();
    const double x1 = horizontal ? b.real() : b.imag();
    const double len = std::abs(x1 - x0);
    double h = std::exp2(std::floor(std::log2(1.0 / opt_.samples_per_unit)));
    while (len / h < opt_.min_samples_per_edge) h *= 0.5;
    pts.push_back(a);
    const double eps = 1e-12 * (1.0 + std::max(std::abs(x0), std::abs(x1)));
    auto point = [&](double x) { return horizontal ? cplx(x, a.imag()) : cplx(a.real(), x); };
    if (x1 > x0) {
      for (double g = std::ceil(x0 / h); g * h < x1 - eps; g += 1.0) {
        if (g * h > x0 + eps) pts.push_back(point(g * h));
      }
    } else {
      for (double g = std::floor(x0 / h); g * h > x1 + eps; g -= 1.0) {
        if (g * h < x0 - eps) pts.push_back(point(g * h));
      }
    }
  }

  cplx eval(cplx z) {
    auto [v, ok] = f_(z);
    if (!ok) throw FloorHit{z};
    return v;
  }

  double phase(cplx za, cplx fa, cplx zb, cplx fb, int depth) {
    double d = std::arg(fb / fa);
    if (std::abs(d) < opt_.max_phase_step) return d;
    if (depth > 60 || std::abs(zb - za) < 1e-13 * (1.0 + std::abs(za))) throw FloorHit{za};
    cplx zm = 0.5 * (za + zb);
    cplx fm = eval(zm);
    return phase(za, fa, zm, fm, depth + 1) + phase(zm, fm, zb, fb, depth + 1);
  }

  const ContourFunction& f_;
  const SearchOptions& opt_;
};

int round_winding(double w, const Box& b) {
  double r = std::round(w);
  if (std::abs(w - r) > 1e-6) {
    std::ostringstream os;
    os << "phase increment " << w << " turns is not an integer on box [" << b.re_min << "," << b.re_max << "]x["
       << b.im_min << "," << b.im_max << "]";
    throw BoundaryZeroError(os.str());
  }
  return static_cast<int>(r);
}

std::string describe(const Box& b) {
  std::ostringstream os;
  os << "[" << b.re_min << "," << b.re_max << "]x[" << b.im_min << "," << b.im_max << "]";
  return os.str();
}

}  // namespace

int winding_count(const ContourFunction& f, const Box& b, const SearchOptions& opt) {
  if (!(b.re_max > b.re_min) || !(b.im_max > b.im_min)) throw PreconditionError("box has empty interior");
  Contour c(f, opt);
  try {
    return round_winding(c.winding(b), b);
  } catch (const FloorHit& hit) {
    std::ostringstream os;
    os << "contour of " << describe(b) << " passes through a zero near " << hit.where;
    throw BoundaryZeroError(os.str());
  }
}

// ---------------------------------------------------------------------------
// Per-mode search

namespace {

struct KeyLess {
  bool operator()(cplx a, cplx b) const {
    auto ka = std::pair(std::bit_cast<std::uint64_t>(a.real()), std::bit_cast<std::uint64_t>(a.imag()));
    auto kb = std::pair(std::bit_cast<std::uint64_t>(b.real()), std::bit_cast<std::uint64_t>(b.imag()));
    return ka < kb;
  }
};

class ModeSearch {
 public:
  ModeSearch(const DiskProblem& p, int m, const SearchOptions& opt) : p_(p), m_(m), opt_(opt) {
    fn_ = [this](cplx z) {
      const WronskianValue& w = at(z);
      return std::pair(w.value, w.residual >= opt_.floor);
    };
  }

  const WronskianValue& at(cplx z) {
    auto it = cache_.find(z);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(z, wronskian(p_, m_, z, opt_)).first->second;
  }

  // Raw count; throws FloorHit when the contour meets a zero.
  int count(const Box& b, const SearchOptions& opt) {
    Contour c(fn_, opt);
    return round_winding(c.winding(b), b);
  }

  // Count with up to three 1% edge jitters; returns the box actually used.
  std::pair<int, Box> count_jittered(const Box& b) {
    static constexpr double kJitter[] = {0.0, 0.0037, -0.0061, 0.0097};
    for (double j : kJitter) {
      Box q = b;
      q.re_min -= j * b.width();
      q.re_max += j * b.width();
      q.im_min -= j * b.height();
      q.im_max += j * b.height();
      if (q.re_min <= 0.0) continue;
      try {
        return {count(q, opt_), q};
      } catch (const FloorHit&) {
      }
    }
    throw BoundaryZeroError("mode " + std::to_string(m_) + ": boundary of " + describe(b) +
                            " meets a zero after three jitters");
  }

  void resolve(const Box& b, int n, std::vector<EigenvalueRecord>& out, std::vector<UnresolvedBox>& unresolved) {
    if (n <= 0) {
      if (n < 0) unresolved.push_back({m_, b, n});
      return;
    }
    const double size = std::max(b.width(), b.height());
    if (n <= 2 && newton_box(b, n, out)) return;
    if (size <= opt_.bisection_width) {
      // Collapsed onto a root that Newton cannot polish; accept the center if it is one.
      const cplx z = b.center();
      const WronskianValue& w = at(z);
      if (w.residual <= opt_.newton_tol) {
        out.push_back({z, m_, n, w.residual, b});
      } else {
        unresolved.push_back({m_, b, n});
      }
      return;
    }
    static constexpr double kFractions[] = {0.5123, 0.4877, 0.5371, 0.4629, 0.5611};
    for (double frac : kFractions) {
      Box lo = b, hi = b;
      if (b.width() >= b.height()) {
        double cut = b.re_min + frac * b.width();
        lo.re_max = cut;
        hi.re_min = cut;
      } else {
        double cut = b.im_min + frac * b.height();
        lo.im_max = cut;
        hi.im_min = cut;
      }
      int nl = 0, nh = 0;
      try {
        nl = count(lo, opt_);
        nh = count(hi, opt_);
      } catch (const FloorHit&) {
        continue;
      } catch (const BoundaryZeroError&) {
        continue;
      }
      if (nl + nh != n || nl < 0 || nh < 0) {
        SearchOptions fine = opt_;
        fine.samples_per_unit *= 2.0;
        fine.min_samples_per_edge *= 2;
        try {
          nl = count(lo, fine);
          nh = count(hi, fine);
        } catch (const std::exception&) {
          continue;
        } catch (const FloorHit&) {
          continue;
        }
        if (nl + nh != n) continue;
      }
      resolve(lo, nl, out, unresolved);
      resolve(hi, nh, out, unresolved);
      return;
    }
    unresolved.push_back({m_, b, n});
  }

 private:
  // Newton on W, or on W / (lambda - avoid) when deflating. Returns the root or nothing.
  std::optional<cplx> newton(cplx z, const Box& b, const cplx* avoid) {
    const double scale = 1.0 + std::abs(b.center());
    const double reach = std::max(b.width(), b.height());
    for (int it = 0; it < opt_.newton_iterations; ++it) {
      const WronskianValue& w = at(z);
      if (w.value == 0.0) return z;
      cplx ratio = w.dvalue / w.value;
      if (avoid) ratio -= 1.0 / (z - *avoid);
      if (ratio == 0.0 || !std::isfinite(ratio.real()) || !std::isfinite(ratio.imag())) return std::nullopt;
      cplx step = 1.0 / ratio;
      z -= step;
      if (!b.contains(z, reach)) return std::nullopt;
      if (std::abs(step) <= 1e-14 * scale) return z;
    }
    return std::nullopt;
  }

  // Real roots of a real problem: restart on the axis and keep the real iterate.
  cplx snap_real(cplx z) {
    if (std::abs(z.imag()) > 1e-9 * (1.0 + std::abs(z))) return z;
    cplx r(z.real(), 0.0);
    for (int it = 0; it < 8; ++it) {
      const WronskianValue& w = at(r);
      if (w.value == 0.0) break;
      double step = (w.value / w.dvalue).real();
      if (!std::isfinite(step)) return z;
      r = cplx(r.real() - step, 0.0);
      if (std::abs(step) <= 1e-15 * (1.0 + std::abs(r))) break;
    }
    return at(r).residual <= at(z).residual || at(r).residual <= opt_.newton_tol ? r : z;
  }

  bool accept(cplx z, const Box& b) {
    return b.contains(z, 1e-12 * (1.0 + std::abs(z))) && at(z).residual <= opt_.newton_tol;
  }

  bool newton_box(const Box& b, int n, std::vector<EigenvalueRecord>& out) {
    const cplx start = b.center();
    auto r1 = newton(start, b, nullptr);
    if (!r1) return false;
    cplx z1 = snap_real(*r1);
    if (!accept(z1, b)) return false;
    if (n == 1) {
      out.push_back({z1, m_, 1, at(z1).residual, b});
      return true;
    }
    const cplx offset(0.13 * b.width(), 0.07 * b.height());
    auto r2 = newton(start + offset, b, &z1);
    const double tol = 1e-7 * (1.0 + std::abs(z1));
    if (r2 && std::abs(*r2 - z1) > tol) {
      cplx z2 = snap_real(*r2);
      if (!accept(z2, b) || std::abs(z2 - z1) <= tol) return false;
      out.push_back({z1, m_, 1, at(z1).residual, b});
      out.push_back({z2, m_, 1, at(z2).residual, b});
      return true;
    }
    // Deflation drifts back onto z1: a double root. Confirm on a small circle.
    const double rad = std::min(1e-3 * (1.0 + std::abs(z1)), 0.25 * std::min(b.width(), b.height()));
    Box tiny{z1.real() - rad, z1.real() + rad, z1.imag() - rad, z1.imag() + rad};
    try {
      if (count(tiny, opt_) != 2) return false;
    } catch (const FloorHit&) {
      return false;
    } catch (const BoundaryZeroError&) {
      return false;
    }
    out.push_back({z1, m_, 2, at(z1).residual, b});
    return true;
  }

  const DiskProblem& p_;
  int m_;
  const SearchOptions& opt_;
  ContourFunction fn_;
  std::map<cplx, WronskianValue, KeyLess> cache_;
};

void check_envelope(const Box& region, int m_max) {
  const double lam = std::max(std::abs(cplx(region.re_max, region.im_max)), std::abs(cplx(region.re_max, region.im_min)));
  if (lam > 200.0 || std::max(std::abs(region.im_min), std::abs(region.im_max)) > 30.0 || m_max > 250) {
    throw DomainError("search region outside the solver envelope (|lambda| <= 200, |Im lambda| <= 30, m <= 250)");
  }
}

}  // namespace

int winding_count(const DiskProblem& p, int m, const Box& b, const SearchOptions& opt) {
  b.validate();
  ModeSearch s(p, m, opt);
  return s.count_jittered(b).first;
}

SearchResult find_eigenvalues(const DiskProblem& p, const Box& region, int m_max, const SearchOptions& opt) {
  region.validate();
  if (region.re_min < 0.5) throw PreconditionError("search region must keep Re lambda >= 0.5 (|lambda| < 0.5 is excluded)");
  if (m_max < 0) throw PreconditionError("mMax must be >= 0");
  check_envelope(region, m_max);
  if (p.contact_order < 0) throw DegenerateProblemError("n1 == n2: every lambda is a transmission eigenvalue");
  {
    // Flat sampling guard for profiles that agree numerically but not coefficient-wise.
    bool flat = true;
    for (int q = 0; q < 5 && flat; ++q) {
      cplx z(region.re_min + (q + 0.5) / 5.0 * region.width(), region.im_min + 0.37 * region.height());
      flat = wronskian(p, 0, z, opt).residual < opt.floor;
    }
    if (flat) throw DegenerateProblemError("W vanishes at every sample: the problem is degenerate");
  }

  struct ModeResult {
    std::vector<EigenvalueRecord> records;
    std::vector<UnresolvedBox> unresolved;
    int count = 0;
    std::exception_ptr error;
  };
  std::vector<ModeResult> results(static_cast<std::size_t>(m_max) + 1);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int m = next++; m <= m_max; m = next++) {
      ModeResult& r = results[static_cast<std::size_t>(m)];
      try {
        ModeSearch s(p, m, opt);
        auto [n, box] = s.count_jittered(region);
        r.count = n;
        s.resolve(box, n, r.records, r.unresolved);
      } catch (...) {
        r.error = std::current_exception();
      }
    }
  };
  int jobs = opt.jobs > 0 ? opt.jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  jobs = std::min(jobs, m_max + 1);
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int q = 0; q < jobs; ++q) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SearchResult out;
  for (auto& r : results) {
    if (r.error) std::rethrow_exception(r.error);
    out.mode_counts.push_back(r.count);
    std::sort(r.records.begin(), r.records.end(), [](const auto& a, const auto& b) {
      return std::pair(a.lambda.real(), a.lambda.imag()) < std::pair(b.lambda.real(), b.lambda.imag());
    });
    for (auto& rec : r.records) {
      bool dup = false;
      for (const auto& kept : out.records) {
        if (kept.m == rec.m && std::abs(kept.lambda - rec.lambda) <= 1e-7 * (1.0 + std::abs(rec.lambda))) dup = true;
      }
      if (!dup) out.records.push_back(rec);
    }
    out.unresolved.insert(out.unresolved.end(), r.unresolved.begin(), r.unresolved.end());
  }
  return out;
}

std::string records_csv(const std::vector<EigenvalueRecord>& records) {
  std::ostringstream os;
  os << "m,re_lambda,im_lambda,multiplicity,residual\n";
  os << std::setprecision(16);
  for (const auto& r : records) {
    os << r.m << "," << r.lambda.real() << "," << r.lambda.imag() << "," << r.multiplicity << ","
       << std::setprecision(3) << r.residual << std::setprecision(16) << "\n";
  }
  return os.str();
}

}  // namespace transeig::roots
